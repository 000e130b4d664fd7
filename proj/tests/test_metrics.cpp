#include <doctest.h>

#include <numeric>

#include "eventcure/error.hpp"
#include "eventcure/metrics.hpp"
#include "eventcure/random.hpp"
#include "metric_oracles.hpp"

using namespace eventcure;

namespace {

Eigen::VectorXd one_hot(Eigen::Index c, Eigen::Index k) {
  Eigen::VectorXd p = Eigen::VectorXd::Constant(c, 0.1 / static_cast<double>(c - 1));
  p(k) = 0.9;
  return p;
}

EventLabelDistribution label(std::size_t c, std::size_t k) { return EventLabelDistribution::degenerate(c, k); }

ConfusionMatrix cm3() {
  ConfusionMatrix cm;
  cm.classes = {"A", "B", "C"};
  cm.counts = {{8, 1, 1}, {0, 9, 1}, {2, 0, 8}};
  return cm;
}

}  // namespace

TEST_CASE("relevant_count") {
  CHECK(relevant_count(20, 10) == 2);
  CHECK(relevant_count(5, 10) == 1);
  CHECK(relevant_count(15, 10) == 2);
  CHECK(relevant_count(5, 3) == 1);
  CHECK(relevant_count(100, 7) == 7);
}

TEST_CASE("precision examples") {
  std::vector<double> truth(10, 0.0), predicted(10, 0.0);
  truth[3] = 1.0;
  truth[7] = 0.9;
  predicted[3] = 1.0;
  predicted[1] = 0.8;
  CHECK(precision_at({predicted, truth}, 20) == 0.5);

  std::vector<double> distinct = {0.3, 0.9, 0.1, 0.5, 0.7};
  for (double t : kDefaultTList) {
    CHECK(precision_at({distinct, distinct}, t) == 1.0);
    CHECK(map_at({distinct, distinct}, t) == 1.0);
  }
  CHECK_THROWS_AS(precision_at({std::span<const double>(), std::span<const double>()}, 20), Error);
}

TEST_CASE("hand-computed AP") {
  // Ranking [A, C, B, D] with relevant {A, B}.
  const std::vector<double> truth = {1.0, 0.9, 0.1, 0.0};
  const std::vector<double> predicted = {0.9, 0.5, 0.7, 0.1};
  CHECK(map_at({predicted, truth}, 50) == doctest::Approx(0.5 * (1.0 + 2.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("metrics agree with the exhaustive oracle on small albums") {
  const auto sweep = testing::exhaustive_small_album_sweep();
  CHECK(sweep.cases > 300000);
  CHECK(sweep.worst_map < 1e-15);
  CHECK(sweep.worst_precision == 0.0);
}

TEST_CASE("metrics are invariant under increasing transforms") {
  Rng rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 30;
    std::vector<double> truth(n), predicted(n), transformed(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = uniform01(rng);
      predicted[i] = std::floor(uniform01(rng) * 6.0);  // some ties
      transformed[i] = std::exp(3.0 * predicted[i]) - 7.0;
    }
    for (double t : kDefaultTList) {
      CHECK(map_at({predicted, truth}, t) == map_at({transformed, truth}, t));
      CHECK(precision_at({predicted, truth}, t) == precision_at({transformed, truth}, t));
      const double m = map_at({predicted, truth}, t);
      CHECK(m >= 0.0);
      CHECK(m <= 1.0);
    }
  }
}

TEST_CASE("reversed ranking has zero precision when N >= 2K") {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 30;
    std::vector<double> truth(n), reversed(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = static_cast<double>(i) + uniform01(rng) * 0.5;
      reversed[i] = -truth[i];
    }
    for (double t : kDefaultTList) {
      if (n >= 2 * relevant_count(t, n)) CHECK(precision_at({reversed, truth}, t) == 0.0);
    }
  }
}

TEST_CASE("random predictions track t percent") {
  // Hypergeometric mean: E[P@t] = K / N.
  Rng rng(3);
  const std::size_t n = 20;
  double sum = 0.0;
  const int trials = 10000;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<double> truth(n), predicted(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = uniform01(rng);
      predicted[i] = uniform01(rng);
    }
    sum += precision_at({predicted, truth}, 20);
  }
  CHECK(std::abs(sum / trials - 0.2) <= 0.01);
}

TEST_CASE("top-1 accuracy") {
  const std::vector<Eigen::VectorXd> predictions = {one_hot(3, 0), one_hot(3, 1)};
  CHECK(top1_accuracy(predictions, {label(3, 0), label(3, 1)}) == 1.0);
  // Multi-label support {0, 1}: predicting 1 counts.
  CHECK(top1_accuracy({one_hot(3, 1)}, {EventLabelDistribution({0.7, 0.3, 0.0})}) == 1.0);
  // Uniform predictions pick index 0.
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  CHECK(top1_accuracy({uniform, uniform}, {label(3, 1), label(3, 2)}) == 0.0);
  try {
    top1_accuracy(predictions, {label(3, 0)});
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LengthMismatch);
  }
}

TEST_CASE("macro F1") {
  // GTs [A, A, B, B], argmaxes [A, B, B, B].
  const std::vector<Eigen::VectorXd> predictions = {one_hot(2, 0), one_hot(2, 1), one_hot(2, 1), one_hot(2, 1)};
  const std::vector<EventLabelDistribution> gts = {label(2, 0), label(2, 0), label(2, 1), label(2, 1)};
  CHECK(f1_score(predictions, gts) == doctest::Approx((2.0 / 3.0 + 0.8) / 2.0).epsilon(1e-12));
  CHECK(std::abs(f1_score(predictions, gts) - 0.7333333333333333) < 1e-9);

  CHECK(f1_score({one_hot(3, 0), one_hot(3, 1), one_hot(3, 2)}, {label(3, 0), label(3, 1), label(3, 2)}) == 1.0);
  CHECK(f1_score({one_hot(3, 1), one_hot(3, 2)}, {label(3, 0), label(3, 1)}) == 0.0);

  // A correct pick of one supported label is not a miss for the other.
  const std::vector<EventLabelDistribution> multi = {EventLabelDistribution({0.5, 0.5}), label(2, 1)};
  CHECK(f1_score({one_hot(2, 0), one_hot(2, 1)}, multi) == 1.0);
}

TEST_CASE("remap examples") {
  LabelMapping identity{{"A", "B", "C"}, {0, 1, 2}};
  const auto same = remap_confusion(cm3(), identity);
  CHECK(same.matrix.counts == cm3().counts);
  CHECK(same.accuracy == doctest::Approx(25.0 / 30.0).epsilon(1e-12));

  LabelMapping merge{{"M"}, {0, 0, std::nullopt}};
  const auto merged = remap_confusion(cm3(), merge);
  CHECK(merged.matrix.counts == std::vector<std::vector<std::uint64_t>>{{20}});
  CHECK(std::abs(merged.accuracy - 1.0) < 1e-9);

  const auto strict = remap_confusion(cm3(), merge, DroppedLabelPolicy::CountAsError);
  CHECK(strict.accuracy == doctest::Approx(18.0 / 20.0).epsilon(1e-12));
  CHECK(merged.accuracy >= strict.accuracy);

  LabelMapping none{{"M"}, {std::nullopt, std::nullopt, std::nullopt}};
  try {
    remap_confusion(cm3(), none);
    FAIL("expected AllDropped");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AllDropped);
  }
}

TEST_CASE("loose rule never lowers accuracy") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t c = 2 + rng() % 5;
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < c; ++i) cm.classes.push_back("c" + std::to_string(i));
    cm.counts.assign(c, std::vector<std::uint64_t>(c));
    for (auto& row : cm.counts) {
      for (auto& v : row) v = 1 + rng() % 10;
    }
    LabelMapping mapping;
    mapping.target_classes = {"x", "y"};
    for (std::size_t i = 0; i < c; ++i) {
      const auto r = rng() % 3;
      mapping.targets.push_back(r == 2 ? std::nullopt : std::optional<std::size_t>(r));
    }
    mapping.targets[0] = 0;
    const auto loose = remap_confusion(cm, mapping, DroppedLabelPolicy::AssumeCorrect);
    const auto strict = remap_confusion(cm, mapping, DroppedLabelPolicy::CountAsError);
    CHECK(loose.accuracy >= strict.accuracy);
    std::uint64_t kept_rows = 0;
    for (std::size_t i = 0; i < c; ++i) {
      if (mapping.targets[i]) kept_rows += std::accumulate(cm.counts[i].begin(), cm.counts[i].end(), std::uint64_t{0});
    }
    CHECK(loose.matrix.total() == kept_rows);
  }
}

TEST_CASE("confusion and mapping JSON") {
  const auto cm = cm3();
  const auto back = confusion_from_json(to_json(cm));
  CHECK(back.classes == cm.classes);
  CHECK(back.counts == cm.counts);
  const auto mapping = label_mapping_from_json(
      nlohmann::json::parse(R"({"targets": ["M"], "mapping": {"A": "M", "B": "M", "C": null}})"), cm.classes);
  CHECK(mapping.targets[0] == std::optional<std::size_t>(0));
  CHECK_FALSE(mapping.targets[2].has_value());
  CHECK_THROWS_AS(label_mapping_from_json(nlohmann::json::parse(R"({"targets": ["M"], "mapping": {"A": "M"}})"),
                                          cm.classes),
                  Error);
}

TEST_CASE("curation report") {
  AlbumRecord album;
  album.album_id = "a";
  album.image_ids = {"0", "1", "2", "3"};
  album.gt_importance = std::vector<double>{0.1, 0.9, 0.5, 0.3};
  const std::vector<double> perfect = {0.1, 0.9, 0.5, 0.3};
  const auto report = evaluate_curation({{&album, perfect}}, kDefaultTList);
  CHECK(report.cells.size() == 2 * kDefaultTList.size());
  for (const auto& cell : report.cells) CHECK(cell.value == 1.0);
  CHECK(report.cells.front().metric == "MAP");
  CHECK(report.cells.back().metric == "P");

  // Mean over albums is the hand average.
  AlbumRecord other = album;
  const std::vector<double> backwards = {0.9, 0.1, 0.3, 0.5};
  const auto two = evaluate_curation({{&album, perfect}, {&other, backwards}}, {50});
  const double expected = 0.5 * (1.0 + map_at({backwards, *other.gt_importance}, 50));
  CHECK(*two.find("MAP", 50) == doctest::Approx(expected).epsilon(1e-15));

  const auto csv = report.to_csv();
  CHECK(csv.rfind("metric,t,value\nMAP,5,1.000000\n", 0) == 0);

  album.gt_importance.reset();
  CHECK_THROWS_AS(evaluate_curation({{&album, perfect}}, {5}), Error);
}
