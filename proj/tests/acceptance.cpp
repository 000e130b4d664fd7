// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances and budgets are pinned below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "eventcure/pipeline.hpp"
#include "gradient_suite.hpp"
#include "metric_oracles.hpp"
#include "random_inputs.hpp"

using namespace eventcure;

namespace {

constexpr double kFusionExampleTolerance = 1e-9;
constexpr double kFusionExampleBudgetSeconds = 1.0;
constexpr int kBaselineInputs = 1000;
constexpr double kBaselineTolerance = 1e-12;
constexpr double kGradientTolerance = 1e-4;
constexpr int kGradientPoints = 10;
constexpr double kGradientBudgetSeconds = 10.0;
constexpr int kExperimentSeeds = 20;
constexpr double kFusionGainRequired = 0.02;
constexpr double kExperimentBudgetSeconds = 120.0;
constexpr double kCurationGapRequired = 0.15;
constexpr int kRandomAlbums = 5000;
constexpr std::size_t kRandomAlbumSize = 20;
constexpr double kRandomTolerance = 0.02;
constexpr double kMetricExampleTolerance = 1e-9;
constexpr double kOracleTolerance = 1e-15;  // exact up to the last bits of one division
constexpr int kTerminationInputs = 10000;
constexpr std::size_t kTerminationIters = 10;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& check) {
  Outcome outcome;
  try {
    outcome = check();
  } catch (const std::exception& e) {
    outcome = {false, std::string("exception: ") + e.what()};
  }
  if (!outcome.pass) ++failures;
  std::printf("%s criterion %d: %s (%s)\n", outcome.pass ? "PASS" : "FAIL", id, title.c_str(), outcome.detail.c_str());
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof(buffer), format, args...);
  return buffer;
}

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

double linf(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

Outcome fusion_examples() {
  const auto start = std::chrono::steady_clock::now();
  Eigen::MatrixXd q(2, 2);
  q << 0.8, 0.2, 0.4, 0.6;
  Eigen::MatrixXd w(2, 2);
  w << 0.9, 0.1, 0.2, 0.8;
  double worst = 0.0;
  worst = std::max(worst, linf(reweight_event(vec({1.0, 0.5}), q, 1.0), vec({2.0 / 3.0, 1.0 / 3.0})));
  worst = std::max(worst, linf(combine_with_anchor(vec({0.6, 0.4}), vec({0.2, 0.8})), vec({0.4, 0.6})));
  worst = std::max(worst, linf(update_importance(w, vec({0.75, 0.25}), 0.5), vec({1.0, 0.0})));

  FusionInputs fixed;
  fixed.p_hat = vec({0.5, 0.3, 0.2});
  fixed.q = fixed.p_hat.transpose().replicate(4, 1);
  fixed.w = vec({0.2, 0.9, 0.4}).transpose().replicate(4, 1);
  const auto result = iterate(fixed, FusionConfig{});
  worst = std::max(worst, linf(result.p, fixed.p_hat));
  worst = std::max(worst, linf(result.v, Eigen::VectorXd::Ones(4)));
  const bool fixed_point = result.converged && result.steps == 1;
  const double elapsed = seconds_since(start);
  return {worst <= kFusionExampleTolerance && fixed_point && elapsed < kFusionExampleBudgetSeconds,
          fmt("max error %.2e, fixed point at step %zu, %.3f s", worst, result.steps, elapsed)};
}

Outcome baseline_equivalence() {
  Rng rng(derive_seed(2, "baseline"));
  FusionConfig cfg;
  cfg.alpha = 0.0;
  cfg.mask_fraction = 0.0;
  double worst = 0.0;
  for (int k = 0; k < kBaselineInputs; ++k) {
    const auto in = testing::random_fusion_inputs(rng);
    const Eigen::VectorXd baseline = 0.5 * (in.q.colwise().mean().transpose() + in.p_hat);
    worst = std::max(worst, linf(iterate(in, cfg).p, baseline));
  }
  return {worst < kBaselineTolerance, fmt("%d inputs, max L-inf %.2e", kBaselineInputs, worst)};
}

Outcome gradient_suite() {
  const auto start = std::chrono::steady_clock::now();
  const double ranking = testing::ranking_loss_gradient_error(31, kGradientPoints);
  const double image = std::max(testing::image_model_gradient_error(32, kGradientPoints),
                                testing::image_model_gradient_error(33, kGradientPoints, 0));
  const double lstm = std::max(testing::lstm_step_gradient_error(34, kGradientPoints),
                               testing::sequence_model_gradient_error(35, kGradientPoints));
  const double importance = testing::importance_gradient_error(36, kGradientPoints);
  const double worst = std::max({ranking, image, lstm, importance});
  const double elapsed = seconds_since(start);
  return {worst < kGradientTolerance && elapsed < kGradientBudgetSeconds,
          fmt("ranking %.1e, cross-entropy %.1e, lstm %.1e, importance %.1e, %.2f s", ranking, image, lstm, importance,
              elapsed)};
}

struct ExperimentSummary {
  std::map<Method, double> accuracy;
  std::map<Method, double> map;
  double seconds = 0.0;
};

// Mean top-1 accuracy and MAP (over the default t list) across seeds on the
// default synthetic configuration.
ExperimentSummary run_seeds() {
  const auto start = std::chrono::steady_clock::now();
  ExperimentSummary summary;
  for (int s = 1; s <= kExperimentSeeds; ++s) {
    SynthConfig synth;
    synth.seed = derive_seed(static_cast<std::uint64_t>(s), "synth");
    const auto manifest = generate(synth);
    ExperimentConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(s);
    const auto result = run_experiment(manifest, cfg);
    for (const auto& [method, report] : result.reports) {
      if (const auto acc = report.find("accuracy")) summary.accuracy[method] += *acc / kExperimentSeeds;
      double map = 0.0;
      for (double t : cfg.t_list) {
        if (const auto value = report.find("MAP", t)) map += *value / static_cast<double>(cfg.t_list.size());
      }
      summary.map[method] += map / kExperimentSeeds;
    }
  }
  summary.seconds = seconds_since(start);
  return summary;
}

Outcome fusion_improvement(const ExperimentSummary& s) {
  const double rec = s.accuracy.at(Method::CnnRecognition);
  const double iter = s.accuracy.at(Method::CnnIterative);
  const double full = s.accuracy.at(Method::CnnLstmIterative);
  const bool pass = full >= rec + kFusionGainRequired && iter >= rec && s.seconds < kExperimentBudgetSeconds;
  return {pass, fmt("%d seeds: cnn-recognition %.4f, cnn-lstm %.4f, cnn-iterative %.4f, cnn-lstm-iterative %.4f "
                    "(gain %+.4f, need %+.2f), %.1f s",
                    kExperimentSeeds, rec, s.accuracy.at(Method::CnnLstm), iter, full, full - rec, kFusionGainRequired,
                    s.seconds)};
}

Outcome curation_ordering(const ExperimentSummary& s) {
  const double gt = s.map.at(Method::GtEvent);
  const double full = s.map.at(Method::CnnLstmIterative);
  const double noevent = s.map.at(Method::NoeventTest);
  const double random = s.map.at(Method::Random);
  const bool pass = gt >= full && full >= noevent && noevent >= random && gt - random >= kCurationGapRequired;
  return {pass, fmt("MAP gt-event %.4f, cnn-lstm-iterative %.4f, noevent-test %.4f, random %.4f", gt, full, noevent,
                    random)};
}

Outcome random_calibration() {
  SynthConfig synth;
  synth.events = 5;
  synth.albums_per_event = kRandomAlbums / 5;
  synth.min_album_size = kRandomAlbumSize;
  synth.max_album_size = kRandomAlbumSize;
  synth.seed = derive_seed(6, "synth");
  const auto manifest = generate(synth);
  std::vector<const AlbumRecord*> albums;
  for (const auto& album : manifest.albums) albums.push_back(&album);

  // The random method only reads the album size from its inputs.
  FusionInputs placeholder;
  placeholder.q = Eigen::MatrixXd::Constant(kRandomAlbumSize, 5, 0.2);
  const std::vector<FusionInputs> inputs(albums.size(), placeholder);
  const auto report = evaluate_method(Method::Random, albums, inputs, FusionConfig{}, kDefaultTList, derive_seed(6, "eval"));
  double worst = 0.0;
  std::string cells;
  for (double t : kDefaultTList) {
    const double p = *report.find("P", t);
    worst = std::max(worst, std::abs(p - t / 100.0));
    cells += fmt(" P@%g=%.4f", t, p);
  }
  return {worst <= kRandomTolerance, fmt("%zu albums of %zu images,%s, max deviation %.4f", albums.size(),
                                         kRandomAlbumSize, cells.c_str(), worst)};
}

Outcome metric_oracle() {
  const auto sweep = testing::exhaustive_small_album_sweep();

  const auto one_hot = [](Eigen::Index k) {
    Eigen::VectorXd p = Eigen::VectorXd::Constant(2, 0.1);
    p(k) = 0.9;
    return p;
  };
  const auto a = EventLabelDistribution::degenerate(2, 0);
  const auto b = EventLabelDistribution::degenerate(2, 1);
  const double f1 = f1_score({one_hot(0), one_hot(1), one_hot(1), one_hot(1)}, {a, a, b, b});
  const double f1_error = std::abs(f1 - (2.0 / 3.0 + 0.8) / 2.0);

  ConfusionMatrix cm;
  cm.classes = {"A", "B", "C"};
  cm.counts = {{8, 1, 1}, {0, 9, 1}, {2, 0, 8}};
  const auto remapped = remap_confusion(cm, LabelMapping{{"M"}, {0, 0, std::nullopt}});
  const bool merged = remapped.matrix.counts == std::vector<std::vector<std::uint64_t>>{{20}};
  const double remap_error = std::abs(remapped.accuracy - 1.0);

  const bool pass = sweep.worst_map <= kOracleTolerance && sweep.worst_precision == 0.0 &&
                    f1_error <= kMetricExampleTolerance && merged && remap_error <= kMetricExampleTolerance;
  return {pass, fmt("%zu small-album cases, AP deviation %.1e, F1 error %.1e, remap error %.1e", sweep.cases,
                    sweep.worst_map, f1_error, remap_error)};
}

Outcome termination() {
  Rng rng(derive_seed(8, "termination"));
  std::size_t violations = 0, converged = 0, max_steps = 0;
  for (int k = 0; k < kTerminationInputs; ++k) {
    const auto in = testing::random_fusion_inputs(rng);
    auto cfg = testing::random_fusion_config(rng);
    cfg.max_iters = kTerminationIters;
    const auto r = iterate(in, cfg);
    max_steps = std::max(max_steps, r.steps);
    converged += r.converged;
    const bool ok = r.steps >= 1 && r.steps <= kTerminationIters && std::abs(r.p.sum() - 1.0) <= 1e-9 &&
                    r.p.minCoeff() >= 0.0 && r.v.minCoeff() >= 0.0 && r.v.maxCoeff() <= 1.0 &&
                    r.p.size() == in.q.cols() && r.v.size() == in.q.rows();
    violations += !ok;
  }
  return {violations == 0, fmt("%d inputs, %zu violations, max steps %zu, %zu converged", kTerminationInputs,
                               violations, max_steps, converged)};
}

std::string file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "eventcure_acceptance";
  std::filesystem::create_directories(dir);
  std::vector<std::string> reports;
  for (int run = 0; run < 2; ++run) {
    SynthConfig synth;
    synth.seed = derive_seed(9, "synth");
    const auto manifest = generate(synth);
    ExperimentConfig cfg;
    cfg.seed = 9;
    const auto result = run_experiment(manifest, cfg);
    const auto path = dir / ("report_" + std::to_string(run) + ".csv");
    std::ofstream(path, std::ios::binary) << experiment_csv(result) << grid_csv(result.full_grid)
                                          << grid_csv(result.no_anchor_grid);
    reports.push_back(file_bytes(path));
  }
  const bool same = reports[0] == reports[1] && !reports[0].empty();
  return {same, fmt("%zu bytes per report, %s", reports[0].size(), same ? "identical" : "different")};
}

}  // namespace

int main() {
  report(1, "fusion equations match hand-computed examples", fusion_examples);
  report(2, "alpha = 0, m = 0 reproduces the averaging baseline", baseline_equivalence);
  report(3, "analytic gradients match finite differences", gradient_suite);
  const auto summary = run_seeds();
  report(4, "fusion improves top-1 accuracy over cnn-recognition", [&] { return fusion_improvement(summary); });
  report(5, "curation MAP ordering", [&] { return curation_ordering(summary); });
  report(6, "random curation precision tracks t/100", random_calibration);
  report(7, "metrics match exhaustive and hand-computed oracles", metric_oracle);
  report(8, "iterate terminates with valid outputs", termination);
  report(9, "pipeline runs are byte-for-byte reproducible", determinism);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
