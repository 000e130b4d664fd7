#include "eventcure/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "eventcure/error.hpp"

namespace eventcure {

using nlohmann::json;

namespace {

constexpr double kPrimaryMass = 0.7;
constexpr double kOutlierCeiling = 0.2;
constexpr double kArgmaxVoteRate = 0.8;
constexpr int kPrototypeAttempts = 10000;
constexpr double kGammaCycle[] = {0.5, 1.0, 2.0};

std::string padded(const char* prefix, std::size_t value, int width) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%s%0*zu", prefix, width, value);
  return buffer;
}

bool in_unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

// Uniform over [0, count) without `excluded`.
std::size_t uniform_other(std::size_t count, std::size_t excluded, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, count - 2);
  const auto k = pick(rng);
  return k >= excluded ? k + 1 : k;
}

}  // namespace

void SynthConfig::validate() const {
  if (events < 2) throw Error(ErrorKind::ConfigError, "need at least two events");
  if (albums_per_event < 1) throw Error(ErrorKind::ConfigError, "albums_per_event must be positive");
  if (min_album_size < 1 || min_album_size > max_album_size) {
    throw Error(ErrorKind::ConfigError, "album size range must satisfy 1 <= min <= max");
  }
  if (feature_dim < 1) throw Error(ErrorKind::ConfigError, "feature_dim must be positive");
  if (!(importance_noise >= 0.0) || !(feature_noise >= 0.0)) {
    throw Error(ErrorKind::ConfigError, "noise levels must be non-negative");
  }
  if (!in_unit_interval(outlier_rate) || !in_unit_interval(ambiguity)) {
    throw Error(ErrorKind::ConfigError, "outlier_rate and ambiguity must lie in [0,1]");
  }
  if (workers < 1) throw Error(ErrorKind::ConfigError, "workers must be positive");
}

SynthConfig synth_config_from_json(const json& doc) {
  SynthConfig cfg;
  try {
    cfg.events = doc.value("events", cfg.events);
    cfg.albums_per_event = doc.value("albums_per_event", cfg.albums_per_event);
    if (doc.contains("album_size")) {
      const auto range = doc.at("album_size").get<std::vector<std::size_t>>();
      if (range.size() != 2) throw Error(ErrorKind::ConfigError, "album_size must be [min, max]");
      cfg.min_album_size = range[0];
      cfg.max_album_size = range[1];
    }
    cfg.feature_dim = doc.value("feature_dim", cfg.feature_dim);
    cfg.importance_noise = doc.value("importance_noise", cfg.importance_noise);
    cfg.feature_noise = doc.value("feature_noise", cfg.feature_noise);
    cfg.outlier_rate = doc.value("outlier_rate", cfg.outlier_rate);
    cfg.ambiguity = doc.value("ambiguity", cfg.ambiguity);
    cfg.workers = doc.value("workers", cfg.workers);
    cfg.seed = doc.value("seed", cfg.seed);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("synth config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

json to_json(const SynthConfig& cfg) {
  return {{"events", cfg.events},
          {"albums_per_event", cfg.albums_per_event},
          {"album_size", {cfg.min_album_size, cfg.max_album_size}},
          {"feature_dim", cfg.feature_dim},
          {"importance_noise", cfg.importance_noise},
          {"feature_noise", cfg.feature_noise},
          {"outlier_rate", cfg.outlier_rate},
          {"ambiguity", cfg.ambiguity},
          {"workers", cfg.workers},
          {"seed", cfg.seed}};
}

double GenerativeGroundTruth::profile(std::size_t event, double u) const { return std::pow(u, gammas.at(event)); }

GenerativeGroundTruth make_ground_truth(const SynthConfig& cfg) {
  cfg.validate();
  const auto C = static_cast<Eigen::Index>(cfg.events);
  const auto d = static_cast<Eigen::Index>(cfg.feature_dim);
  Rng rng(derive_seed(cfg.seed, "prototypes"));
  GenerativeGroundTruth truth;
  truth.prototypes.resize(C, d);
  for (Eigen::Index c = 0; c < C; ++c) {
    bool placed = false;
    for (int attempt = 0; attempt < kPrototypeAttempts && !placed; ++attempt) {
      Eigen::VectorXd candidate(d);
      for (Eigen::Index k = 0; k < d; ++k) candidate(k) = normal(rng, 1.0);
      const double norm = candidate.norm();
      if (norm == 0.0) continue;
      candidate /= norm;
      placed = true;
      for (Eigen::Index prev = 0; prev < c; ++prev) {
        if (std::abs(truth.prototypes.row(prev).dot(candidate)) > kMaxPrototypeCosine) {
          placed = false;
          break;
        }
      }
      if (placed) truth.prototypes.row(c) = candidate.transpose();
    }
    if (!placed) {
      throw Error(ErrorKind::ConfigError, "cannot place " + std::to_string(C) + " well-separated prototypes in " +
                                              std::to_string(d) + " dimensions");
    }
    truth.gammas.push_back(kGammaCycle[static_cast<std::size_t>(c) % 3]);
  }
  return truth;
}

SyntheticDataset generate_dataset(const SynthConfig& cfg) {
  SyntheticDataset out;
  out.truth = make_ground_truth(cfg);
  const std::size_t C = cfg.events;
  const auto d = static_cast<Eigen::Index>(cfg.feature_dim);

  std::vector<std::string> names;
  for (std::size_t c = 0; c < C; ++c) names.push_back(padded("event_", c, 2));
  out.manifest.vocabulary = EventVocabulary(names);
  out.manifest.feature_dim = cfg.feature_dim;

  const std::size_t total = C * cfg.albums_per_event;
  const auto album_root = derive_seed(cfg.seed, "albums");
  for (std::size_t a = 0; a < total; ++a) {
    Rng rng(derive_seed(album_root, static_cast<std::uint64_t>(a)));
    const std::size_t primary = a / cfg.albums_per_event;

    AlbumRecord album;
    album.album_id = padded("album_", a, 5);
    if (uniform01(rng) < cfg.ambiguity) {
      const std::size_t secondary = uniform_other(C, primary, rng);
      std::vector<double> probs(C, 0.0);
      probs[primary] = kPrimaryMass;
      probs[secondary] = 1.0 - kPrimaryMass;
      album.label_dist = EventLabelDistribution(std::move(probs));
    } else {
      album.label_dist = EventLabelDistribution::degenerate(C, primary);
    }

    std::uniform_int_distribution<std::size_t> size_pick(cfg.min_album_size, cfg.max_album_size);
    const std::size_t n = size_pick(rng);
    album.features.resize(static_cast<Eigen::Index>(n), d);
    std::vector<double> importance(n);
    std::vector<std::size_t> events(n);
    std::vector<bool> outlier(n);
    for (std::size_t i = 0; i < n; ++i) {
      album.image_ids.push_back(album.album_id + padded("_img", i, 3));
      outlier[i] = uniform01(rng) < cfg.outlier_rate;
      events[i] = outlier[i] ? uniform_other(C, primary, rng) : primary;
      const double u = uniform01(rng);
      double g = std::clamp(out.truth.profile(primary, u) + normal(rng, cfg.importance_noise), 0.0, 1.0);
      if (outlier[i]) g = std::min(g, kOutlierCeiling);
      importance[i] = g;
      for (Eigen::Index k = 0; k < d; ++k) {
        const double value = g * out.truth.prototypes(static_cast<Eigen::Index>(events[i]), k) +
                             normal(rng, cfg.feature_noise);
        album.features(static_cast<Eigen::Index>(i), k) = static_cast<float>(value);
      }
    }
    album.gt_importance = std::move(importance);
    out.manifest.albums.push_back(std::move(album));
    out.image_events.push_back(std::move(events));
    out.outliers.push_back(std::move(outlier));
  }

  // 4:1:1 train/validation/test over a seeded permutation.
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng split_rng(derive_seed(cfg.seed, "splits"));
  std::shuffle(order.begin(), order.end(), split_rng);
  const std::size_t n_train = (total * 4 + 3) / 6;
  const std::size_t n_validation = (total + 3) / 6;
  for (std::size_t r = 0; r < total; ++r) {
    auto& album = out.manifest.albums[order[r]];
    album.split = r < n_train ? Split::Train : (r < n_train + n_validation ? Split::Validation : Split::Test);
  }
  out.manifest.validate();
  return out;
}

DatasetManifest generate(const SynthConfig& cfg) { return generate_dataset(cfg).manifest; }

VoteSet simulate_votes(const std::string& album_id, const EventLabelDistribution& dist, const EventVocabulary& vocab,
                       std::size_t workers, Rng& rng) {
  if (workers < 1) throw Error(ErrorKind::ConfigError, "workers must be positive");
  if (dist.size() != vocab.size()) throw Error(ErrorKind::DimensionMismatch, "distribution length differs from vocabulary");

  std::vector<std::size_t> by_mass(dist.size());
  std::iota(by_mass.begin(), by_mass.end(), std::size_t{0});
  std::stable_sort(by_mass.begin(), by_mass.end(), [&](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });
  const double second_mass = dist[by_mass[1]];

  VoteSet set;
  set.album_id = album_id;
  for (std::size_t w = 0; w < workers; ++w) {
    Vote vote;
    vote.worker_id = padded("worker_", w, 3);
    const std::size_t first = uniform01(rng) < kArgmaxVoteRate ? dist.argmax() : sample_label(dist, rng);
    vote.labels.push_back(vocab.name(first));
    if (uniform01(rng) < second_mass) {
      const std::size_t other = by_mass[0] == first ? by_mass[1] : by_mass[0];
      vote.labels.push_back(vocab.name(other));
    }
    set.votes.push_back(std::move(vote));
  }
  return set;
}

}  // namespace eventcure
