#pragma once

// Synthetic albums with known generative ground truth, plus a worker-vote
// simulator. Each event owns a unit prototype direction and an importance
// profile u^gamma; image features are importance-scaled prototypes plus
// isotropic noise, and outlier images borrow another event's prototype with
// low importance.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "eventcure/dataset.hpp"
#include "eventcure/random.hpp"

namespace eventcure {

struct SynthConfig {
  std::size_t events = 6;
  std::size_t albums_per_event = 40;
  std::size_t min_album_size = 8;
  std::size_t max_album_size = 20;
  std::size_t feature_dim = 24;
  double importance_noise = 0.1;
  double feature_noise = 0.3;
  double outlier_rate = 0.15;
  double ambiguity = 0.2;
  std::size_t workers = 12;
  std::uint64_t seed = 1;

  /// Throws ConfigError on out-of-range fields.
  void validate() const;
};

/// Missing keys keep their defaults.
SynthConfig synth_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const SynthConfig& cfg);

struct GenerativeGroundTruth {
  Eigen::MatrixXd prototypes;  // C x d, unit rows
  std::vector<double> gammas;  // profile exponent per event

  double profile(std::size_t event, double u) const;
};

struct SyntheticDataset {
  DatasetManifest manifest;
  GenerativeGroundTruth truth;
  std::vector<std::vector<std::size_t>> image_events;  // per album, per image
  std::vector<std::vector<bool>> outliers;
};

/// Largest |cos| allowed between two prototypes.
inline constexpr double kMaxPrototypeCosine = 0.5;

GenerativeGroundTruth make_ground_truth(const SynthConfig& cfg);
SyntheticDataset generate_dataset(const SynthConfig& cfg);
DatasetManifest generate(const SynthConfig& cfg);

/// Each worker votes the argmax label with probability 0.8 and otherwise
/// samples `dist`; a second label (the most likely other label) is added with
/// probability equal to the second-largest mass.
VoteSet simulate_votes(const std::string& album_id, const EventLabelDistribution& dist, const EventVocabulary& vocab,
                       std::size_t workers, Rng& rng);

}  // namespace eventcure
