#pragma once

// Album data model: event vocabularies, worker votes and their aggregation
// into label distributions, and manifest persistence.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "eventcure/random.hpp"

namespace eventcure {

using FeatureMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class EventVocabulary {
 public:
  EventVocabulary() = default;
  /// Requires at least two unique, non-empty names.
  explicit EventVocabulary(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t index) const { return names_.at(index); }
  const std::vector<std::string>& names() const { return names_; }

  /// Throws UnknownLabel for names outside the vocabulary.
  std::size_t index_of(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  bool operator==(const EventVocabulary& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct Vote {
  std::string worker_id;
  std::vector<std::string> labels;  // 1 to 3 event names
};

struct VoteSet {
  std::string album_id;
  std::vector<Vote> votes;

  /// Throws InvalidVoteSet on repeated workers or label sets outside 1..3.
  void validate() const;
};

class EventLabelDistribution {
 public:
  EventLabelDistribution() = default;
  /// Validates non-negativity, sum to 1 within 1e-9 and a non-empty support.
  explicit EventLabelDistribution(std::vector<double> probs);

  static EventLabelDistribution degenerate(std::size_t classes, std::size_t index);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t c) const { return probs_[c]; }
  const std::vector<double>& probs() const { return probs_; }
  std::vector<std::size_t> support() const;
  bool in_support(std::size_t c) const { return c < probs_.size() && probs_[c] > 0.0; }
  /// Largest-mass label; ties go to the lower index.
  std::size_t argmax() const;

  bool operator==(const EventLabelDistribution& other) const { return probs_ == other.probs_; }

 private:
  std::vector<double> probs_;
};

enum class Split { Train, Validation, Test };

const char* to_string(Split split);
Split parse_split(const std::string& text);

struct AlbumRecord {
  std::string album_id;
  std::vector<std::string> image_ids;  // temporal order
  FeatureMatrix features;              // one row per image, same order
  std::optional<std::vector<double>> gt_importance;
  EventLabelDistribution label_dist;
  Split split = Split::Train;

  std::size_t size() const { return image_ids.size(); }
  /// Throws DimensionMismatch / InvalidInput when the record is inconsistent.
  void validate() const;

  bool operator==(const AlbumRecord& other) const;
};

struct DatasetManifest {
  EventVocabulary vocabulary;
  std::size_t feature_dim = 0;
  std::vector<AlbumRecord> albums;

  void validate() const;
  std::vector<const AlbumRecord*> split(Split which) const;

  bool operator==(const DatasetManifest& other) const;
};

/// One vote per selected label; labels with a single vote are dropped and the
/// surviving counts normalized.
EventLabelDistribution aggregate_votes(const VoteSet& votes, const EventVocabulary& vocab);

std::size_t sample_label(const EventLabelDistribution& dist, Rng& rng);

/// Mean fraction of albums whose top-voted labels agree between two random
/// halves of the worker pool. Albums where either half is silent are left
/// out of that trial; two halves agree when their argmax sets intersect.
double split_half_consistency(const std::vector<VoteSet>& votesets, std::size_t trials, Rng& rng);

/// Manifest JSON plus one EVCF feature file per album, stored in a
/// `features/` directory beside the manifest.
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path);

/// EVCF: magic "EVCF", u32 N, u32 d, then N*d little-endian float32, row-major.
void write_features(const FeatureMatrix& features, const std::filesystem::path& path);
FeatureMatrix read_features(const std::filesystem::path& path);

}  // namespace eventcure
