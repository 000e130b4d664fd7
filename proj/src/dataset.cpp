#include "eventcure/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "eventcure/error.hpp"

namespace eventcure {

using nlohmann::json;

EventVocabulary::EventVocabulary(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() < 2) {
    throw Error(ErrorKind::ConfigError, "vocabulary needs at least two event types");
  }
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw Error(ErrorKind::ConfigError, "empty event name");
    if (!index_.emplace(names_[i], i).second) {
      throw Error(ErrorKind::ConfigError, "duplicate event name '" + names_[i] + "'");
    }
  }
}

std::size_t EventVocabulary::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error(ErrorKind::UnknownLabel, "'" + name + "' is not in the vocabulary");
  return it->second;
}

void VoteSet::validate() const {
  std::set<std::string> workers;
  for (const auto& vote : votes) {
    if (!workers.insert(vote.worker_id).second) {
      throw Error(ErrorKind::InvalidVoteSet,
                  "worker '" + vote.worker_id + "' votes twice on album '" + album_id + "'");
    }
    if (vote.labels.empty() || vote.labels.size() > 3) {
      throw Error(ErrorKind::InvalidVoteSet, "label set must hold 1 to 3 events");
    }
  }
}

EventLabelDistribution::EventLabelDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw Error(ErrorKind::InvalidDistribution, "empty distribution");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorKind::InvalidDistribution, "entries must be finite and non-negative");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "entries sum to " << sum;
    throw Error(ErrorKind::InvalidDistribution, msg.str());
  }
}

EventLabelDistribution EventLabelDistribution::degenerate(std::size_t classes, std::size_t index) {
  std::vector<double> probs(classes, 0.0);
  probs.at(index) = 1.0;
  return EventLabelDistribution(std::move(probs));
}

std::vector<std::size_t> EventLabelDistribution::support() const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < probs_.size(); ++c) {
    if (probs_[c] > 0.0) out.push_back(c);
  }
  return out;
}

std::size_t EventLabelDistribution::argmax() const {
  return static_cast<std::size_t>(std::max_element(probs_.begin(), probs_.end()) - probs_.begin());
}

const char* to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
  }
  return "train";
}

Split parse_split(const std::string& text) {
  if (text == "train") return Split::Train;
  if (text == "validation") return Split::Validation;
  if (text == "test") return Split::Test;
  throw Error(ErrorKind::ParseError, "unknown split '" + text + "'");
}

void AlbumRecord::validate() const {
  const auto n = image_ids.size();
  if (n == 0) throw Error(ErrorKind::EmptyAlbum, "album '" + album_id + "' has no images");
  if (static_cast<std::size_t>(features.rows()) != n) {
    throw Error(ErrorKind::DimensionMismatch, "album '" + album_id + "' has " +
                                                  std::to_string(features.rows()) + " feature rows for " +
                                                  std::to_string(n) + " images");
  }
  if (gt_importance) {
    if (gt_importance->size() != n) {
      throw Error(ErrorKind::DimensionMismatch, "album '" + album_id + "' gt_importance length mismatch");
    }
    for (double g : *gt_importance) {
      if (!(g >= 0.0 && g <= 1.0)) {
        throw Error(ErrorKind::InvalidInput, "album '" + album_id + "' gt_importance outside [0,1]");
      }
    }
  }
}

bool AlbumRecord::operator==(const AlbumRecord& other) const {
  if (features.rows() != other.features.rows() || features.cols() != other.features.cols()) return false;
  // memcmp semantics: bit-exact, NaN-aware
  const auto bytes = static_cast<std::size_t>(features.size()) * sizeof(float);
  return album_id == other.album_id && image_ids == other.image_ids &&
         (bytes == 0 || std::memcmp(features.data(), other.features.data(), bytes) == 0) &&
         gt_importance == other.gt_importance && label_dist == other.label_dist && split == other.split;
}

void DatasetManifest::validate() const {
  for (const auto& album : albums) {
    album.validate();
    if (static_cast<std::size_t>(album.features.cols()) != feature_dim) {
      throw Error(ErrorKind::DimensionMismatch, "album '" + album.album_id + "' has feature dim " +
                                                    std::to_string(album.features.cols()) + ", manifest says " +
                                                    std::to_string(feature_dim));
    }
    if (album.label_dist.size() != vocabulary.size()) {
      throw Error(ErrorKind::DimensionMismatch,
                  "album '" + album.album_id + "' label distribution length differs from vocabulary");
    }
  }
}

std::vector<const AlbumRecord*> DatasetManifest::split(Split which) const {
  std::vector<const AlbumRecord*> out;
  for (const auto& album : albums) {
    if (album.split == which) out.push_back(&album);
  }
  return out;
}

bool DatasetManifest::operator==(const DatasetManifest& other) const {
  return vocabulary == other.vocabulary && feature_dim == other.feature_dim && albums == other.albums;
}

EventLabelDistribution aggregate_votes(const VoteSet& votes, const EventVocabulary& vocab) {
  votes.validate();
  std::vector<std::size_t> counts(vocab.size(), 0);
  for (const auto& vote : votes.votes) {
    std::set<std::size_t> seen;
    for (const auto& label : vote.labels) {
      const auto c = vocab.index_of(label);
      if (seen.insert(c).second) ++counts[c];
    }
  }
  std::size_t total = 0;
  for (auto& count : counts) {
    if (count == 1) count = 0;
    total += count;
  }
  if (total == 0) {
    throw Error(ErrorKind::NoSurvivingLabel, "every label on album '" + votes.album_id + "' has a single vote");
  }
  std::vector<double> probs(vocab.size());
  for (std::size_t c = 0; c < counts.size(); ++c) {
    probs[c] = static_cast<double>(counts[c]) / static_cast<double>(total);
  }
  return EventLabelDistribution(std::move(probs));
}

std::size_t sample_label(const EventLabelDistribution& dist, Rng& rng) {
  const double u = uniform01(rng);
  double cumulative = 0.0;
  std::size_t last = 0;
  for (std::size_t c = 0; c < dist.size(); ++c) {
    if (dist[c] <= 0.0) continue;
    last = c;
    cumulative += dist[c];
    if (u < cumulative) return c;
  }
  return last;  // rounding slack in the cumulative sum
}

namespace {

// Label -> vote count for the workers in one half.
std::map<std::string, std::size_t> tally(const VoteSet& set, const std::vector<bool>& in_half,
                                         const std::unordered_map<std::string, std::size_t>& worker_index) {
  std::map<std::string, std::size_t> counts;
  for (const auto& vote : set.votes) {
    if (!in_half[worker_index.at(vote.worker_id)]) continue;
    std::set<std::string> seen(vote.labels.begin(), vote.labels.end());
    for (const auto& label : seen) ++counts[label];
  }
  return counts;
}

std::set<std::string> argmax_set(const std::map<std::string, std::size_t>& counts) {
  std::size_t best = 0;
  for (const auto& [label, n] : counts) best = std::max(best, n);
  std::set<std::string> out;
  for (const auto& [label, n] : counts) {
    if (n == best) out.insert(label);
  }
  return out;
}

}  // namespace

double split_half_consistency(const std::vector<VoteSet>& votesets, std::size_t trials, Rng& rng) {
  // Workers are indexed by first appearance, which makes the result
  // independent of how workers are named.
  std::vector<std::string> workers;
  std::unordered_map<std::string, std::size_t> worker_index;
  for (const auto& set : votesets) {
    set.validate();
    for (const auto& vote : set.votes) {
      if (worker_index.emplace(vote.worker_id, workers.size()).second) workers.push_back(vote.worker_id);
    }
  }
  if (workers.empty()) throw Error(ErrorKind::NoWorkers, "no votes were cast");
  if (trials == 0) throw Error(ErrorKind::ConfigError, "trials must be positive");

  std::vector<std::size_t> order(workers.size());
  std::size_t agreeing = 0;
  std::size_t counted = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<bool> first_half(workers.size(), false);
    for (std::size_t i = 0; i < workers.size() / 2; ++i) first_half[order[i]] = true;
    std::vector<bool> second_half(workers.size());
    for (std::size_t i = 0; i < workers.size(); ++i) second_half[i] = !first_half[i];

    for (const auto& set : votesets) {
      const auto a = tally(set, first_half, worker_index);
      const auto b = tally(set, second_half, worker_index);
      if (a.empty() || b.empty()) continue;
      ++counted;
      const auto top_a = argmax_set(a);
      const auto top_b = argmax_set(b);
      const bool agree = std::any_of(top_a.begin(), top_a.end(), [&](const std::string& l) { return top_b.count(l) != 0; });
      if (agree) ++agreeing;
    }
  }
  if (counted == 0) {
    throw Error(ErrorKind::NoOverlap, "no album has votes from both halves of the worker pool");
  }
  return static_cast<double>(agreeing) / static_cast<double>(counted);
}

namespace {

std::string parse_context(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column) + " (byte " + std::to_string(byte) + ")";
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  manifest.validate();
  const auto dir = path.parent_path();
  const auto feature_dir = dir / "features";
  std::filesystem::create_directories(feature_dir);

  json albums = json::array();
  for (std::size_t i = 0; i < manifest.albums.size(); ++i) {
    const auto& album = manifest.albums[i];
    char name[32];
    std::snprintf(name, sizeof(name), "%06zu.evcf", i);
    const auto relative = std::filesystem::path("features") / name;
    write_features(album.features, dir / relative);
    json entry;
    entry["album_id"] = album.album_id;
    entry["image_ids"] = album.image_ids;
    entry["label_dist"] = album.label_dist.probs();
    entry["gt_importance"] = album.gt_importance ? json(*album.gt_importance) : json(nullptr);
    entry["split"] = to_string(album.split);
    entry["features_file"] = relative.generic_string();
    albums.push_back(std::move(entry));
  }
  json doc;
  doc["vocabulary"] = manifest.vocabulary.names();
  doc["feature_dim"] = manifest.feature_dim;
  doc["albums"] = std::move(albums);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << doc.dump(1) << '\n';
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  const auto text = read_text(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + parse_context(text, e.byte) + ": " + e.what());
  }

  DatasetManifest manifest;
  std::size_t album_index = 0;
  try {
    manifest.vocabulary = EventVocabulary(doc.at("vocabulary").get<std::vector<std::string>>());
    manifest.feature_dim = doc.at("feature_dim").get<std::size_t>();
    const auto dir = path.parent_path();
    for (const auto& entry : doc.at("albums")) {
      AlbumRecord album;
      album.album_id = entry.at("album_id").get<std::string>();
      album.image_ids = entry.at("image_ids").get<std::vector<std::string>>();
      album.label_dist = EventLabelDistribution(entry.at("label_dist").get<std::vector<double>>());
      if (!entry.at("gt_importance").is_null()) {
        album.gt_importance = entry.at("gt_importance").get<std::vector<double>>();
      }
      album.split = parse_split(entry.at("split").get<std::string>());
      album.features = read_features(dir / entry.at("features_file").get<std::string>());
      manifest.albums.push_back(std::move(album));
      ++album_index;
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": album entry " + std::to_string(album_index) + ": " + e.what());
  }
  manifest.validate();
  return manifest;
}

}  // namespace eventcure
