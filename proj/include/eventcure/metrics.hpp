#pragma once

// Curation metrics (MAP@t%, P@t%), recognition metrics (top-1 accuracy and
// macro F1 against multi-label ground truth), and confusion-matrix
// remapping between label sets.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "eventcure/dataset.hpp"

namespace eventcure {

struct CurationEval {
  std::span<const double> predicted;
  std::span<const double> ground_truth;
};

/// Size of the relevant set: max(1, ceil(t/100 * N)).
std::size_t relevant_count(double t_percent, std::size_t n);

/// Indices ordered by descending score, ties to the lower index.
std::vector<std::size_t> rank_descending(std::span<const double> scores);

double precision_at(const CurationEval& e, double t_percent);
double map_at(const CurationEval& e, double t_percent);

/// Largest entry, ties to the lower index.
std::size_t argmax(const Eigen::VectorXd& p);

double top1_accuracy(const std::vector<Eigen::VectorXd>& predictions, const std::vector<EventLabelDistribution>& gts);
double f1_score(const std::vector<Eigen::VectorXd>& predictions, const std::vector<EventLabelDistribution>& gts);

struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<std::uint64_t>> counts;  // rows = true class, columns = predicted

  std::size_t size() const { return counts.size(); }
  std::uint64_t total() const;
  std::uint64_t trace() const;
  void validate() const;
};

struct LabelMapping {
  std::vector<std::string> target_classes;
  std::vector<std::optional<std::size_t>> targets;  // per source class; nullopt = dropped
};

enum class DroppedLabelPolicy {
  /// Predictions of a dropped label count as correct for the row's class.
  AssumeCorrect,
  /// Predictions of a dropped label stay errors.
  CountAsError,
};

struct RemapResult {
  ConfusionMatrix matrix;
  double accuracy = 0.0;
};

/// Rows and columns sharing a target are summed and rows of dropped classes
/// are removed. Throws AllDropped when no source class survives.
RemapResult remap_confusion(const ConfusionMatrix& cm, const LabelMapping& mapping,
                            DroppedLabelPolicy policy = DroppedLabelPolicy::AssumeCorrect);

nlohmann::json to_json(const ConfusionMatrix& cm);
ConfusionMatrix confusion_from_json(const nlohmann::json& doc);
/// {"targets": [...], "mapping": {"source": "target" | null, ...}}
LabelMapping label_mapping_from_json(const nlohmann::json& doc, const std::vector<std::string>& source_classes);

struct ReportCell {
  std::string metric;
  std::optional<double> t;
  double value = 0.0;
};

struct EvaluationReport {
  std::vector<ReportCell> cells;

  /// Header `metric,t,value`, one row per cell, values with 6 decimals.
  std::string to_csv() const;
  std::optional<double> find(const std::string& metric, std::optional<double> t = std::nullopt) const;
};

inline const std::vector<double> kDefaultTList = {5, 10, 15, 20, 25, 30};

struct CuratedAlbum {
  const AlbumRecord* album = nullptr;
  std::vector<double> scores;
};

/// Mean MAP@t and P@t over albums: all MAP cells first, then all P cells.
/// Throws MissingGroundTruth for albums without gt_importance.
EvaluationReport evaluate_curation(const std::vector<CuratedAlbum>& albums, const std::vector<double>& t_list);

}  // namespace eventcure
