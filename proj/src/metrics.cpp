#include "eventcure/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "eventcure/error.hpp"

namespace eventcure {

using nlohmann::json;

namespace {

void check_curation(const CurationEval& e, double t_percent) {
  if (e.predicted.empty()) throw Error(ErrorKind::EmptyAlbum, "curation metrics need at least one image");
  if (e.predicted.size() != e.ground_truth.size()) {
    throw Error(ErrorKind::LengthMismatch, "predicted and ground-truth lengths differ");
  }
  if (!(t_percent > 0.0 && t_percent <= 100.0)) throw Error(ErrorKind::InvalidInput, "t must lie in (0, 100]");
}

void check_recognition(const std::vector<Eigen::VectorXd>& predictions, const std::vector<EventLabelDistribution>& gts) {
  if (predictions.size() != gts.size()) throw Error(ErrorKind::LengthMismatch, "prediction and label counts differ");
  if (predictions.empty()) throw Error(ErrorKind::LengthMismatch, "no albums to evaluate");
  for (std::size_t a = 0; a < predictions.size(); ++a) {
    if (static_cast<std::size_t>(predictions[a].size()) != gts[a].size()) {
      throw Error(ErrorKind::DimensionMismatch, "prediction length differs from label length");
    }
  }
}

}  // namespace

std::size_t relevant_count(double t_percent, std::size_t n) {
  // The small slack keeps exact products such as 20% of 10 at 2.
  const double k = std::ceil(t_percent * static_cast<double>(n) / 100.0 - 1e-9);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::max(0.0, k)));
}

std::vector<std::size_t> rank_descending(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

double precision_at(const CurationEval& e, double t_percent) {
  check_curation(e, t_percent);
  const std::size_t k = relevant_count(t_percent, e.predicted.size());
  const auto by_truth = rank_descending(e.ground_truth);
  const auto by_prediction = rank_descending(e.predicted);
  const std::set<std::size_t> relevant(by_truth.begin(), by_truth.begin() + static_cast<std::ptrdiff_t>(k));
  std::size_t hits = 0;
  for (std::size_t r = 0; r < k; ++r) hits += relevant.count(by_prediction[r]);
  return static_cast<double>(hits) / static_cast<double>(k);
}

double map_at(const CurationEval& e, double t_percent) {
  check_curation(e, t_percent);
  const std::size_t k = relevant_count(t_percent, e.predicted.size());
  const auto by_truth = rank_descending(e.ground_truth);
  const auto by_prediction = rank_descending(e.predicted);
  const std::set<std::size_t> relevant(by_truth.begin(), by_truth.begin() + static_cast<std::ptrdiff_t>(k));
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < by_prediction.size() && hits < k; ++r) {
    if (relevant.count(by_prediction[r])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
  }
  return sum / static_cast<double>(k);
}

std::size_t argmax(const Eigen::VectorXd& p) {
  std::size_t best = 0;
  for (Eigen::Index c = 1; c < p.size(); ++c) {
    if (p(c) > p(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(c);
  }
  return best;
}

double top1_accuracy(const std::vector<Eigen::VectorXd>& predictions, const std::vector<EventLabelDistribution>& gts) {
  check_recognition(predictions, gts);
  std::size_t correct = 0;
  for (std::size_t a = 0; a < predictions.size(); ++a) correct += gts[a].in_support(argmax(predictions[a]));
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

double f1_score(const std::vector<Eigen::VectorXd>& predictions, const std::vector<EventLabelDistribution>& gts) {
  check_recognition(predictions, gts);
  const std::size_t classes = gts.front().size();
  std::vector<std::size_t> tp(classes, 0), fp(classes, 0), fn(classes, 0);
  std::vector<bool> present(classes, false);
  for (std::size_t a = 0; a < predictions.size(); ++a) {
    const std::size_t top = argmax(predictions[a]);
    const bool correct = gts[a].in_support(top);
    if (correct) {
      ++tp[top];
    } else {
      ++fp[top];
    }
    for (std::size_t c : gts[a].support()) {
      present[c] = true;
      // A correct prediction of another supported label is not a miss.
      if (!correct) ++fn[c];
    }
  }
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    if (!present[c]) continue;
    ++counted;
    const double precision = tp[c] + fp[c] ? static_cast<double>(tp[c]) / static_cast<double>(tp[c] + fp[c]) : 0.0;
    const double recall = tp[c] + fn[c] ? static_cast<double>(tp[c]) / static_cast<double>(tp[c] + fn[c]) : 0.0;
    if (precision + recall > 0.0) sum += 2.0 * precision * recall / (precision + recall);
  }
  return sum / static_cast<double>(counted);
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t sum = 0;
  for (const auto& row : counts) sum = std::accumulate(row.begin(), row.end(), sum);
  return sum;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) sum += counts[i][i];
  return sum;
}

void ConfusionMatrix::validate() const {
  for (const auto& row : counts) {
    if (row.size() != counts.size()) throw Error(ErrorKind::DimensionMismatch, "confusion matrix must be square");
  }
  if (!classes.empty() && classes.size() != counts.size()) {
    throw Error(ErrorKind::DimensionMismatch, "class-name list length differs from matrix size");
  }
}

RemapResult remap_confusion(const ConfusionMatrix& cm, const LabelMapping& mapping, DroppedLabelPolicy policy) {
  cm.validate();
  if (mapping.targets.size() != cm.size()) {
    throw Error(ErrorKind::DimensionMismatch, "mapping must cover every source class");
  }
  const std::size_t target_count = mapping.target_classes.size();
  bool any_kept = false;
  for (const auto& t : mapping.targets) {
    if (!t) continue;
    if (*t >= target_count) throw Error(ErrorKind::InvalidInput, "mapping target index out of range");
    any_kept = true;
  }
  if (!any_kept) throw Error(ErrorKind::AllDropped, "every source class is dropped");

  RemapResult out;
  out.matrix.classes = mapping.target_classes;
  out.matrix.counts.assign(target_count, std::vector<std::uint64_t>(target_count, 0));
  std::uint64_t lost = 0;
  for (std::size_t i = 0; i < cm.size(); ++i) {
    const auto row_target = mapping.targets[i];
    if (!row_target) continue;
    for (std::size_t j = 0; j < cm.size(); ++j) {
      const auto count = cm.counts[i][j];
      if (const auto column_target = mapping.targets[j]) {
        out.matrix.counts[*row_target][*column_target] += count;
      } else if (policy == DroppedLabelPolicy::AssumeCorrect) {
        out.matrix.counts[*row_target][*row_target] += count;
      } else {
        lost += count;
      }
    }
  }
  const auto total = out.matrix.total() + lost;
  if (total == 0) throw Error(ErrorKind::InvalidInput, "no test items remain after remapping");
  out.accuracy = static_cast<double>(out.matrix.trace()) / static_cast<double>(total);
  return out;
}

json to_json(const ConfusionMatrix& cm) { return {{"classes", cm.classes}, {"counts", cm.counts}}; }

ConfusionMatrix confusion_from_json(const json& doc) {
  ConfusionMatrix cm;
  try {
    cm.classes = doc.at("classes").get<std::vector<std::string>>();
    cm.counts = doc.at("counts").get<std::vector<std::vector<std::uint64_t>>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("confusion matrix: ") + e.what());
  }
  cm.validate();
  return cm;
}

LabelMapping label_mapping_from_json(const json& doc, const std::vector<std::string>& source_classes) {
  LabelMapping mapping;
  try {
    mapping.target_classes = doc.at("targets").get<std::vector<std::string>>();
    const auto& table = doc.at("mapping");
    for (const auto& source : source_classes) {
      if (!table.contains(source)) {
        throw Error(ErrorKind::InvalidInput, "mapping has no entry for source class '" + source + "'");
      }
      const auto& entry = table.at(source);
      if (entry.is_null()) {
        mapping.targets.emplace_back(std::nullopt);
        continue;
      }
      const auto name = entry.get<std::string>();
      const auto it = std::find(mapping.target_classes.begin(), mapping.target_classes.end(), name);
      if (it == mapping.target_classes.end()) throw Error(ErrorKind::UnknownLabel, "unknown target class '" + name + "'");
      mapping.targets.emplace_back(static_cast<std::size_t>(it - mapping.target_classes.begin()));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("label mapping: ") + e.what());
  }
  return mapping;
}

std::string EvaluationReport::to_csv() const {
  std::string out = "metric,t,value\n";
  char buffer[64];
  for (const auto& cell : cells) {
    out += cell.metric;
    out += ',';
    if (cell.t) {
      std::snprintf(buffer, sizeof(buffer), "%g", *cell.t);
      out += buffer;
    }
    std::snprintf(buffer, sizeof(buffer), ",%.6f\n", cell.value);
    out += buffer;
  }
  return out;
}

std::optional<double> EvaluationReport::find(const std::string& metric, std::optional<double> t) const {
  for (const auto& cell : cells) {
    if (cell.metric == metric && cell.t == t) return cell.value;
  }
  return std::nullopt;
}

EvaluationReport evaluate_curation(const std::vector<CuratedAlbum>& albums, const std::vector<double>& t_list) {
  if (albums.empty()) throw Error(ErrorKind::EmptySplit, "no albums to evaluate");
  if (t_list.empty()) throw Error(ErrorKind::ConfigError, "t list is empty");
  std::vector<double> map_sum(t_list.size(), 0.0), p_sum(t_list.size(), 0.0);
  for (const auto& curated : albums) {
    const auto& album = *curated.album;
    if (!album.gt_importance) {
      throw Error(ErrorKind::MissingGroundTruth, "album '" + album.album_id + "' has no gt_importance");
    }
    const CurationEval e{curated.scores, *album.gt_importance};
    for (std::size_t k = 0; k < t_list.size(); ++k) {
      map_sum[k] += map_at(e, t_list[k]);
      p_sum[k] += precision_at(e, t_list[k]);
    }
  }
  EvaluationReport report;
  const auto count = static_cast<double>(albums.size());
  for (std::size_t k = 0; k < t_list.size(); ++k) report.cells.push_back({"MAP", t_list[k], map_sum[k] / count});
  for (std::size_t k = 0; k < t_list.size(); ++k) report.cells.push_back({"P", t_list[k], p_sum[k] / count});
  return report;
}

}  // namespace eventcure
