#include "eventcure/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "eventcure/error.hpp"
#include "eventcure/metrics.hpp"
#include "eventcure/parallel.hpp"

namespace eventcure {

namespace {

constexpr double kDistributionTolerance = 1e-9;

bool is_distribution(const Eigen::VectorXd& p) {
  return p.size() > 0 && p.allFinite() && (p.array() >= 0.0).all() && std::abs(p.sum() - 1.0) <= kDistributionTolerance;
}

Eigen::VectorXd min_max(const Eigen::VectorXd& raw) {
  const double lo = raw.minCoeff();
  const double hi = raw.maxCoeff();
  if (!(hi > lo)) return Eigen::VectorXd::Ones(raw.size());
  return ((raw.array() - lo) / (hi - lo)).matrix();
}

}  // namespace

void FusionInputs::validate() const {
  if (q.rows() < 1) throw Error(ErrorKind::EmptyAlbum, "fusion needs at least one image");
  if (q.rows() != w.rows() || q.cols() != w.cols() || q.cols() != p_hat.size()) {
    throw Error(ErrorKind::DimensionMismatch, "Q, W and p_hat shapes disagree");
  }
  for (Eigen::Index n = 0; n < q.rows(); ++n) {
    if (!is_distribution(q.row(n).transpose())) {
      throw Error(ErrorKind::InvalidInput, "Q row " + std::to_string(n) + " is not a distribution");
    }
  }
  if (!w.allFinite() || (w.array() < 0.0).any() || (w.array() > 1.0).any()) {
    throw Error(ErrorKind::InvalidInput, "W entries must lie in [0,1]");
  }
  if (!is_distribution(p_hat)) throw Error(ErrorKind::InvalidInput, "p_hat is not a distribution");
}

void FusionConfig::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw Error(ErrorKind::ConfigError, "alpha must be >= 0");
  if (!(mask_fraction >= 0.0 && mask_fraction <= 1.0)) {
    throw Error(ErrorKind::ConfigError, "mask fraction must lie in [0,1]");
  }
  if (max_iters < 1) throw Error(ErrorKind::ConfigError, "max_iters must be at least 1");
  if (!(tol > 0.0)) throw Error(ErrorKind::ConfigError, "tol must be positive");
}

Eigen::VectorXd reweight_event(const Eigen::VectorXd& v, const Eigen::MatrixXd& q, double alpha) {
  if (v.size() != q.rows()) throw Error(ErrorKind::DimensionMismatch, "v length differs from Q rows");
  if ((v.array() < 0.0).any()) throw Error(ErrorKind::InvalidInput, "importance scores must be non-negative");
  Eigen::VectorXd weights(v.size());
  for (Eigen::Index n = 0; n < v.size(); ++n) weights(n) = std::pow(v(n), alpha);  // pow(0, 0) == 1
  if (!(weights.array() > 0.0).any()) {
    throw Error(ErrorKind::AllZeroImportance, "every importance weight is zero");
  }
  Eigen::VectorXd p = q.transpose() * weights;
  return p / p.sum();
}

Eigen::VectorXd combine_with_anchor(const Eigen::VectorXd& p_prime, const Eigen::VectorXd& p_hat) {
  if (p_prime.size() != p_hat.size()) throw Error(ErrorKind::DimensionMismatch, "distributions differ in length");
  return 0.5 * (p_prime + p_hat);
}

Eigen::VectorXd update_importance(const Eigen::MatrixXd& w, const Eigen::VectorXd& p, double mask_fraction) {
  if (w.cols() != p.size()) throw Error(ErrorKind::DimensionMismatch, "W columns differ from p length");
  const double threshold = mask_fraction * p.maxCoeff();
  Eigen::VectorXd kept = p;
  for (Eigen::Index c = 0; c < p.size(); ++c) {
    if (p(c) < threshold) kept(c) = 0.0;
  }
  return min_max(w * kept);
}

FusionResult iterate(const FusionInputs& inputs, const FusionConfig& cfg) {
  inputs.validate();
  cfg.validate();

  Eigen::VectorXd v = Eigen::VectorXd::Ones(inputs.q.rows());
  Eigen::VectorXd p;
  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> recent;

  FusionResult result;
  for (std::size_t step = 1; step <= cfg.max_iters; ++step) {
    const Eigen::VectorXd p_prime = reweight_event(v, inputs.q, cfg.alpha);
    Eigen::VectorXd p_next = cfg.use_anchor ? combine_with_anchor(p_prime, inputs.p_hat) : p_prime;
    Eigen::VectorXd v_next = update_importance(inputs.w, p_next, cfg.mask_fraction);

    double change = (v_next - v).cwiseAbs().maxCoeff();
    if (p.size() > 0) change = std::max(change, (p_next - p).cwiseAbs().maxCoeff());

    p = std::move(p_next);
    v = std::move(v_next);
    recent.emplace_back(p, v);
    if (recent.size() > 3) recent.pop_front();
    result.steps = step;
    if (change < cfg.tol) {
      result.p = p;
      result.v = v;
      result.converged = true;
      return result;
    }
  }

  Eigen::VectorXd p_mean = Eigen::VectorXd::Zero(p.size());
  Eigen::VectorXd v_mean = Eigen::VectorXd::Zero(v.size());
  for (const auto& [rp, rv] : recent) {
    p_mean += rp;
    v_mean += rv;
  }
  v_mean /= static_cast<double>(recent.size());
  result.p = p_mean / p_mean.sum();
  result.v = v_mean.cwiseMax(0.0).cwiseMin(1.0);
  result.converged = false;
  return result;
}

GridSearchResult grid_search(const std::vector<LabeledFusionInputs>& validation, std::vector<double> alpha_grid,
                             std::vector<double> mask_grid, const FusionConfig& base) {
  if (alpha_grid.empty() || mask_grid.empty()) throw Error(ErrorKind::EmptyGrid, "alpha and mask grids must be non-empty");
  if (validation.empty()) throw Error(ErrorKind::EmptySplit, "grid search needs validation albums");
  std::sort(alpha_grid.begin(), alpha_grid.end());
  std::sort(mask_grid.begin(), mask_grid.end());

  GridSearchResult out;
  for (double alpha : alpha_grid) {
    for (double m : mask_grid) out.table.push_back({alpha, m, 0.0});
  }

  std::vector<EventLabelDistribution> labels;
  for (const auto& item : validation) labels.push_back(item.label);
  parallel_for(out.table.size(), [&](std::size_t k) {
    FusionConfig cfg = base;
    cfg.alpha = out.table[k].alpha;
    cfg.mask_fraction = out.table[k].mask_fraction;
    std::vector<Eigen::VectorXd> predictions;
    predictions.reserve(validation.size());
    for (const auto& item : validation) predictions.push_back(iterate(item.inputs, cfg).p);
    out.table[k].accuracy = top1_accuracy(predictions, labels);
  });

  // Strict improvement keeps the earliest (smallest alpha, then m) on ties.
  std::size_t best = 0;
  for (std::size_t k = 1; k < out.table.size(); ++k) {
    if (out.table[k].accuracy > out.table[best].accuracy) best = k;
  }
  out.alpha = out.table[best].alpha;
  out.mask_fraction = out.table[best].mask_fraction;
  return out;
}

nlohmann::json to_json(const std::string& album_id, const FusionResult& result) {
  return {{"album_id", album_id},
          {"p", std::vector<double>(result.p.data(), result.p.data() + result.p.size())},
          {"v", std::vector<double>(result.v.data(), result.v.data() + result.v.size())},
          {"steps", result.steps},
          {"converged", result.converged}};
}

}  // namespace eventcure
