#pragma once

// Joint curation-recognition: alternately re-estimate the album event
// distribution p and the image importance scores v from the three predictor
// outputs.
//
//   p'(k+1) ∝ (v(k)^alpha)^T Q
//   p(k+1)  = (p'(k+1) + p_hat) / 2
//   v(k+1)  ∝ (W ∘ mask(p(k+1) >= m max p(k+1))) p(k+1)^T, min-max scaled to [0,1]

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "eventcure/dataset.hpp"

namespace eventcure {

struct FusionInputs {
  Eigen::MatrixXd q;      // N x C, rows are event distributions
  Eigen::MatrixXd w;      // N x C, event-conditioned importance in [0,1]
  Eigen::VectorXd p_hat;  // C, sequence-level event distribution

  /// Throws InvalidInput / DimensionMismatch when the invariants fail.
  void validate() const;
};

struct FusionConfig {
  double alpha = 1.0;
  double mask_fraction = 0.5;
  std::size_t max_iters = 10;
  double tol = 1e-4;
  /// false drops the anchor step (p = p'), which leaves p_hat unused.
  bool use_anchor = true;

  void validate() const;
};

struct FusionResult {
  Eigen::VectorXd p;
  Eigen::VectorXd v;
  std::size_t steps = 0;
  bool converged = false;
};

/// Throws AllZeroImportance when every v_n^alpha is zero (0^0 is 1).
Eigen::VectorXd reweight_event(const Eigen::VectorXd& v, const Eigen::MatrixXd& q, double alpha);

Eigen::VectorXd combine_with_anchor(const Eigen::VectorXd& p_prime, const Eigen::VectorXd& p_hat);

/// Columns c with p_c < m * max(p) are zeroed before the weighted sum. A
/// constant raw score vector maps to all ones.
Eigen::VectorXd update_importance(const Eigen::MatrixXd& w, const Eigen::VectorXd& p, double mask_fraction);

/// Starts from v = 1 and stops once both p and v move less than tol in the
/// max norm (the first step compares v only). Without convergence after
/// max_iters steps the last three iterates are averaged.
FusionResult iterate(const FusionInputs& inputs, const FusionConfig& cfg);

struct LabeledFusionInputs {
  FusionInputs inputs;
  EventLabelDistribution label;
};

struct GridPoint {
  double alpha = 0.0;
  double mask_fraction = 0.0;
  double accuracy = 0.0;
};

struct GridSearchResult {
  double alpha = 0.0;
  double mask_fraction = 0.0;
  std::vector<GridPoint> table;  // alpha-major, both grids ascending
};

inline const std::vector<double> kDefaultAlphaGrid = {0.5, 1.0, 2.0, 4.0};
inline const std::vector<double> kDefaultMaskGrid = {0.0, 0.25, 0.5, 0.75, 1.0};

/// Scores every (alpha, m) pair by top-1 accuracy of the fused p on the
/// validation albums. Ties go to the smaller alpha, then the smaller m.
GridSearchResult grid_search(const std::vector<LabeledFusionInputs>& validation, std::vector<double> alpha_grid,
                             std::vector<double> mask_grid, const FusionConfig& base);

nlohmann::json to_json(const std::string& album_id, const FusionResult& result);

}  // namespace eventcure
