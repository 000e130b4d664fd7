#pragma once

#include <Eigen/Dense>

namespace eventcure {

struct PcaTransform {
  Eigen::VectorXd mean;                // length d
  Eigen::MatrixXd basis;               // d x d', orthonormal columns
  Eigen::VectorXd explained_variance;  // length d', non-increasing

  Eigen::Index input_dim() const { return mean.size(); }
  Eigen::Index output_dim() const { return basis.cols(); }
};

/// Fits the top `reduced_dim` principal directions of the rows of `data`
/// (sample covariance, M - 1 denominator). Each column's largest-magnitude
/// entry is made positive so the basis is reproducible.
PcaTransform pca_fit(const Eigen::MatrixXd& data, Eigen::Index reduced_dim);

/// Rows become (x - mean) * basis.
Eigen::MatrixXd pca_apply(const PcaTransform& transform, const Eigen::MatrixXd& features);

}  // namespace eventcure
