#include "eventcure/pca.hpp"

#include <string>

#include "eventcure/error.hpp"

namespace eventcure {

PcaTransform pca_fit(const Eigen::MatrixXd& data, Eigen::Index reduced_dim) {
  const Eigen::Index rows = data.rows();
  const Eigen::Index dim = data.cols();
  if (reduced_dim < 1 || reduced_dim > dim || rows < reduced_dim || rows < 2) {
    throw Error(ErrorKind::ConfigError, "pca_fit needs rows >= reduced_dim >= 1 and reduced_dim <= " +
                                            std::to_string(dim) + " (got " + std::to_string(rows) + " rows, d' = " +
                                            std::to_string(reduced_dim) + ")");
  }
  PcaTransform t;
  t.mean = data.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.rowwise() - t.mean.transpose();
  const Eigen::MatrixXd covariance = (centered.transpose() * centered) / static_cast<double>(rows - 1);
  if (covariance.trace() <= 0.0) {
    throw Error(ErrorKind::DegenerateCovariance, "all rows are identical");
  }

  // Eigenvalues come back ascending.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(covariance);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::DegenerateCovariance, "covariance eigendecomposition failed");
  }
  t.basis.resize(dim, reduced_dim);
  t.explained_variance.resize(reduced_dim);
  for (Eigen::Index k = 0; k < reduced_dim; ++k) {
    const Eigen::Index src = dim - 1 - k;
    Eigen::VectorXd column = solver.eigenvectors().col(src);
    Eigen::Index pivot = 0;
    column.cwiseAbs().maxCoeff(&pivot);
    if (column(pivot) < 0.0) column = -column;
    t.basis.col(k) = column;
    t.explained_variance(k) = std::max(0.0, solver.eigenvalues()(src));
  }
  return t;
}

Eigen::MatrixXd pca_apply(const PcaTransform& transform, const Eigen::MatrixXd& features) {
  if (features.cols() != transform.input_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "features have " + std::to_string(features.cols()) +
                                                  " columns, transform expects " +
                                                  std::to_string(transform.input_dim()));
  }
  return (features.rowwise() - transform.mean.transpose()) * transform.basis;
}

}  // namespace eventcure
