#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "eventcure/error.hpp"
#include "eventcure/pca.hpp"
#include "eventcure/random.hpp"

using namespace eventcure;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng, 1.0) * (1.0 + 0.5 * static_cast<double>(j));
  }
  return m;
}

// Cyclic Jacobi rotations on a symmetric matrix; returns eigenvalues sorted
// descending. Written with plain loops so it shares nothing with the library.
std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (off < 1e-26) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> values(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(values.rbegin(), values.rend());
  return values;
}

Eigen::MatrixXd covariance_by_loops(const Eigen::MatrixXd& data) {
  const Eigen::Index m = data.rows(), d = data.cols();
  std::vector<double> mean(static_cast<std::size_t>(d), 0.0);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) mean[static_cast<std::size_t>(j)] += data(i, j) / static_cast<double>(m);
  }
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = 0; b < d; ++b) {
        cov(a, b) += (data(i, a) - mean[static_cast<std::size_t>(a)]) * (data(i, b) - mean[static_cast<std::size_t>(b)]);
      }
    }
  }
  return cov / static_cast<double>(m - 1);
}

}  // namespace

TEST_CASE("explained variance matches a Jacobi eigenvalue oracle") {
  Rng rng(3);
  const Eigen::MatrixXd data = random_matrix(60, 6, rng);
  const auto pca = pca_fit(data, 4);
  const auto oracle = jacobi_eigenvalues(covariance_by_loops(data));
  REQUIRE(pca.explained_variance.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(pca.explained_variance(k) == doctest::Approx(oracle[k]).epsilon(1e-9));
}

TEST_CASE("basis is orthonormal, variance non-increasing, signs canonical") {
  Rng rng(5);
  const auto pca = pca_fit(random_matrix(40, 7, rng), 5);
  const Eigen::MatrixXd gram = pca.basis.transpose() * pca.basis;
  CHECK((gram - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
  for (Eigen::Index k = 1; k < 5; ++k) CHECK(pca.explained_variance(k) <= pca.explained_variance(k - 1));
  for (Eigen::Index k = 0; k < 5; ++k) {
    Eigen::Index at;
    pca.basis.col(k).cwiseAbs().maxCoeff(&at);
    CHECK(pca.basis(at, k) > 0.0);
  }
}

TEST_CASE("projected coordinates have the explained variances") {
  Rng rng(8);
  const Eigen::MatrixXd data = random_matrix(80, 5, rng);
  const auto pca = pca_fit(data, 3);
  const Eigen::MatrixXd y = pca_apply(pca, data);
  for (Eigen::Index k = 0; k < 3; ++k) {
    CHECK(std::abs(y.col(k).mean()) < 1e-12);
    CHECK(y.col(k).squaredNorm() / 79.0 == doctest::Approx(pca.explained_variance(k)).epsilon(1e-10));
  }
}

TEST_CASE("pca_apply examples") {
  Rng rng(9);
  const auto pca = pca_fit(random_matrix(30, 4, rng), 3);
  CHECK(pca_apply(pca, pca.mean.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  for (Eigen::Index j = 0; j < 3; ++j) {
    const Eigen::RowVectorXd row = (pca.mean + pca.basis.col(j)).transpose();
    Eigen::RowVectorXd expected = Eigen::RowVectorXd::Zero(3);
    expected(j) = 1.0;
    CHECK((pca_apply(pca, row) - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
  const Eigen::MatrixXd two = random_matrix(2, 4, rng);
  Eigen::MatrixXd separate(2, 3);
  separate.row(0) = pca_apply(pca, two.row(0));
  separate.row(1) = pca_apply(pca, two.row(1));
  CHECK((pca_apply(pca, two) - separate).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(pca_apply(pca, Eigen::MatrixXd::Zero(1, 5)), Error);
}

TEST_CASE("full-dimension projection preserves pairwise distances") {
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd data = random_matrix(25, 6, rng);
    const auto pca = pca_fit(data, 6);
    const Eigen::MatrixXd y = pca_apply(pca, data);
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < data.rows(); ++j) {
        CHECK(std::abs((y.row(i) - y.row(j)).norm() - (data.row(i) - data.row(j)).norm()) < 1e-6);
      }
    }
  }
}

TEST_CASE("pca_fit rejects bad requests") {
  Rng rng(1);
  const Eigen::MatrixXd data = random_matrix(10, 3, rng);
  CHECK_THROWS_AS(pca_fit(data, 4), Error);
  CHECK_THROWS_AS(pca_fit(data, 0), Error);
  CHECK_THROWS_AS(pca_fit(data.topRows(1), 2), Error);
}
