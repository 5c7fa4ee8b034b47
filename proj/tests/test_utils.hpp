#ifndef CHOLCOV_TEST_UTILS_HPP
#define CHOLCOV_TEST_UTILS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <random>

// Independent oracles used across test suites. Everything here is computed
// from definitions, without touching the library's solve paths.

namespace testutil {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd random_matrix(int rows, int cols, std::mt19937& gen, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = normal(gen);
  return m;
}

inline MatrixXd random_spd(int n, std::mt19937& gen, double ridge = 0.5) {
  const MatrixXd a = random_matrix(n, n, gen);
  return a * a.transpose() / n + ridge * MatrixXd::Identity(n, n);
}

/// Zero-mean multivariate-t log density with dof nu and scale matrix s:
/// t_nu(y; 0, s). Computed via dense LLT of s.
inline double mvt_logpdf(const VectorXd& y, double nu, const MatrixXd& s) {
  const auto n = static_cast<double>(y.size());
  const Eigen::LLT<MatrixXd> llt(s);
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double quad = y.dot(llt.solve(y));
  return std::lgamma(0.5 * (nu + n)) - std::lgamma(0.5 * nu) -
         0.5 * n * std::log(nu * M_PI) - 0.5 * log_det -
         0.5 * (nu + n) * std::log1p(quad / nu);
}

/// Zero-mean multivariate normal log density.
inline double mvn_logpdf(const VectorXd& y, const MatrixXd& sigma) {
  const auto n = static_cast<double>(y.size());
  const Eigen::LLT<MatrixXd> llt(sigma);
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * (n * std::log(2.0 * M_PI) + log_det + y.dot(llt.solve(y)));
}

/// Inverse-gamma log density IG(x; shape, scale).
inline double ig_logpdf(double x, double shape, double scale) {
  return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) -
         scale / x;
}

/// KL(sigma_hat || sigma_true) for zero-mean Gaussians via eigendecompositions,
/// an algebraic route independent of the Cholesky-based implementation.
inline double kl_eigen_oracle(const MatrixXd& sigma_hat, const MatrixXd& sigma_true) {
  const auto n = sigma_true.rows();
  const Eigen::SelfAdjointEigenSolver<MatrixXd> eig_true(sigma_true);
  const Eigen::SelfAdjointEigenSolver<MatrixXd> eig_hat(sigma_hat);
  const MatrixXd inv_true = eig_true.eigenvectors() *
                            eig_true.eigenvalues().cwiseInverse().asDiagonal() *
                            eig_true.eigenvectors().transpose();
  const double trace = (sigma_hat * inv_true).trace();
  const double log_det_hat = eig_hat.eigenvalues().array().log().sum();
  const double log_det_true = eig_true.eigenvalues().array().log().sum();
  return trace - (log_det_hat - log_det_true) - static_cast<double>(n);
}

}  // namespace testutil

#endif  // CHOLCOV_TEST_UTILS_HPP
