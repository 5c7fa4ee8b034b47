#ifndef CHOLCOV_PRIOR_HPP
#define CHOLCOV_PRIOR_HPP

#include <Eigen/Dense>

#include "cholcov/errors.hpp"

namespace cholcov {

/// theta = (theta1, theta2, theta3), all strictly positive. theta1 scales the
/// marginal variance; theta2 and theta3 drive the decay of the conditional
/// variances and of the Cholesky entries. Stored on the log scale, which is
/// also the scale all inference works on.
class Hyperparameters {
 public:
  Hyperparameters(double theta1, double theta2, double theta3);
  static Hyperparameters from_log(const Eigen::Vector3d& log_theta);

  double theta1() const { return std::exp(log_theta_[0]); }
  double theta2() const { return std::exp(log_theta_[1]); }
  double theta3() const { return std::exp(log_theta_[2]); }
  const Eigen::Vector3d& log_values() const { return log_theta_; }

 private:
  explicit Hyperparameters(Eigen::Vector3d log_theta) : log_theta_(std::move(log_theta)) {}
  Eigen::Vector3d log_theta_;
};

/// Per-column normal-inverse-gamma prior: d_i ~ IG(alpha, beta) and
/// u_i | d_i ~ N(0, d_i * diag(v)).
struct ColumnPrior {
  double alpha;
  double beta;
  Eigen::VectorXd v;
};

/// Decay profile f(i) = 1 - exp(-theta2 * i^{-1/p}); i is the 1-based position
/// in the maximin order.
double f_decay(int i, double theta2, int p);

/// Prior for ordered column i (1-based): alpha = 6, beta = 5*theta1*f(i), and
/// v_j = exp(-theta3*j) / (theta1*f(i)) for neighbor ranks j = 1..m_i.
ColumnPrior column_prior(int i, const Hyperparameters& theta, int p, int m_i);

/// Data-driven conditioning-set size: the largest j with exp(-theta3*j) >
/// 0.001, clamped to [1, m_max].
int select_m(double theta3, int m_max);

}  // namespace cholcov

#endif  // CHOLCOV_PRIOR_HPP
