#include "cholcov/prior.hpp"

#include <algorithm>
#include <cmath>

namespace cholcov {

Hyperparameters::Hyperparameters(double theta1, double theta2, double theta3) {
  if (!(theta1 > 0.0) || !(theta2 > 0.0) || !(theta3 > 0.0) || !std::isfinite(theta1) ||
      !std::isfinite(theta2) || !std::isfinite(theta3))
    throw Error("hyperparameters must be positive and finite");
  log_theta_ << std::log(theta1), std::log(theta2), std::log(theta3);
}

Hyperparameters Hyperparameters::from_log(const Eigen::Vector3d& log_theta) {
  if (!log_theta.allFinite()) throw Error("log hyperparameters must be finite");
  return Hyperparameters(log_theta);
}

double f_decay(int i, double theta2, int p) {
  return 1.0 - std::exp(-theta2 * std::pow(static_cast<double>(i), -1.0 / p));
}

ColumnPrior column_prior(int i, const Hyperparameters& theta, int p, int m_i) {
  ColumnPrior prior;
  const double mean = theta.theta1() * f_decay(i, theta.theta2(), p);
  prior.alpha = 6.0;
  prior.beta = 5.0 * mean;
  prior.v.resize(m_i);
  const double theta3 = theta.theta3();
  for (int j = 1; j <= m_i; ++j) prior.v[j - 1] = std::exp(-theta3 * j) / mean;
  return prior;
}

int select_m(double theta3, int m_max) {
  if (!(theta3 > 0.0)) throw Error("theta3 must be positive");
  if (std::exp(-theta3 * m_max) > 1e-3) return m_max;
  // largest j with exp(-theta3 * j) > 1e-3, i.e. j < ln(1000)/theta3 (strict)
  const double bound = std::min(std::log(1000.0) / theta3, static_cast<double>(m_max));
  int m = static_cast<int>(std::floor(bound));
  while (m >= 1 && !(std::exp(-theta3 * m) > 1e-3)) --m;
  while (m + 1 <= m_max && std::exp(-theta3 * (m + 1)) > 1e-3) ++m;
  return std::clamp(m, 1, m_max);
}

}  // namespace cholcov
