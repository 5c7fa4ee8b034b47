#include "cholcov/baselines.hpp"

#include <Eigen/Eigenvalues>
#include <atomic>
#include <cmath>
#include <iostream>

#include "cholcov/parallel.hpp"
#include "cholcov/regress.hpp"

namespace cholcov {

Matrix sample_cov(const Matrix& y, bool center) {
  const auto n_rep = y.rows();
  if (n_rep < 1) throw Error("sample covariance needs at least one replicate");
  if (center) {
    const Eigen::RowVectorXd mean = y.colwise().mean();
    const Matrix c = y.rowwise() - mean;
    return c.transpose() * c / static_cast<double>(n_rep);
  }
  return y.transpose() * y / static_cast<double>(n_rep);
}

Matrix scovt(const Matrix& y, const LocationSet& locs, double taper_range, double nugget,
             bool center) {
  return taper(sample_cov(y, center), locs, taper_range, nugget);
}

SparseICF mle_regression(const Matrix& y_ordered, const OrderedGeometry& geometry,
                         int m_ours, int n_threads) {
  const int n = geometry.size();
  const auto n_rep = y_ordered.rows();
  if (n_rep < 2) throw InsufficientReplicates("regression MLE needs at least 2 replicates");
  if (y_ordered.cols() != n)
    throw GeometryMismatch("data column count does not match the geometry");
  if (m_ours < 1) throw Error("m must be at least 1");
  const int m_cap = std::min<int>(m_ours, static_cast<int>(n_rep) - 1);

  std::vector<FactorColumn> columns(static_cast<std::size_t>(n));
  std::atomic<bool> clamped{false};
  parallel_for(n, n_threads, [&](int i) {
    const auto& g_full = geometry.neighbors[static_cast<std::size_t>(i)];
    const auto m_i = std::min<std::size_t>(static_cast<std::size_t>(m_cap), g_full.size());
    std::vector<int> g(g_full.begin(), g_full.begin() + static_cast<std::ptrdiff_t>(m_i));
    const ColumnRegression reg = extract_regression(y_ordered, g, i);

    Vector u = Vector::Zero(static_cast<Eigen::Index>(m_i));
    if (m_i > 0) {
      // u = (X'X)^+ X'y with eigenvalues below 1e-10 * max treated as zero
      const Matrix xtx = reg.X.transpose() * reg.X;
      const Eigen::SelfAdjointEigenSolver<Matrix> eig(xtx);
      const Vector evals = eig.eigenvalues();
      const double cutoff = 1e-10 * std::max(evals.maxCoeff(), 0.0);
      const Vector proj = eig.eigenvectors().transpose() * (reg.X.transpose() * reg.y);
      Vector scaled = Vector::Zero(evals.size());
      for (Eigen::Index j = 0; j < evals.size(); ++j)
        if (evals[j] > cutoff && evals[j] > 0.0) scaled[j] = proj[j] / evals[j];
      u = eig.eigenvectors() * scaled;
    }
    double d = (reg.y - reg.X * u).squaredNorm() / static_cast<double>(n_rep);
    if (d < 1e-12) {
      d = 1e-12;
      clamped = true;
    }
    columns[static_cast<std::size_t>(i)] = {std::move(g), std::move(u), d};
  });
  if (clamped)
    std::cerr << "[cholcov] warning: interpolating MLE column, residual variance clamped\n";
  return SparseICF(std::move(columns), geometry.perm);
}

namespace {

// Profiled negative log-likelihood of the exponential model at range rho, up
// to constants: N/2 * (n log v_hat(rho) + log|R(rho)|). Returns +inf when the
// correlation fails to factor.
double exp_profile_objective(const Matrix& s, const Matrix& dist, double n_rep, double rho) {
  const auto n = s.rows();
  const Matrix r = (-dist / rho).array().exp();
  const Eigen::LLT<Matrix> llt(r);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const double v_hat = llt.solve(s).trace() / static_cast<double>(n);
  if (!(v_hat > 0.0) || !std::isfinite(v_hat)) return std::numeric_limits<double>::infinity();
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return 0.5 * n_rep * (static_cast<double>(n) * std::log(v_hat) + log_det);
}

}  // namespace

ExpFit exponential_fit(const Matrix& y, const LocationSet& locs) {
  const int n = locs.size();
  if (y.cols() != n) throw Error("data column count does not match the location set");
  if (n > kDefaultDenseLimit) throw DenseLimitExceeded("exponential fit is dense in n");
  const auto n_rep = static_cast<double>(y.rows());

  Matrix dist(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) dist(i, j) = locs.distance(i, j);
  const Matrix s = sample_cov(y);

  const double d_max = locs.max_pairwise_distance();
  if (!(d_max > 0.0)) throw Error("exponential fit needs at least two distinct locations");
  double lo = std::log(1e-3 * d_max);
  double hi = std::log(10.0 * d_max);
  auto objective = [&](double log_rho) {
    return exp_profile_objective(s, dist, n_rep, std::exp(log_rho));
  };
  // shrink endpoints inward while the correlation is numerically singular there
  for (int guard = 0; guard < 60 && !std::isfinite(objective(hi)); ++guard) {
    std::cerr << "[cholcov] warning: exponential correlation singular at range "
              << std::exp(hi) << ", shrinking bracket\n";
    hi -= 0.5;
  }
  for (int guard = 0; guard < 60 && !std::isfinite(objective(lo)); ++guard) {
    std::cerr << "[cholcov] warning: exponential correlation singular at range "
              << std::exp(lo) << ", shrinking bracket\n";
    lo += 0.5;
  }
  if (lo >= hi) throw SingularEstimate("no usable range bracket for the exponential fit");

  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = objective(c), fd = objective(d);
  for (int it = 0; it < 200 && (b - a) > 1e-8; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = objective(d);
    }
  }
  const double log_rho = fc < fd ? c : d;
  const double rho = std::exp(log_rho);
  const Matrix r = (-dist / rho).array().exp();
  const Eigen::LLT<Matrix> llt(r);
  if (llt.info() != Eigen::Success)
    throw SingularEstimate("exponential correlation singular at the fitted range");
  const double v_hat = llt.solve(s).trace() / static_cast<double>(n);
  return {v_hat, rho, v_hat * r};
}

}  // namespace cholcov
