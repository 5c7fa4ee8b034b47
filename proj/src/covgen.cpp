#include "cholcov/covgen.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "cholcov/parallel.hpp"
#include "cholcov/rng.hpp"

namespace cholcov {

double matern_correlation(double d, double range, double smoothness) {
  if (range <= 0.0 || smoothness <= 0.0)
    throw ModelEvaluationError("Matern range and smoothness must be positive");
  const double t = d / range;
  if (t <= 0.0) return 1.0;
  if (smoothness == 0.5) return std::exp(-t);
  if (smoothness == 1.5) return (1.0 + t) * std::exp(-t);
  if (smoothness == 2.5) return (1.0 + t + t * t / 3.0) * std::exp(-t);
  return std::pow(2.0, 1.0 - smoothness) / std::tgamma(smoothness) *
         std::pow(t, smoothness) * std::cyl_bessel_k(smoothness, t);
}

namespace {

struct ModelEval {
  const LocationSet& locs;

  double operator()(const Matern& m, int i, int j) const {
    if (m.variance <= 0.0) throw ModelEvaluationError("Matern variance must be positive");
    return m.variance * matern_correlation(locs.distance(i, j), m.range, m.smoothness);
  }

  double operator()(const ExponentialHalfScale& m, int i, int j) const {
    if (m.theta1 <= 0.0 || m.theta2 <= 0.0)
      throw ModelEvaluationError("exponential parameters must be positive");
    return m.theta1 * std::exp(-m.theta2 * locs.distance(i, j) / 2.0);
  }

  double operator()(const Cauchy& m, int i, int j) const {
    if (m.variance <= 0.0 || m.range <= 0.0 || m.alpha <= 0.0 || m.beta <= 0.0)
      throw ModelEvaluationError("Cauchy parameters must be positive");
    const double t = locs.distance(i, j) / m.range;
    return m.variance * std::pow(1.0 + std::pow(t, m.alpha), -m.beta / m.alpha);
  }

  double operator()(const NonstatAnisoMatern& m, int i, int j) const {
    if (locs.dim() != 2)
      throw ModelEvaluationError("nonstationary anisotropic Matern needs 2-D locations");
    if (m.variance <= 0.0 || m.smoothness <= 0.0 || m.x_range <= 0.0)
      throw ModelEvaluationError("nonstationary Matern parameters must be positive");
    const double ryi = m.y_range_intercept + m.y_range_slope * locs.coords(i, 1);
    const double ryj = m.y_range_intercept + m.y_range_slope * locs.coords(j, 1);
    if (ryi <= 0.0 || ryj <= 0.0)
      throw ModelEvaluationError("nonstationary Matern y-range must stay positive");
    // Paciorek-Schervish with diagonal kernels Sigma(s) = diag(rx^2, ry(s)^2):
    // the x part of the averaged kernel is rx^2, the y part (ryi^2+ryj^2)/2.
    const double ry2 = 0.5 * (ryi * ryi + ryj * ryj);
    const double dx = locs.coords(i, 0) - locs.coords(j, 0);
    const double dy = locs.coords(i, 1) - locs.coords(j, 1);
    const double q = dx * dx / (m.x_range * m.x_range) + dy * dy / ry2;
    const double prefactor = std::sqrt(ryi * ryj / ry2);
    return m.variance * prefactor * matern_correlation(std::sqrt(q), 1.0, m.smoothness);
  }
};

}  // namespace

Matrix build_covariance(const CovarianceModel& model, const LocationSet& locs,
                        int n_threads) {
  const int n = locs.size();
  Matrix sigma(n, n);
  const ModelEval eval{locs};
  parallel_for(n, n_threads, [&](int i) {
    for (int j = 0; j <= i; ++j) {
      const double v = std::visit([&](const auto& m) { return eval(m, i, j); }, model);
      if (!std::isfinite(v))
        throw ModelEvaluationError("covariance model produced a non-finite entry");
      sigma(i, j) = v;
      sigma(j, i) = v;
    }
  });
  return sigma;
}

Matrix simulate_replicates(const Matrix& sigma, int n_rep, std::uint64_t seed) {
  if (n_rep < 1) throw Error("replicate count must be at least 1");
  const Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("covariance Cholesky factorization failed");
  const Matrix l = llt.matrixL();
  const int n = static_cast<int>(sigma.rows());
  Matrix y(n_rep, n);
  const Rng master(seed);
  for (int r = 0; r < n_rep; ++r) {
    Rng stream = master.substream(static_cast<std::uint64_t>(r));
    Vector z(n);
    for (int i = 0; i < n; ++i) z[i] = stream.normal();
    y.row(r) = (l * z).transpose();
  }
  return y;
}

Matrix taper(const Matrix& sigma, const LocationSet& locs, double taper_range,
             double nugget) {
  if (taper_range <= 0.0) throw Error("taper range must be positive");
  if (nugget < 0.0) throw Error("nugget must be nonnegative");
  const int n = static_cast<int>(sigma.rows());
  if (n != locs.size() || sigma.cols() != sigma.rows())
    throw Error("taper: matrix and location sizes do not match");
  Matrix out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = sigma(i, j) * std::exp(-locs.distance(i, j) / taper_range);
      out(i, j) = v;
      out(j, i) = v;
    }
    out(i, i) += nugget;
  }
  return out;
}

}  // namespace cholcov
