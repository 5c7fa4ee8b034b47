#ifndef CHOLCOV_COVGEN_HPP
#define CHOLCOV_COVGEN_HPP

#include <cstdint>
#include <variant>

#include "cholcov/geometry.hpp"

namespace cholcov {

/// Isotropic Matern: variance * (2^{1-nu}/Gamma(nu)) (d/rho)^nu K_nu(d/rho).
struct Matern {
  double variance;
  double range;
  double smoothness;
};

/// Sigma_ij = theta1 * exp(-theta2 * d / 2), i.e. variance theta1 and
/// effective range 2/theta2.
struct ExponentialHalfScale {
  double theta1;
  double theta2;
};

/// Generalized Cauchy: variance * (1 + (d/range)^alpha)^{-beta/alpha}.
struct Cauchy {
  double variance;
  double range;
  double alpha;
  double beta;
};

/// Paciorek-Schervish kernel-convolution Matern with diagonal local kernels:
/// x-range constant, y-range affine in the y coordinate
/// (r_y(s) = y_range_intercept + y_range_slope * s_y). Locations must be 2-D.
struct NonstatAnisoMatern {
  double variance;
  double smoothness;
  double x_range = 0.05;
  double y_range_intercept = 0.05;
  double y_range_slope = 0.45;
};

using CovarianceModel = std::variant<Matern, ExponentialHalfScale, Cauchy, NonstatAnisoMatern>;

/// Matern correlation at distance d for the given range and smoothness; exact
/// closed forms for half-integer smoothness, modified Bessel K otherwise.
double matern_correlation(double d, double range, double smoothness);

/// Dense model covariance over the given sites. Throws ModelEvaluationError on
/// invalid parameters or non-finite entries.
Matrix build_covariance(const CovarianceModel& model, const LocationSet& locs,
                        int n_threads = 1);

/// N x n matrix of iid N(0, Sigma) rows, via a Cholesky factor of Sigma and
/// per-replicate substreams of `seed`. Throws NotPositiveDefinite if the
/// factorization fails.
Matrix simulate_replicates(const Matrix& sigma, int n_rep, std::uint64_t seed);

/// Elementwise exponential taper plus diagonal nugget:
/// result_ij = sigma_ij * exp(-d_ij/taper_range) + nugget * 1{i=j}.
Matrix taper(const Matrix& sigma, const LocationSet& locs, double taper_range, double nugget);

}  // namespace cholcov

#endif  // CHOLCOV_COVGEN_HPP
