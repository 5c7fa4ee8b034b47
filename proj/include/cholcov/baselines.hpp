#ifndef CHOLCOV_BASELINES_HPP
#define CHOLCOV_BASELINES_HPP

#include "cholcov/assembly.hpp"
#include "cholcov/covgen.hpp"

namespace cholcov {

/// Sample covariance Y'Y/N (divisor N: the model fixes the mean at zero).
/// With center=true, location-wise means are subtracted first.
Matrix sample_cov(const Matrix& y, bool center = false);

/// Tapered sample covariance: sample_cov followed by the exponential taper
/// with the given range and nugget.
Matrix scovt(const Matrix& y, const LocationSet& locs, double taper_range,
             double nugget = 1e-5, bool center = false);

/// Per-column regression MLEs (no prior shrinkage), m_i = min(m_ours, N-1, i-1),
/// u by pseudo-inverse with rank guard, d = ||y - X u||^2 / N (clamped away
/// from zero), assembled as a factor. Requires N >= 2.
SparseICF mle_regression(const Matrix& y_ordered, const OrderedGeometry& geometry,
                         int m_ours, int n_threads = 1);

struct ExpFit {
  double variance;
  double range;
  Matrix sigma;
};

/// Exponential-covariance fit v * exp(-d/rho): v profiled analytically,
/// golden-section search over log rho on [1e-3, 10] x (max pairwise distance),
/// endpoints shrunk inward if the correlation fails to factor there.
ExpFit exponential_fit(const Matrix& y, const LocationSet& locs);

}  // namespace cholcov

#endif  // CHOLCOV_BASELINES_HPP
