#ifndef CHOLCOV_FIT_HPP
#define CHOLCOV_FIT_HPP

#include "cholcov/assembly.hpp"
#include "cholcov/regress.hpp"

namespace cholcov {

/// MAP factor at fixed theta: per ordered column, the NIG posterior mode
/// (u_hat, beta_t/(alpha_t+1)) assembled into a SparseICF. m comes from
/// select_m(theta3) with prefix-truncated conditioning sets.
SparseICF map_factor(const Matrix& y_ordered, const OrderedGeometry& geometry,
                     const Hyperparameters& theta, int p,
                     MapConvention convention = MapConvention::kMarginal, int n_threads = 1);

/// Posterior draw of the factor at fixed theta: per ordered column, a joint
/// (u, d) draw from the NIG posterior, using per-column substreams of rng.
SparseICF sample_factor(const Matrix& y_ordered, const OrderedGeometry& geometry,
                        const Hyperparameters& theta, int p, const Rng& rng,
                        int n_threads = 1);

}  // namespace cholcov

#endif  // CHOLCOV_FIT_HPP
