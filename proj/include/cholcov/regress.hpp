#ifndef CHOLCOV_REGRESS_HPP
#define CHOLCOV_REGRESS_HPP

#include "cholcov/geometry.hpp"
#include "cholcov/prior.hpp"
#include "cholcov/rng.hpp"

namespace cholcov {

/// One ordered-column regression: response y (the N observations at ordered
/// site i) and design X whose row l holds the negated neighbor observations
/// of replicate l.
struct ColumnRegression {
  Vector y;
  Matrix X;
};

/// Conjugate posterior N(u | u_hat, d*G) IG(d | alpha_t, beta_t) for one column.
/// log_det_ratio carries log|G| - log|V| for the marginal likelihood.
struct ColumnPosterior {
  Vector u_hat;
  Matrix G;
  double alpha_t;
  double beta_t;
  double log_det_ratio;
};

/// Which linear-algebra route computes the posterior: the m x m normal
/// equations (X'X + V^{-1}), or the N x N Woodbury form (I_N + X V X').
/// kAuto picks normal equations when m <= N.
enum class SolvePath { kAuto, kNormalEquations, kWoodbury };

/// How a point estimate for d is read off the posterior: the marginal IG mode
/// beta_t/(alpha_t+1) (default), or the joint NIG mode beta_t/(alpha_t+m/2+1).
enum class MapConvention { kMarginal, kJoint };

/// Builds the regression for ordered column i from maximin-ordered data.
/// Throws GeometryMismatch if any neighbor index is out of range.
ColumnRegression extract_regression(const Matrix& y_ordered, const std::vector<int>& g_i,
                                    int i);

/// Conjugate NIG update. Both paths produce identical results up to rounding;
/// throws PosteriorFactorizationError if the chosen system is not numerically SPD.
ColumnPosterior nig_posterior(const ColumnRegression& reg, const ColumnPrior& prior,
                              SolvePath path = SolvePath::kAuto);

/// Per-column log marginal density log p(y_i | theta), including the
/// (2*pi)^{-N/2} constant, without forming the full posterior.
double column_log_marginal(const ColumnRegression& reg, const ColumnPrior& prior,
                           SolvePath path = SolvePath::kAuto);

/// Exact log integrated likelihood log p(Y | theta): the sum of per-column log
/// marginals with m = select_m(theta3, m_max) and prefix-truncated
/// conditioning sets. Columns evaluate in parallel; the reduction is a fixed
/// sequential sum over i, so results do not depend on the thread count.
double integrated_log_likelihood(const Matrix& y_ordered, const OrderedGeometry& geometry,
                                 const Hyperparameters& theta, int p, int n_threads = 1);

/// MAP estimate (u_hat, d) from one column posterior.
std::pair<Vector, double> column_map(const ColumnPosterior& post,
                                     MapConvention convention = MapConvention::kMarginal);

/// Joint draw (u, d): d ~ IG(alpha_t, beta_t), then u ~ N(u_hat, d*G).
std::pair<Vector, double> column_sample(const ColumnPosterior& post, Rng& rng);

}  // namespace cholcov

#endif  // CHOLCOV_REGRESS_HPP
