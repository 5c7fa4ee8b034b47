#include "cholcov/regress.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "cholcov/parallel.hpp"

namespace cholcov {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)

bool use_normal_equations(SolvePath path, Eigen::Index m, Eigen::Index n_rep) {
  switch (path) {
    case SolvePath::kNormalEquations:
      return true;
    case SolvePath::kWoodbury:
      return false;
    case SolvePath::kAuto:
    default:
      return m <= n_rep;
  }
}

// Pieces shared by the posterior and the marginal: beta_t and
// log|G| - log|V|, plus u_hat when requested.
struct NigCore {
  Vector u_hat;
  double beta_t;
  double log_det_ratio;
};

NigCore nig_core(const ColumnRegression& reg, const ColumnPrior& prior, SolvePath path,
                 bool want_u_hat, Matrix* g_out) {
  const Eigen::Index m = reg.X.cols();
  const Eigen::Index n_rep = reg.X.rows();
  if (prior.v.size() != m)
    throw GeometryMismatch("prior dimension does not match the design matrix");

  NigCore core;
  core.log_det_ratio = 0.0;
  core.beta_t = prior.beta;
  core.u_hat = Vector::Zero(m);

  if (m == 0) {
    core.beta_t += 0.5 * reg.y.squaredNorm();
    if (g_out) g_out->resize(0, 0);
    return core;
  }
  if (n_rep == 0) {
    if (g_out) *g_out = prior.v.asDiagonal();
    return core;
  }

  const Vector v_inv = prior.v.cwiseInverse();
  if (!v_inv.allFinite())
    throw PosteriorFactorizationError("prior variance multiplier underflowed to zero");

  if (use_normal_equations(path, m, n_rep)) {
    Matrix a = reg.X.transpose() * reg.X;
    a.diagonal() += v_inv;
    const Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success)
      throw PosteriorFactorizationError("normal-equations system is not SPD");
    const Vector xty = reg.X.transpose() * reg.y;
    core.u_hat = llt.solve(xty);
    // log|G| - log|V| = -(log|A| + log|V|)
    const double log_det_a =
        2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    core.log_det_ratio = -(log_det_a + prior.v.array().log().sum());
    // beta_t = beta + (||y - X u_hat||^2 + u_hat' V^{-1} u_hat) / 2, a
    // cancellation-free equivalent of beta + (y'y - u_hat' G^{-1} u_hat)/2
    const double rss = (reg.y - reg.X * core.u_hat).squaredNorm();
    core.beta_t += 0.5 * (rss + core.u_hat.dot(v_inv.cwiseProduct(core.u_hat)));
    if (g_out) {
      *g_out = llt.solve(Matrix::Identity(m, m));
      *g_out = 0.5 * (*g_out + g_out->transpose());
    }
  } else {
    Matrix w = reg.X * prior.v.asDiagonal() * reg.X.transpose();
    w.diagonal().array() += 1.0;
    const Eigen::LLT<Matrix> llt(w);
    if (llt.info() != Eigen::Success)
      throw PosteriorFactorizationError("Woodbury system is not SPD");
    const Vector w_inv_y = llt.solve(reg.y);
    core.beta_t += 0.5 * reg.y.dot(w_inv_y);
    // matrix determinant lemma: |G|/|V| = 1/|I + X V X'|
    core.log_det_ratio = -2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    if (want_u_hat || g_out)
      core.u_hat = prior.v.asDiagonal() * (reg.X.transpose() * w_inv_y);
    if (g_out) {
      const Matrix xv = reg.X * prior.v.asDiagonal();
      *g_out = Matrix(prior.v.asDiagonal()) - xv.transpose() * llt.solve(xv);
      *g_out = 0.5 * (*g_out + g_out->transpose());
    }
  }
  if (!std::isfinite(core.beta_t) || core.beta_t <= 0.0)
    throw PosteriorFactorizationError("posterior scale is not positive and finite");
  return core;
}

}  // namespace

ColumnRegression extract_regression(const Matrix& y_ordered, const std::vector<int>& g_i,
                                    int i) {
  if (i < 0 || i >= y_ordered.cols())
    throw GeometryMismatch("column index out of range");
  ColumnRegression reg;
  reg.y = y_ordered.col(i);
  reg.X.resize(y_ordered.rows(), static_cast<Eigen::Index>(g_i.size()));
  for (std::size_t j = 0; j < g_i.size(); ++j) {
    if (g_i[j] < 0 || g_i[j] >= i)
      throw GeometryMismatch("conditioning index must precede the column");
    reg.X.col(static_cast<Eigen::Index>(j)) = -y_ordered.col(g_i[j]);
  }
  return reg;
}

ColumnPosterior nig_posterior(const ColumnRegression& reg, const ColumnPrior& prior,
                              SolvePath path) {
  ColumnPosterior post;
  const NigCore core = nig_core(reg, prior, path, true, &post.G);
  post.u_hat = core.u_hat;
  post.alpha_t = prior.alpha + 0.5 * static_cast<double>(reg.y.size());
  post.beta_t = core.beta_t;
  post.log_det_ratio = core.log_det_ratio;
  return post;
}

double column_log_marginal(const ColumnRegression& reg, const ColumnPrior& prior,
                           SolvePath path) {
  const auto n_rep = static_cast<double>(reg.y.size());
  if (n_rep == 0.0) return 0.0;
  const NigCore core = nig_core(reg, prior, path, false, nullptr);
  const double alpha_t = prior.alpha + 0.5 * n_rep;
  return -0.5 * n_rep * kLog2Pi + 0.5 * core.log_det_ratio +
         prior.alpha * std::log(prior.beta) - alpha_t * std::log(core.beta_t) +
         std::lgamma(alpha_t) - std::lgamma(prior.alpha);
}

double integrated_log_likelihood(const Matrix& y_ordered, const OrderedGeometry& geometry,
                                 const Hyperparameters& theta, int p, int n_threads) {
  const int n = geometry.size();
  if (y_ordered.cols() != n)
    throw GeometryMismatch("data column count does not match the geometry");
  if (y_ordered.rows() == 0) return 0.0;

  const int m = select_m(theta.theta3(), geometry.m_max);
  std::vector<double> contrib(static_cast<std::size_t>(n), 0.0);
  parallel_for(n, n_threads, [&](int i) {
    const auto& g_full = geometry.neighbors[static_cast<std::size_t>(i)];
    const auto m_i = std::min<std::size_t>(static_cast<std::size_t>(m), g_full.size());
    const std::vector<int> g(g_full.begin(), g_full.begin() + static_cast<std::ptrdiff_t>(m_i));
    const ColumnRegression reg = extract_regression(y_ordered, g, i);
    const ColumnPrior prior = column_prior(i + 1, theta, p, static_cast<int>(m_i));
    try {
      contrib[static_cast<std::size_t>(i)] = column_log_marginal(reg, prior);
    } catch (const PosteriorFactorizationError& e) {
      throw PosteriorFactorizationError(std::string(e.what()) + " (column " +
                                        std::to_string(i + 1) + ")");
    }
  });
  // fixed sequential reduction so totals do not depend on the thread count
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += contrib[static_cast<std::size_t>(i)];
  return total;
}

std::pair<Vector, double> column_map(const ColumnPosterior& post, MapConvention convention) {
  const double m_half = 0.5 * static_cast<double>(post.u_hat.size());
  const double denom = convention == MapConvention::kMarginal ? post.alpha_t + 1.0
                                                              : post.alpha_t + m_half + 1.0;
  return {post.u_hat, post.beta_t / denom};
}

std::pair<Vector, double> column_sample(const ColumnPosterior& post, Rng& rng) {
  const double d = rng.inverse_gamma(post.alpha_t, post.beta_t);
  const Eigen::Index m = post.u_hat.size();
  if (m == 0) return {post.u_hat, d};
  const Eigen::LLT<Matrix> llt(post.G);
  if (llt.info() != Eigen::Success)
    throw PosteriorFactorizationError("posterior covariance G is not SPD");
  Vector z(m);
  for (Eigen::Index j = 0; j < m; ++j) z[j] = rng.normal();
  const Vector scale_z = llt.matrixL() * z;
  return {post.u_hat + std::sqrt(d) * scale_z, d};
}

}  // namespace cholcov
