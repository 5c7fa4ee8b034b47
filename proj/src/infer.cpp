#include "cholcov/infer.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <memory>

#include "cholcov/fit.hpp"

namespace cholcov {

SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                          const Eigen::VectorXd& x0, double initial_step, double tol,
                          int max_iter) {
  const int dim = static_cast<int>(x0.size());
  const int n_vert = dim + 1;
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    const double v = objective(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<Eigen::VectorXd> verts(static_cast<std::size_t>(n_vert), x0);
  std::vector<double> vals(static_cast<std::size_t>(n_vert));
  for (int i = 0; i < dim; ++i) verts[static_cast<std::size_t>(i + 1)][i] += initial_step;
  for (int i = 0; i < n_vert; ++i) vals[static_cast<std::size_t>(i)] = eval(verts[static_cast<std::size_t>(i)]);

  auto order = [&] {
    std::vector<int> idx(static_cast<std::size_t>(n_vert));
    for (int i = 0; i < n_vert; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return vals[static_cast<std::size_t>(a)] < vals[static_cast<std::size_t>(b)]; });
    std::vector<Eigen::VectorXd> v2;
    std::vector<double> f2;
    for (int i : idx) {
      v2.push_back(verts[static_cast<std::size_t>(i)]);
      f2.push_back(vals[static_cast<std::size_t>(i)]);
    }
    verts.swap(v2);
    vals.swap(f2);
  };

  for (int it = 0; it < max_iter; ++it) {
    order();
    double diam = 0.0;
    for (int i = 1; i < n_vert; ++i)
      diam = std::max(diam, (verts[static_cast<std::size_t>(i)] - verts[0]).norm());
    if (diam < tol) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < dim; ++i) centroid += verts[static_cast<std::size_t>(i)];
    centroid /= static_cast<double>(dim);
    const auto worst = static_cast<std::size_t>(dim);

    const Eigen::VectorXd reflected = centroid + (centroid - verts[worst]);
    const double f_r = eval(reflected);
    if (f_r < vals[0]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - verts[worst]);
      const double f_e = eval(expanded);
      if (f_e < f_r) {
        verts[worst] = expanded;
        vals[worst] = f_e;
      } else {
        verts[worst] = reflected;
        vals[worst] = f_r;
      }
      continue;
    }
    if (f_r < vals[worst - 1]) {
      verts[worst] = reflected;
      vals[worst] = f_r;
      continue;
    }
    const Eigen::VectorXd contracted = centroid + 0.5 * (verts[worst] - centroid);
    const double f_c = eval(contracted);
    if (f_c < vals[worst]) {
      verts[worst] = contracted;
      vals[worst] = f_c;
      continue;
    }
    for (int i = 1; i < n_vert; ++i) {  // shrink toward the best vertex
      verts[static_cast<std::size_t>(i)] = verts[0] + 0.5 * (verts[static_cast<std::size_t>(i)] - verts[0]);
      vals[static_cast<std::size_t>(i)] = eval(verts[static_cast<std::size_t>(i)]);
    }
  }
  order();
  return {verts[0], vals[0], evals};
}

Hyperparameters default_init(const Matrix& y) {
  const auto n_rep = static_cast<double>(y.rows());
  double var = 1.0;
  if (n_rep >= 1.0) var = y.array().square().sum() / (n_rep * static_cast<double>(y.cols()));
  if (!(var > 1e-8)) var = 1e-8;
  return {var, 1.0, 0.5};
}

EbResult empirical_bayes(const Matrix& y_ordered, const OrderedGeometry& geometry, int p,
                         const Hyperparameters& init, int n_threads) {
  auto objective = [&](const Eigen::VectorXd& log_theta) -> double {
    try {
      const auto theta = Hyperparameters::from_log(log_theta);
      return -integrated_log_likelihood(y_ordered, geometry, theta, p, n_threads);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  const double at_init = objective(init.log_values());
  if (!std::isfinite(at_init))
    throw InitializationError("integrated likelihood is not finite at the initial theta");

  SimplexResult best = nelder_mead(objective, init.log_values(), 0.5, 1e-6, 500);
  const SimplexResult restart = nelder_mead(objective, best.x, 0.1, 1e-6, 500);
  int evals = best.evaluations + restart.evaluations;
  if (restart.value < best.value) best = restart;
  if (at_init < best.value) best = {init.log_values(), at_init, evals};

  return {Hyperparameters::from_log(best.x), -best.value, evals};
}

double effective_sample_size(const Vector& chain) {
  const auto len = chain.size();
  if (len < 2) return static_cast<double>(len);
  const double mean = chain.mean();
  const Vector centered = chain.array() - mean;
  const double var = centered.squaredNorm() / static_cast<double>(len);
  if (var <= 0.0) return 0.0;
  // Geyer initial positive sequence: sum lag-pair autocorrelations while positive
  double acf_sum = 0.0;
  for (Eigen::Index lag = 1; lag + 1 < len; lag += 2) {
    double rho_a = 0.0, rho_b = 0.0;
    for (Eigen::Index t = 0; t + lag < len; ++t) rho_a += centered[t] * centered[t + lag];
    for (Eigen::Index t = 0; t + lag + 1 < len; ++t) rho_b += centered[t] * centered[t + lag + 1];
    rho_a /= static_cast<double>(len) * var;
    rho_b /= static_cast<double>(len) * var;
    if (rho_a + rho_b <= 0.0) break;
    acf_sum += rho_a + rho_b;
  }
  return static_cast<double>(len) / (1.0 + 2.0 * acf_sum);
}

namespace {

// Random-walk Metropolis state with Haario-style covariance adaptation.
// Shared by adaptive_mh and the theta updates inside the Gibbs sampler.
class AdaptiveWalker {
 public:
  AdaptiveWalker(const MHConfig& config, const Eigen::Vector3d& init,
                 std::function<double(const Eigen::Vector3d&)> log_target, Rng rng)
      : config_(config),
        rng_(rng),
        x_(init),
        log_target_(std::move(log_target)),
        mean_(Eigen::Vector3d::Zero()),
        scatter_(Eigen::Matrix3d::Zero()) {
    fx_ = log_target_(x_);
    observe(x_);
  }

  // Recomputes the cached log density; call when the target itself changed
  // (the Gibbs sampler moves the latent fields between theta updates).
  void refresh() { fx_ = log_target_(x_); }

  // One Metropolis step; returns whether the proposal was accepted.
  bool step() {
    Eigen::Vector3d prop;
    if (count_ <= config_.adapt_start) {
      for (int j = 0; j < 3; ++j) prop[j] = x_[j] + config_.pre_adapt_step * rng_.normal();
    } else {
      Eigen::Matrix3d cov = covariance();
      cov *= config_.proposal_scale;
      cov.diagonal().array() += config_.proposal_scale * config_.regularizer;
      const Eigen::LLT<Eigen::Matrix3d> llt(cov);
      Eigen::Vector3d z;
      for (int j = 0; j < 3; ++j) z[j] = rng_.normal();
      prop = x_ + llt.matrixL() * z;
    }
    const double fp = log_target_(prop);
    bool accept = false;
    if (std::isfinite(fp)) {
      const double log_u = std::log(rng_.uniform());
      accept = log_u < fp - fx_;
    }
    if (accept) {
      x_ = prop;
      fx_ = fp;
    }
    observe(x_);
    return accept;
  }

  const Eigen::Vector3d& position() const { return x_; }
  double log_density() const { return fx_; }

 private:
  void observe(const Eigen::Vector3d& x) {
    // streaming mean/scatter over the whole chain history
    ++count_;
    const Eigen::Vector3d delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    scatter_ += delta * (x - mean_).transpose();
  }

  Eigen::Matrix3d covariance() const {
    if (count_ < 2) return Eigen::Matrix3d::Identity();
    Eigen::Matrix3d c = scatter_ / static_cast<double>(count_ - 1);
    return 0.5 * (c + c.transpose());
  }

  MHConfig config_;
  Rng rng_;
  Eigen::Vector3d x_;
  double fx_;
  std::function<double(const Eigen::Vector3d&)> log_target_;
  Eigen::Vector3d mean_;
  Eigen::Matrix3d scatter_;
  long count_ = 0;
};

double guarded_log_lik(const Matrix& y_ordered, const OrderedGeometry& geometry, int p,
                       const Eigen::Vector3d& log_theta, int n_threads) {
  try {
    return integrated_log_likelihood(y_ordered, geometry,
                                     Hyperparameters::from_log(log_theta), p, n_threads);
  } catch (const Error&) {
    return -std::numeric_limits<double>::infinity();
  }
}

}  // namespace

MHResult adaptive_mh(const Matrix& y_ordered, const OrderedGeometry& geometry, int p,
                     const MHConfig& config, int n_threads) {
  if (config.n_iter <= 0 || config.n_burn < 0 || config.n_iter < config.n_burn)
    throw Error("MH configuration requires n_iter > n_burn >= 0");
  if (config.thin < 1) throw Error("thin must be at least 1");

  const Eigen::Vector3d init = config.init_log_theta
                                   ? *config.init_log_theta
                                   : default_init(y_ordered).log_values();
  auto target = [&](const Eigen::Vector3d& lt) {
    return guarded_log_lik(y_ordered, geometry, p, lt, n_threads);
  };
  if (!std::isfinite(target(init)))
    throw InitializationError("integrated likelihood is not finite at the initial theta");

  AdaptiveWalker walker(config, init, target, Rng(config.seed, /*stream=*/1));

  MHResult result;
  result.raw.resize(config.n_iter, 5);
  Matrix post_burn(std::max(0, config.n_iter - config.n_burn), 3);
  long accepted = 0;
  for (int it = 0; it < config.n_iter; ++it) {
    const bool acc = walker.step();
    accepted += acc ? 1 : 0;
    result.raw(it, 0) = walker.position()[0];
    result.raw(it, 1) = walker.position()[1];
    result.raw(it, 2) = walker.position()[2];
    result.raw(it, 3) = walker.log_density();
    result.raw(it, 4) = acc ? 1.0 : 0.0;
    if (it >= config.n_burn) {
      post_burn.row(it - config.n_burn) = walker.position().transpose();
      if ((it - config.n_burn) % config.thin == 0)
        result.chain.push_back(Hyperparameters::from_log(walker.position()));
    }
  }
  result.diagnostics.acceptance_rate =
      static_cast<double>(accepted) / static_cast<double>(config.n_iter);
  result.diagnostics.degenerate = accepted == 0;
  if (result.diagnostics.degenerate)
    std::cerr << "[cholcov] warning: MH chain never accepted a move\n";
  for (int j = 0; j < 3; ++j)
    result.diagnostics.ess[j] = effective_sample_size(post_burn.col(j));
  return result;
}

NoiseModel NoiseModel::fixed(double tau2) {
  if (!(tau2 > 0.0)) throw Error("fixed noise variance must be positive");
  NoiseModel m;
  m.fixed_ = true;
  m.tau2_ = tau2;
  return m;
}

NoiseModel NoiseModel::unknown(double a0, double b0) {
  if (!(a0 > 0.0) || !(b0 > 0.0)) throw Error("IG hyperprior parameters must be positive");
  NoiseModel m;
  m.fixed_ = false;
  m.a0_ = a0;
  m.b0_ = b0;
  return m;
}

namespace {

// Latent-field draw in ordered indexing: Q = U D^{-1} U' + I/tau2, exact
// sparse Cholesky, y_l = mu_l + P' L^{-T} z with mu_l = Q^{-1} w_l / tau2.
Matrix sample_latent_ordered(const SparseICF& factor, const Matrix& w_ordered, double tau2,
                             Rng& rng, int sweep_index) {
  const int n = factor.size();
  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(factor.nonzero_count() * 2));
  // Q = sum_i (1/d_i) c_i c_i' + I/tau2, where c_i = e_i + sum_j u_i(j) e_{g_i(j)}
  std::vector<std::pair<int, double>> entries;
  for (int i = 0; i < n; ++i) {
    const auto& col = factor.column(i);
    entries.clear();
    entries.emplace_back(i, 1.0);
    for (std::size_t j = 0; j < col.g.size(); ++j)
      entries.emplace_back(col.g[j], col.u[static_cast<Eigen::Index>(j)]);
    const double inv_d = 1.0 / col.d;
    for (const auto& [r1, v1] : entries)
      for (const auto& [r2, v2] : entries) trips.emplace_back(r1, r2, inv_d * v1 * v2);
  }
  for (int i = 0; i < n; ++i) trips.emplace_back(i, i, 1.0 / tau2);

  Eigen::SparseMatrix<double> q(n, n);
  q.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(q);
  if (llt.info() != Eigen::Success)
    throw GibbsFactorError("latent-field precision factorization failed at sweep " +
                           std::to_string(sweep_index));

  const auto n_rep = w_ordered.rows();
  Matrix y(n_rep, n);
  for (Eigen::Index l = 0; l < n_rep; ++l) {
    const Vector mu = llt.solve(w_ordered.row(l).transpose()) / tau2;
    Vector z(n);
    for (int i = 0; i < n; ++i) z[i] = rng.normal();
    // cov(P' L^{-T} z) = P' L^{-T} L^{-1} P = Q^{-1}
    const Vector noise =
        llt.permutationPinv() * llt.matrixU().solve(z);
    y.row(l) = (mu + noise).transpose();
  }
  return y;
}

}  // namespace

Matrix sample_latent_fields(const SparseICF& factor, const Matrix& w, double tau2, Rng& rng) {
  if (!(tau2 > 0.0)) throw Error("noise variance must be positive");
  const Matrix w_ordered = permute_columns(w, factor.perm());
  const Matrix y_ordered = sample_latent_ordered(factor, w_ordered, tau2, rng, 0);
  Matrix y(w.rows(), w.cols());
  for (int k = 0; k < factor.size(); ++k)
    y.col(factor.perm()[static_cast<std::size_t>(k)]) = y_ordered.col(k);
  return y;
}

GibbsResult gibbs_noisy(const Matrix& w, const OrderedGeometry& geometry, int p,
                        const NoiseModel& noise, const GibbsConfig& config, int n_threads) {
  const int n = geometry.size();
  const auto n_rep = w.rows();
  if (w.cols() != n) throw GeometryMismatch("data column count does not match the geometry");
  if (config.n_sweeps < config.n_burn || config.n_burn < 0 || config.thin < 1)
    throw Error("Gibbs configuration requires n_sweeps >= n_burn >= 0 and thin >= 1");

  const Matrix w_ordered = permute_columns(w, geometry.perm);
  Matrix y_ordered = w_ordered;  // latent fields initialized at the data
  double tau2 = noise.is_fixed() ? noise.tau2() : config.init_tau2;

  Rng rng(config.seed, /*stream=*/2);
  Rng factor_rng = rng.substream(0x666163746f72ULL);

  Eigen::Vector3d log_theta = config.init_log_theta
                                  ? *config.init_log_theta
                                  : default_init(w).log_values();

  MHConfig mh_template;
  mh_template.adapt_start = 200;  // sweeps*steps accumulate quickly
  auto theta_target = [&](const Eigen::Vector3d& lt) {
    return guarded_log_lik(y_ordered, geometry, p, lt, n_threads);
  };
  std::unique_ptr<AdaptiveWalker> walker;
  if (config.mh_steps_per_sweep > 0)
    walker = std::make_unique<AdaptiveWalker>(mh_template, log_theta, theta_target,
                                              rng.substream(0x7468657461ULL));

  GibbsResult result;
  result.latent_mean = Matrix::Zero(n_rep, n);
  long theta_accepted = 0, theta_steps = 0;
  int kept = 0;

  for (int sweep = 0; sweep < config.n_sweeps; ++sweep) {
    // (a) factor columns from their NIG posteriors given the latent fields
    const Hyperparameters theta = Hyperparameters::from_log(log_theta);
    SparseICF factor = [&] {
      try {
        return sample_factor(y_ordered, geometry, theta, p,
                             factor_rng.substream(static_cast<std::uint64_t>(sweep)),
                             n_threads);
      } catch (const Error& e) {
        throw GibbsFactorError(std::string(e.what()) + " at sweep " + std::to_string(sweep));
      }
    }();

    // (b) a short MH run on theta given the latent fields
    if (walker) {
      walker->refresh();  // the latent fields moved since the last sweep
      for (int s = 0; s < config.mh_steps_per_sweep; ++s) {
        theta_accepted += walker->step() ? 1 : 0;
        ++theta_steps;
      }
      log_theta = walker->position();
    }

    // (c) latent fields from their Gaussian full conditional
    y_ordered = sample_latent_ordered(factor, w_ordered, tau2, rng, sweep);

    // (d) noise variance from its IG full conditional
    if (!noise.is_fixed()) {
      const double rss = (w_ordered - y_ordered).squaredNorm();
      tau2 = rng.inverse_gamma(noise.a0() + 0.5 * static_cast<double>(n * n_rep),
                               noise.b0() + 0.5 * rss);
    }

    if (sweep >= config.n_burn && (sweep - config.n_burn) % config.thin == 0) {
      result.theta_chain.push_back(Hyperparameters::from_log(log_theta));
      result.tau2_chain.push_back(tau2);
      for (int k = 0; k < n; ++k)
        result.latent_mean.col(geometry.perm[static_cast<std::size_t>(k)]) +=
            y_ordered.col(k);
      ++kept;
    }
  }
  if (kept > 0) result.latent_mean /= static_cast<double>(kept);
  result.theta_acceptance_rate =
      theta_steps > 0 ? static_cast<double>(theta_accepted) / static_cast<double>(theta_steps)
                      : 0.0;
  return result;
}

}  // namespace cholcov
