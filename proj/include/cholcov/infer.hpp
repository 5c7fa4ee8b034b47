#ifndef CHOLCOV_INFER_HPP
#define CHOLCOV_INFER_HPP

#include <functional>
#include <optional>

#include "cholcov/assembly.hpp"
#include "cholcov/regress.hpp"

namespace cholcov {

struct EbResult {
  Hyperparameters theta;
  double log_likelihood;
  int evaluations;
};

/// Empirical-Bayes point estimate: Nelder-Mead maximization of the log
/// integrated likelihood over log theta (simplex tolerance 1e-6, 500
/// iterations, one restart from the incumbent). The returned value never falls
/// below the objective at init. Throws InitializationError if the objective is
/// not finite at init.
EbResult empirical_bayes(const Matrix& y_ordered, const OrderedGeometry& geometry, int p,
                         const Hyperparameters& init, int n_threads = 1);

/// Default optimizer/chain start: theta = (mean marginal variance of Y, 1, 0.5).
Hyperparameters default_init(const Matrix& y);

struct MHConfig {
  int n_iter = 20000;
  int n_burn = 10000;
  int thin = 10;
  std::optional<Eigen::Vector3d> init_log_theta;  // default_init(Y) when unset
  int adapt_start = 1000;
  double proposal_scale = 2.38 * 2.38 / 3.0;  // s_d on the adapted covariance
  double pre_adapt_step = 0.1;                // spherical proposal sd before adapt_start
  double regularizer = 1e-6;                  // epsilon ridge on the adapted covariance
  std::uint64_t seed = 0;
};

struct MHDiagnostics {
  double acceptance_rate = 0.0;
  Eigen::Vector3d ess = Eigen::Vector3d::Zero();  // per log-theta coordinate
  bool degenerate = false;                        // no move was ever accepted
};

struct MHResult {
  std::vector<Hyperparameters> chain;  // post burn-in, thinned
  Matrix raw;                          // n_iter x 5: log-theta, log_post, accepted
  MHDiagnostics diagnostics;
};

/// Adaptive random-walk Metropolis on log theta with a flat hyperprior: fixed
/// spherical proposals until adapt_start, then proposal covariance
/// proposal_scale * (running chain covariance + regularizer * I). Target is
/// the exact log integrated likelihood. Deterministic given config.seed.
MHResult adaptive_mh(const Matrix& y_ordered, const OrderedGeometry& geometry, int p,
                     const MHConfig& config, int n_threads = 1);

/// ESS of one chain coordinate via Geyer's initial-positive-sequence
/// autocorrelation sum.
double effective_sample_size(const Vector& chain);

/// Measurement-noise model: fixed tau^2, or unknown with an IG(a0, b0) prior.
struct NoiseModel {
  static NoiseModel fixed(double tau2);
  static NoiseModel unknown(double a0 = 0.01, double b0 = 0.01);

  bool is_fixed() const { return fixed_; }
  double tau2() const { return tau2_; }
  double a0() const { return a0_; }
  double b0() const { return b0_; }

 private:
  bool fixed_ = true;
  double tau2_ = 1.0;
  double a0_ = 0.0, b0_ = 0.0;
};

struct GibbsConfig {
  int n_sweeps = 500;
  int n_burn = 100;
  int thin = 1;
  int mh_steps_per_sweep = 5;
  std::optional<Eigen::Vector3d> init_log_theta;
  double init_tau2 = 1.0;  // starting value when tau^2 is unknown
  std::uint64_t seed = 0;
};

struct GibbsResult {
  std::vector<Hyperparameters> theta_chain;  // post burn-in, thinned
  std::vector<double> tau2_chain;            // matching sweeps (constant when fixed)
  Matrix latent_mean;                        // N x n posterior mean, original site order
  double theta_acceptance_rate = 0.0;
};

/// Gibbs sampler for noisy data w = y + N(0, tau^2 I): sweeps draw the factor
/// columns given the latent fields, take a few MH steps on theta, draw the
/// latent fields from their exact Gaussian full conditional (sparse Cholesky
/// of U D^{-1} U' + I/tau^2), and draw tau^2 from its IG full conditional when
/// unknown. Throws GibbsFactorError (with the sweep index) if a factorization
/// fails.
GibbsResult gibbs_noisy(const Matrix& w, const OrderedGeometry& geometry, int p,
                        const NoiseModel& noise, const GibbsConfig& config,
                        int n_threads = 1);

/// One exact draw per replicate of the latent fields given a fixed factor:
/// y_l ~ N(Q^{-1} w_l / tau^2, Q^{-1}) with Q = U D^{-1} U' + I/tau^2.
/// w and the result are in original site order.
Matrix sample_latent_fields(const SparseICF& factor, const Matrix& w, double tau2, Rng& rng);

/// Derivative-free Nelder-Mead minimizer (standard reflect/expand/contract/
/// shrink coefficients). Returns the best vertex when the simplex diameter
/// falls below tol or after max_iter iterations.
struct SimplexResult {
  Eigen::VectorXd x;
  double value;
  int evaluations;
};
SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                          const Eigen::VectorXd& x0, double initial_step, double tol,
                          int max_iter);

}  // namespace cholcov

#endif  // CHOLCOV_INFER_HPP
