#include "cholcov/infer.hpp"

#include <gtest/gtest.h>

#include <random>

#include "cholcov/covgen.hpp"
#include "cholcov/fit.hpp"
#include "test_utils.hpp"

using namespace cholcov;

namespace {

LocationSet random_locs(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix c(n, 2);
  for (int i = 0; i < n; ++i) {
    c(i, 0) = unif(gen);
    c(i, 1) = unif(gen);
  }
  return LocationSet(std::move(c));
}

}  // namespace

TEST(NelderMead, MinimizesQuadraticAndBananaValley) {
  auto quadratic = [](const Eigen::VectorXd& x) {
    return (x[0] - 1.5) * (x[0] - 1.5) + 2.0 * (x[1] + 0.5) * (x[1] + 0.5);
  };
  const auto q = nelder_mead(quadratic, Eigen::Vector2d(0.0, 0.0), 0.5, 1e-8, 500);
  EXPECT_NEAR(q.x[0], 1.5, 1e-5);
  EXPECT_NEAR(q.x[1], -0.5, 1e-5);

  auto rosenbrock = [](const Eigen::VectorXd& x) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
  };
  auto r = nelder_mead(rosenbrock, Eigen::Vector2d(-1.2, 1.0), 0.5, 1e-10, 500);
  r = nelder_mead(rosenbrock, r.x, 0.1, 1e-10, 500);  // restart, as empirical_bayes does
  EXPECT_NEAR(r.x[0], 1.0, 1e-3);
  EXPECT_NEAR(r.x[1], 1.0, 1e-3);
}

TEST(EffectiveSampleSize, WhiteNoiseVsStickyChain) {
  std::mt19937 gen(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int len = 4000;
  Vector white(len);
  for (int i = 0; i < len; ++i) white[i] = normal(gen);
  EXPECT_GT(effective_sample_size(white), 0.5 * len);

  Vector sticky(len);  // AR(1) with strong correlation mixes far slower
  sticky[0] = 0.0;
  for (int i = 1; i < len; ++i) sticky[i] = 0.95 * sticky[i - 1] + 0.1 * normal(gen);
  EXPECT_LT(effective_sample_size(sticky), 0.2 * len);
}

TEST(EmpiricalBayes, ImprovesOnInitAndIsDeterministic) {
  const auto locs = random_locs(60, 5);
  const auto geom = build_geometry(locs, DistanceMetric::euclidean(), 15);
  const Matrix sigma = build_covariance(Matern{2.0, 0.3, 1.0}, locs);
  const Matrix y = permute_columns(simulate_replicates(sigma, 10, 17), geom.perm);

  const Hyperparameters init(1.0, 1.0, 0.5);
  const double at_init = integrated_log_likelihood(y, geom, init, 2);
  const auto fit1 = empirical_bayes(y, geom, 2, init);
  EXPECT_GE(fit1.log_likelihood, at_init);
  EXPECT_NEAR(fit1.log_likelihood, integrated_log_likelihood(y, geom, fit1.theta, 2), 1e-9);

  const auto fit2 = empirical_bayes(y, geom, 2, init);
  EXPECT_EQ(fit1.theta.log_values(), fit2.theta.log_values());
}

TEST(EmpiricalBayes, RecoversExponentialVariance) {
  // data from Sigma = theta1 exp(-theta2 d / 2): theta1-hat within a factor 2
  // of 3, median over 5 seeds
  std::vector<double> estimates;
  for (unsigned seed : {1u, 2u, 3u, 4u, 5u}) {
    const auto locs = random_locs(400, 100 + seed);
    const auto geom = build_geometry(locs, DistanceMetric::euclidean(), 30);
    const Matrix sigma = build_covariance(ExponentialHalfScale{3.0, 4.0}, locs);
    const Matrix y = permute_columns(simulate_replicates(sigma, 50, seed), geom.perm);
    const auto fit = empirical_bayes(y, geom, 2, default_init(y));
    estimates.push_back(fit.theta.theta1());
  }
  std::sort(estimates.begin(), estimates.end());
  const double median = estimates[2];
  EXPECT_GT(median, 1.5);
  EXPECT_LT(median, 6.0);
}

TEST(EmpiricalBayes, InvariantToReplicatePermutation) {
  const auto locs = random_locs(50, 6);
  const auto geom = build_geometry(locs, DistanceMetric::euclidean(), 10);
  const Matrix sigma = build_covariance(Matern{2.0, 0.3, 1.0}, locs);
  const Matrix y = permute_columns(simulate_replicates(sigma, 16, 3), geom.perm);

  Matrix shuffled = y;
  std::mt19937 gen(4);
  std::vector<int> rows(16);
  for (int i = 0; i < 16; ++i) rows[static_cast<std::size_t>(i)] = i;
  std::shuffle(rows.begin(), rows.end(), gen);
  for (int i = 0; i < 16; ++i) shuffled.row(i) = y.row(rows[static_cast<std::size_t>(i)]);

  const auto a = empirical_bayes(y, geom, 2, default_init(y));
  const auto b = empirical_bayes(shuffled, geom, 2, default_init(shuffled));
  EXPECT_LT((a.theta.log_values() - b.theta.log_values()).cwiseAbs().maxCoeff(), 0.05);
}

TEST(EmpiricalBayes, NonFiniteInitThrows) {
  Matrix c(2, 2);
  c << 0, 0, 1, 1;
  const auto locs = LocationSet(std::move(c));
  const auto geom = build_geometry(locs, DistanceMetric::euclidean(), 1);
  Matrix y(1, 2);
  y << 1.0, 2.0;
  // theta large enough that exp(-theta3 * 1) underflows the prior variance
  EXPECT_THROW(empirical_bayes(y, geom, 2, Hyperparameters(1.0, 1.0, 1e6)),
               InitializationError);
}

TEST(AdaptiveMh, LogRatioAntisymmetry) {
  // with a symmetric proposal the acceptance log-ratio of a move and its
  // reverse cancel exactly: log r(a->b) = ll(b) - ll(a) = -log r(b->a)
  const auto locs = random_locs(20, 8);
  const auto geom = build_geometry(locs, DistanceMetric::euclidean(), 5);
  std::mt19937 gen(9);
  const Matrix y = testutil::random_matrix(6, 20, gen);
  const Hyperparameters a(1.0, 1.0, 0.5), b(1.4, 0.7, 0.9);
  const double ll_a = integrated_log_likelihood(y, geom, a, 2);
  const double ll_b = integrated_log_likelihood(y, geom, b, 2);
  const double forward = ll_b - ll_a;
  const double backward = ll_a - ll_b;
  EXPECT_EQ(forward, -backward);
}

TEST(AdaptiveMh, EmptyChainAndDomainContract) {
  const auto locs = random_locs(25, 10);
  const auto geom = build_geometry(locs, DistanceMetric::euclidean(), 8);
  const Matrix sigma = build_covariance(Matern{2.0, 0.3, 1.0}, locs);
  const Matrix y = permute_columns(simulate_replicates(sigma, 8, 21), geom.perm);

  MHConfig config;
  config.n_iter = 300;
  config.n_burn = 300;
  config.thin = 1;
  config.seed = 5;
  const auto res = adaptive_mh(y, geom, 2, config);
  EXPECT_TRUE(res.chain.empty());
  EXPECT_EQ(res.raw.rows(), 300);

  config.n_burn = 100;
  const auto res2 = adaptive_mh(y, geom, 2, config);
  EXPECT_EQ(static_cast<int>(res2.chain.size()), 200 / config.thin);
  for (const auto& theta : res2.chain) {
    ASSERT_TRUE(std::isfinite(theta.theta1()));
    ASSERT_GT(theta.theta1(), 0.0);
    ASSERT_GT(theta.theta2(), 0.0);
    ASSERT_GT(theta.theta3(), 0.0);
  }
}

TEST(AdaptiveMh, MixesOnSimulatedField) {
  // scaled-down mixing check; the full-size run lives in the acceptance suite
  const auto locs = random_locs(100, 11);
  const auto geom = build_geometry(locs, DistanceMetric::euclidean(), 20);
  const Matrix sigma = build_covariance(Matern{3.0, 0.25, 1.0}, locs);
  const Matrix y = permute_columns(simulate_replicates(sigma, 20, 31), geom.perm);

  MHConfig config;
  config.n_iter = 4000;
  config.n_burn = 1500;
  config.thin = 5;
  config.adapt_start = 500;
  config.seed = 12;
  const auto res = adaptive_mh(y, geom, 2, config);
  EXPECT_GT(res.diagnostics.acceptance_rate, 0.05);
  EXPECT_LT(res.diagnostics.acceptance_rate, 0.7);
  for (int j = 0; j < 3; ++j) EXPECT_GT(res.diagnostics.ess[j], 50.0) << "coordinate " << j;
  EXPECT_FALSE(res.diagnostics.degenerate);

  const auto res2 = adaptive_mh(y, geom, 2, config);
  EXPECT_EQ(res.raw, res2.raw);  // same seed, same chain
}

TEST(SampleLatentFields, DegenerateNoiseLimitEqualsData) {
  std::mt19937 gen(13);
  std::vector<FactorColumn> cols;
  for (int i = 0; i < 15; ++i) {
    std::vector<int> g;
    Vector u(std::min(i, 2));
    for (int j = 0; j < std::min(i, 2); ++j) {
      g.push_back(i - 1 - j);
      u[j] = 0.3 / (j + 1);
    }
    cols.push_back({std::move(g), std::move(u), 1.0 + 0.1 * i});
  }
  const SparseICF f(std::move(cols), {});
  const Matrix w = testutil::random_matrix(4, 15, gen);
  Rng rng(77);
  const Matrix y = sample_latent_fields(f, w, 1e-12, rng);
  EXPECT_LT((y - w).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(SampleLatentFields, IdentityModelShrinksByHalf) {
  // Sigma = I and tau2 = 1: posterior of y given w is N(w/2, I/2)
  std::vector<FactorColumn> cols;
  for (int i = 0; i < 6; ++i) cols.push_back({{}, Vector(0), 1.0});
  const SparseICF f(std::move(cols), {});
  Matrix w(1, 6);
  w << 2.0, -1.0, 0.5, 3.0, -2.5, 1.5;

  Rng rng(5);
  const int draws = 40000;
  Matrix mean = Matrix::Zero(1, 6);
  Matrix sq = Matrix::Zero(1, 6);
  for (int s = 0; s < draws; ++s) {
    const Matrix y = sample_latent_fields(f, w, 1.0, rng);
    mean += y;
    sq += y.cwiseProduct(y);
  }
  mean /= draws;
  sq /= draws;
  for (int i = 0; i < 6; ++i) {
    const double se = std::sqrt(0.5 / draws);
    EXPECT_NEAR(mean(0, i), w(0, i) / 2.0, 3.0 * se);
    EXPECT_NEAR(sq(0, i) - mean(0, i) * mean(0, i), 0.5, 0.02);
  }
}

TEST(GibbsNoisy, TwoSiteToyMatchesQuadratureOracle) {
  // fixed theta, fixed tau2, n = 2, N = 1: the Gibbs kernel (factor draw +
  // latent draw) must leave p(y | w) invariant; the oracle integrates
  // N(w; y, tau2 I) * p(y) over a 2-D grid, with p(y) the product of the
  // NIG-marginal t densities implied by the prior
  Matrix c(2, 2);
  c << 0.3, 0.3, 0.7, 0.7;
  const LocationSet locs(std::move(c));
  const auto geom = build_geometry(locs, DistanceMetric::euclidean(), 1);
  const Hyperparameters theta(1.5, 1.0, 0.5);
  const double tau2 = 0.5;
  Matrix w(1, 2);
  w << 1.2, -0.4;
  const Matrix w_ordered = permute_columns(w, geom.perm);

  const double f1 = 1.0 - std::exp(-theta.theta2() * std::pow(1.0, -0.5));
  const double f2 = 1.0 - std::exp(-theta.theta2() * std::pow(2.0, -0.5));
  const double beta1 = 5.0 * theta.theta1() * f1;
  const double beta2 = 5.0 * theta.theta1() * f2;
  const double v21 = std::exp(-theta.theta3()) / (theta.theta1() * f2);
  auto log_prior_y = [&](double y1, double y2) {
    // ordered columns: y1 is the first ordered site, y2 regresses on it
    const Matrix s1 = Matrix::Constant(1, 1, beta1 / 6.0);
    const Matrix s2 = Matrix::Constant(1, 1, (beta2 / 6.0) * (1.0 + y1 * y1 * v21));
    return testutil::mvt_logpdf(Vector::Constant(1, y1), 12.0, s1) +
           testutil::mvt_logpdf(Vector::Constant(1, y2), 12.0, s2);
  };
  auto log_post = [&](double y1, double y2) {
    const double r1 = w_ordered(0, 0) - y1;
    const double r2 = w_ordered(0, 1) - y2;
    return -0.5 * (r1 * r1 + r2 * r2) / tau2 - std::log(2.0 * M_PI * tau2) +
           log_prior_y(y1, y2);
  };

  // quadrature moments on a wide grid
  const int grid = 601;
  const double lo = -6.0, hi = 6.0, h = (hi - lo) / (grid - 1);
  double z = 0.0, m1 = 0.0, m2 = 0.0, s11 = 0.0, s22 = 0.0;
  for (int a = 0; a < grid; ++a)
    for (int b = 0; b < grid; ++b) {
      const double y1 = lo + a * h, y2 = lo + b * h;
      const double p = std::exp(log_post(y1, y2));
      z += p;
      m1 += p * y1;
      m2 += p * y2;
      s11 += p * y1 * y1;
      s22 += p * y2 * y2;
    }
  m1 /= z;
  m2 /= z;
  s11 = s11 / z - m1 * m1;
  s22 = s22 / z - m2 * m2;

  // long Gibbs run over the same kernel with fixed theta
  Rng rng(2024);
  Matrix y_state = w_ordered;
  const int sweeps = 40000, burn = 2000;
  Vector chain1(sweeps - burn), chain2(sweeps - burn);
  for (int s = 0; s < sweeps; ++s) {
    const SparseICF factor =
        sample_factor(y_state, geom, theta, 2, rng.substream(static_cast<std::uint64_t>(s)));
    Matrix y_orig = sample_latent_fields(factor, w, tau2, rng);
    y_state = permute_columns(y_orig, geom.perm);
    if (s >= burn) {
      chain1[s - burn] = y_state(0, 0);
      chain2[s - burn] = y_state(0, 1);
    }
  }
  const double ess1 = effective_sample_size(chain1);
  const double ess2 = effective_sample_size(chain2);
  const double se1 = std::sqrt(s11 / ess1);
  const double se2 = std::sqrt(s22 / ess2);
  EXPECT_NEAR(chain1.mean(), m1, 3.0 * se1);
  EXPECT_NEAR(chain2.mean(), m2, 3.0 * se2);
}

TEST(GibbsNoisy, EndToEndRunsAndRecovers) {
  // small smoke of the full sampler: latent mean should be closer to the true
  // field than the raw noisy data, and tau2 should land near the truth
  const auto locs = random_locs(80, 15);
  const auto geom = build_geometry(locs, DistanceMetric::euclidean(), 15);
  const Matrix sigma = build_covariance(Matern{3.0, 0.3, 1.0}, locs);
  const Matrix y_true = simulate_replicates(sigma, 20, 41);
  const double tau = 0.5;
  Matrix w = y_true;
  Rng noise_rng(42);
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) += tau * noise_rng.normal();

  GibbsConfig config;
  config.n_sweeps = 150;
  config.n_burn = 50;
  config.seed = 7;
  config.init_tau2 = 1.0;
  const auto res = gibbs_noisy(w, geom, 2, NoiseModel::unknown(), config);

  ASSERT_EQ(static_cast<int>(res.tau2_chain.size()), 100);
  double tau2_mean = 0.0;
  for (double t : res.tau2_chain) tau2_mean += t;
  tau2_mean /= static_cast<double>(res.tau2_chain.size());
  EXPECT_GT(tau2_mean, 0.1);
  EXPECT_LT(tau2_mean, 0.6);

  const double err_raw = (w - y_true).squaredNorm();
  const double err_smoothed = (res.latent_mean - y_true).squaredNorm();
  EXPECT_LT(err_smoothed, err_raw);
}
