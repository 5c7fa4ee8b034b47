#include "cholcov/fit.hpp"

#include "cholcov/parallel.hpp"

namespace cholcov {

namespace {

template <typename ColumnDraw>
SparseICF build_factor(const Matrix& y_ordered, const OrderedGeometry& geometry,
                       const Hyperparameters& theta, int p, int n_threads,
                       ColumnDraw&& draw) {
  const int n = geometry.size();
  if (y_ordered.cols() != n)
    throw GeometryMismatch("data column count does not match the geometry");
  const int m = select_m(theta.theta3(), geometry.m_max);
  std::vector<FactorColumn> columns(static_cast<std::size_t>(n));
  parallel_for(n, n_threads, [&](int i) {
    const auto& g_full = geometry.neighbors[static_cast<std::size_t>(i)];
    const auto m_i = std::min<std::size_t>(static_cast<std::size_t>(m), g_full.size());
    std::vector<int> g(g_full.begin(), g_full.begin() + static_cast<std::ptrdiff_t>(m_i));
    const ColumnRegression reg = extract_regression(y_ordered, g, i);
    const ColumnPrior prior = column_prior(i + 1, theta, p, static_cast<int>(m_i));
    const ColumnPosterior post = nig_posterior(reg, prior);
    auto [u, d] = draw(post, i);
    columns[static_cast<std::size_t>(i)] = {std::move(g), std::move(u), d};
  });
  return SparseICF(std::move(columns), geometry.perm);
}

}  // namespace

SparseICF map_factor(const Matrix& y_ordered, const OrderedGeometry& geometry,
                     const Hyperparameters& theta, int p, MapConvention convention,
                     int n_threads) {
  return build_factor(y_ordered, geometry, theta, p, n_threads,
                      [&](const ColumnPosterior& post, int) { return column_map(post, convention); });
}

SparseICF sample_factor(const Matrix& y_ordered, const OrderedGeometry& geometry,
                        const Hyperparameters& theta, int p, const Rng& rng,
                        int n_threads) {
  return build_factor(y_ordered, geometry, theta, p, n_threads,
                      [&](const ColumnPosterior& post, int i) {
                        Rng column_rng = rng.substream(static_cast<std::uint64_t>(i));
                        return column_sample(post, column_rng);
                      });
}

}  // namespace cholcov
