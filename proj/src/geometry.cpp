#include "cholcov/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cholcov/parallel.hpp"

namespace cholcov {

LocationSet::LocationSet(Matrix c) : coords(std::move(c)) {
  if (coords.rows() < 1 || coords.cols() < 1)
    throw Error("LocationSet requires at least one site and one dimension");
  if (!coords.allFinite()) throw Error("LocationSet coordinates must be finite");
}

double LocationSet::max_pairwise_distance() const {
  const int n = size();
  double best = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) best = std::max(best, distance(i, j));
  return best;
}

DistanceMetric DistanceMetric::correlation(Matrix r) {
  if (r.rows() != r.cols()) throw Error("correlation matrix must be square");
  const int n = static_cast<int>(r.rows());
  for (int i = 0; i < n; ++i) {
    if (std::abs(r(i, i) - 1.0) > 1e-12)
      throw Error("correlation matrix must have unit diagonal");
    for (int j = 0; j < i; ++j) {
      if (std::abs(r(i, j) - r(j, i)) > 1e-12)
        throw Error("correlation matrix must be symmetric");
      if (std::abs(r(i, j)) > 1.0 + 1e-12)
        throw Error("correlation entries must lie in [-1, 1]");
    }
  }
  DistanceMetric m;
  m.is_correlation_ = true;
  m.corr_ = std::move(r);
  return m;
}

namespace {

// Seed of the maximin ordering: centroid-closest site for Euclidean distance,
// max total |R| row sum for correlation distance. Ties toward lower index.
int pick_seed(const LocationSet& locs, const DistanceMetric& metric) {
  const int n = locs.size();
  if (metric.is_correlation()) {
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const double score = metric.corr().row(i).cwiseAbs().sum();
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    return best;
  }
  const Eigen::RowVectorXd centroid = locs.coords.colwise().mean();
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double d = (locs.coords.row(i) - centroid).norm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

std::vector<int> maximin_order(const LocationSet& locs, const DistanceMetric& metric) {
  const int n = locs.size();
  if (metric.is_correlation() && metric.corr().rows() != n)
    throw Error("correlation matrix size does not match the location set");

  std::vector<int> perm;
  perm.reserve(static_cast<std::size_t>(n));
  std::vector<bool> selected(static_cast<std::size_t>(n), false);
  std::vector<double> min_dist(static_cast<std::size_t>(n),
                               std::numeric_limits<double>::infinity());

  int current = pick_seed(locs, metric);
  for (int k = 0; k < n; ++k) {
    perm.push_back(current);
    selected[static_cast<std::size_t>(current)] = true;
    int next = -1;
    double best = -1.0;
    for (int j = 0; j < n; ++j) {
      if (selected[static_cast<std::size_t>(j)]) continue;
      const double d = metric(locs, j, current);
      auto& mj = min_dist[static_cast<std::size_t>(j)];
      if (d < mj) mj = d;
      if (mj > best) {  // strict: ties keep the smallest original index
        best = mj;
        next = j;
      }
    }
    if (next < 0) break;
    if (best <= 0.0)
      throw DuplicateLocation("two locations coincide under the active metric");
    current = next;
  }
  return perm;
}

std::vector<std::vector<int>> conditioning_sets(const LocationSet& locs,
                                                const std::vector<int>& perm,
                                                const DistanceMetric& metric, int m_max,
                                                int n_threads) {
  const int n = static_cast<int>(perm.size());
  if (m_max < 1) throw Error("m_max must be at least 1");
  std::vector<std::vector<int>> sets(static_cast<std::size_t>(n));
  parallel_for(n, n_threads, [&](int k) {
    const int take = std::min(m_max, k);
    if (take == 0) return;
    std::vector<std::pair<double, int>> cand;
    cand.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j)
      cand.emplace_back(metric(locs, perm[static_cast<std::size_t>(k)],
                               perm[static_cast<std::size_t>(j)]),
                        j);
    std::partial_sort(cand.begin(), cand.begin() + take, cand.end());
    auto& g = sets[static_cast<std::size_t>(k)];
    g.reserve(static_cast<std::size_t>(take));
    for (int j = 0; j < take; ++j) g.push_back(cand[static_cast<std::size_t>(j)].second);
  });
  return sets;
}

std::vector<std::vector<int>> truncate_sets(const OrderedGeometry& geometry, int m) {
  if (m < 1) throw TruncationError("m must be at least 1");
  if (m > geometry.m_max)
    throw TruncationError("m exceeds the m_max the geometry was built with");
  std::vector<std::vector<int>> sets(geometry.neighbors.size());
  for (std::size_t i = 0; i < geometry.neighbors.size(); ++i) {
    const auto& g = geometry.neighbors[i];
    const auto take = std::min<std::size_t>(static_cast<std::size_t>(m), g.size());
    sets[i].assign(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return sets;
}

OrderedGeometry build_geometry(const LocationSet& locs, const DistanceMetric& metric,
                               int m_max, int n_threads) {
  OrderedGeometry geom;
  geom.perm = maximin_order(locs, metric);
  geom.inv_perm.assign(geom.perm.size(), 0);
  for (std::size_t k = 0; k < geom.perm.size(); ++k)
    geom.inv_perm[static_cast<std::size_t>(geom.perm[k])] = static_cast<int>(k);
  geom.neighbors = conditioning_sets(locs, geom.perm, metric, m_max, n_threads);
  geom.m_max = m_max;
  return geom;
}

Matrix prior_correlation_guess(const Matrix& y, const LocationSet& locs) {
  const int n_rep = static_cast<int>(y.rows());
  const int n = static_cast<int>(y.cols());
  if (n_rep < 2) throw InsufficientReplicates("correlation guess needs at least 2 replicates");
  if (n != locs.size()) throw Error("data column count does not match the location set");

  const Eigen::RowVectorXd mean = y.colwise().mean();
  const Matrix centered = y.rowwise() - mean;
  const Eigen::RowVectorXd sd = centered.colwise().norm();

  const double rho = locs.max_pairwise_distance() / 2.0;
  if (rho <= 0.0) throw Error("correlation guess needs at least two distinct locations");

  Matrix r(n, n);
  for (int i = 0; i < n; ++i) {
    r(i, i) = 1.0;
    for (int j = 0; j < i; ++j) {
      double c = 0.0;
      if (sd[i] > 0.0 && sd[j] > 0.0)
        c = centered.col(i).dot(centered.col(j)) / (sd[i] * sd[j]);
      c = std::clamp(c, -1.0, 1.0);
      const double v = c * std::exp(-locs.distance(i, j) / rho);
      r(i, j) = v;
      r(j, i) = v;
    }
  }
  return r;
}

Matrix permute_columns(const Matrix& y, const std::vector<int>& perm) {
  Matrix out(y.rows(), y.cols());
  if (static_cast<std::size_t>(y.cols()) != perm.size())
    throw GeometryMismatch("permutation length does not match the column count");
  for (std::size_t k = 0; k < perm.size(); ++k)
    out.col(static_cast<Eigen::Index>(k)) = y.col(perm[k]);
  return out;
}

}  // namespace cholcov
