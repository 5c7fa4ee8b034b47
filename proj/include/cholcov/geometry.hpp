#ifndef CHOLCOV_GEOMETRY_HPP
#define CHOLCOV_GEOMETRY_HPP

#include <Eigen/Dense>
#include <vector>

#include "cholcov/errors.hpp"

namespace cholcov {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// n spatial sites in p dimensions; one row per site.
struct LocationSet {
  Matrix coords;

  LocationSet() = default;
  explicit LocationSet(Matrix c);

  int size() const { return static_cast<int>(coords.rows()); }
  int dim() const { return static_cast<int>(coords.cols()); }

  double distance(int i, int j) const { return (coords.row(i) - coords.row(j)).norm(); }
  double max_pairwise_distance() const;
};

/// Distance used for ordering and neighbor selection: plain Euclidean, or a
/// correlation distance d(i,j) = (1 - |R_ij|)^{1/2} driven by an n x n
/// correlation matrix (useful for anisotropic/nonstationary fields).
class DistanceMetric {
 public:
  static DistanceMetric euclidean() { return DistanceMetric(); }
  static DistanceMetric correlation(Matrix r);

  bool is_correlation() const { return is_correlation_; }
  const Matrix& corr() const { return corr_; }

  /// Distance between original site indices i and j.
  double operator()(const LocationSet& locs, int i, int j) const {
    if (is_correlation_) return std::sqrt(1.0 - std::abs(corr_(i, j)));
    return locs.distance(i, j);
  }

 private:
  DistanceMetric() = default;
  bool is_correlation_ = false;
  Matrix corr_;
};

/// Maximin permutation plus per-column nearest-neighbor conditioning sets.
///
/// perm[k] is the original index of the k-th ordered site (0-based); neighbors[k]
/// holds ordered indices < k, sorted nearest-first under the build metric.
struct OrderedGeometry {
  std::vector<int> perm;
  std::vector<int> inv_perm;
  std::vector<std::vector<int>> neighbors;
  int m_max = 0;

  int size() const { return static_cast<int>(perm.size()); }
};

inline constexpr int kDefaultMMax = 50;

/// Greedy maximin ordering: the seed is the centroid-closest site (Euclidean)
/// or the max |R| row-sum site (correlation); each later pick maximizes the
/// minimum distance to the already-selected set. All ties break toward the
/// smallest original index. Throws DuplicateLocation if two sites coincide
/// under the metric.
std::vector<int> maximin_order(const LocationSet& locs, const DistanceMetric& metric);

/// For each ordered position i, the min(m_max, i) previously-ordered sites
/// nearest to site i, as ordered indices, nearest-first (distance ties break
/// toward the smaller ordered index).
std::vector<std::vector<int>> conditioning_sets(const LocationSet& locs,
                                                const std::vector<int>& perm,
                                                const DistanceMetric& metric, int m_max,
                                                int n_threads = 1);

/// Length-min(m, i) prefixes of the stored conditioning sets. Throws
/// TruncationError for m > m_max.
std::vector<std::vector<int>> truncate_sets(const OrderedGeometry& geometry, int m);

/// Convenience: maximin_order + conditioning_sets in one call.
OrderedGeometry build_geometry(const LocationSet& locs, const DistanceMetric& metric,
                               int m_max = kDefaultMMax, int n_threads = 1);

/// Prior correlation guess for correlation-based ordering: elementwise product
/// of the sample correlation of Y and an isotropic exponential correlation
/// whose range is half the maximum pairwise distance. Unit diagonal; columns
/// with zero sample variance get off-diagonal correlation 0.
Matrix prior_correlation_guess(const Matrix& y, const LocationSet& locs);

/// Reorders columns of an N x n data matrix into the maximin order:
/// result.col(k) = y.col(perm[k]).
Matrix permute_columns(const Matrix& y, const std::vector<int>& perm);

}  // namespace cholcov

#endif  // CHOLCOV_GEOMETRY_HPP
