#ifndef CHOLCOV_ASSEMBLY_HPP
#define CHOLCOV_ASSEMBLY_HPP

#include <cstdint>
#include <string>

#include "cholcov/geometry.hpp"
#include "cholcov/rng.hpp"

namespace cholcov {

inline constexpr int kDefaultDenseLimit = 10000;

/// Nonzeros of one ordered column of the factor: off-diagonal rows g (ordered
/// indices < i), their values u, and the diagonal d of D.
struct FactorColumn {
  std::vector<int> g;
  Vector u;
  double d;
};

/// Sparse inverse Cholesky factor: Sigma^{-1} = U D^{-1} U' with U unit-diagonal
/// upper triangular under the maximin ordering and D = diag(d) positive.
/// Immutable after construction; all operations are read-only.
class SparseICF {
 public:
  /// Validates structure (row indices < column, d > 0); throws InvalidFactor.
  SparseICF(std::vector<FactorColumn> columns, std::vector<int> perm);

  int size() const { return static_cast<int>(columns_.size()); }
  const std::vector<int>& perm() const { return perm_; }
  const FactorColumn& column(int i) const { return columns_[static_cast<std::size_t>(i)]; }
  std::int64_t nonzero_count() const;

  /// Dense Sigma in original site order, via two sparse triangular solves per
  /// column. Guarded by the dense limit (DenseLimitExceeded).
  Matrix dense_covariance(int dense_limit = kDefaultDenseLimit) const;

  /// One field draw y* = (U')^{-1} D^{1/2} z in original site order; O(n*m).
  Vector sample_field(Rng& rng) const;

  /// Covariance H Sigma H' of linear combinations (H is k x n in original site
  /// order), as A'A with A = D^{1/2} U^{-1} H'.
  Matrix linear_comb_cov(const Matrix& h) const;

  /// Triangular solves in ordered indexing (exposed for samplers/tests).
  Vector solve_upper_transposed(const Vector& rhs) const;  // U' x = rhs
  Vector solve_upper(const Vector& rhs) const;             // U  x = rhs

  void save(const std::string& u_path, const std::string& d_path) const;
  static SparseICF load(const std::string& u_path, const std::string& d_path);

 private:
  std::vector<FactorColumn> columns_;
  std::vector<int> perm_;
};

/// Named constructor mirroring the factor-assembly operation.
SparseICF assemble(std::vector<FactorColumn> columns, std::vector<int> perm);

/// Exclusive KL divergence between zero-mean Gaussians:
/// tr(Sigma_hat Sigma^{-1}) - log|Sigma_hat Sigma^{-1}| - n. Throws
/// SingularEstimate when sigma_hat is not numerically SPD.
double kl_divergence(const Matrix& sigma_hat, const Matrix& sigma_true);

/// Average negative log density of the test rows under N(0, sigma_hat); one
/// Cholesky of sigma_hat. Throws SingularEstimate when not SPD.
double log_score(const Matrix& sigma_hat, const Matrix& y_test);

}  // namespace cholcov

#endif  // CHOLCOV_ASSEMBLY_HPP
