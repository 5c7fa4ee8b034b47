#include "cholcov/assembly.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <fstream>

#include "cholcov/io.hpp"

namespace cholcov {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

std::vector<int> identity_perm(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
  return p;
}

}  // namespace

SparseICF::SparseICF(std::vector<FactorColumn> columns, std::vector<int> perm)
    : columns_(std::move(columns)), perm_(std::move(perm)) {
  const int n = static_cast<int>(columns_.size());
  if (n == 0) throw InvalidFactor("factor needs at least one column");
  if (perm_.empty()) perm_ = identity_perm(n);
  if (static_cast<int>(perm_.size()) != n)
    throw InvalidFactor("permutation length does not match the column count");
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int v : perm_) {
    if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)])
      throw InvalidFactor("perm is not a permutation");
    seen[static_cast<std::size_t>(v)] = true;
  }
  for (int i = 0; i < n; ++i) {
    const auto& col = columns_[static_cast<std::size_t>(i)];
    if (!(col.d > 0.0) || !std::isfinite(col.d))
      throw InvalidFactor("diagonal entries must be positive and finite");
    if (col.u.size() != static_cast<Eigen::Index>(col.g.size()))
      throw InvalidFactor("column values and index set differ in length");
    std::vector<bool> used(static_cast<std::size_t>(i), false);
    for (int r : col.g) {
      if (r < 0 || r >= i) throw InvalidFactor("off-diagonal row index must precede the column");
      if (used[static_cast<std::size_t>(r)]) throw InvalidFactor("duplicate row index in a column");
      used[static_cast<std::size_t>(r)] = true;
    }
    if (!col.u.allFinite()) throw InvalidFactor("factor values must be finite");
  }
}

SparseICF assemble(std::vector<FactorColumn> columns, std::vector<int> perm) {
  return SparseICF(std::move(columns), std::move(perm));
}

std::int64_t SparseICF::nonzero_count() const {
  std::int64_t count = size();  // unit diagonal
  for (const auto& col : columns_) count += static_cast<std::int64_t>(col.g.size());
  return count;
}

Vector SparseICF::solve_upper_transposed(const Vector& rhs) const {
  // (U' x)_i = x_i + sum_j u_i(j) x_{g_i(j)}; forward substitution
  const int n = size();
  Vector x(n);
  for (int i = 0; i < n; ++i) {
    double acc = rhs[i];
    const auto& col = columns_[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < col.g.size(); ++j)
      acc -= col.u[static_cast<Eigen::Index>(j)] * x[col.g[j]];
    x[i] = acc;
  }
  return x;
}

Vector SparseICF::solve_upper(const Vector& rhs) const {
  // column sweep: once x_j is final, eliminate it from the rows in g(j)
  const int n = size();
  Vector x = rhs;
  for (int j = n - 1; j >= 0; --j) {
    const auto& col = columns_[static_cast<std::size_t>(j)];
    const double xj = x[j];
    for (std::size_t k = 0; k < col.g.size(); ++k)
      x[col.g[k]] -= col.u[static_cast<Eigen::Index>(k)] * xj;
  }
  return x;
}

Matrix SparseICF::dense_covariance(int dense_limit) const {
  const int n = size();
  if (n > dense_limit)
    throw DenseLimitExceeded("dense covariance assembly is limited to n <= " +
                             std::to_string(dense_limit));
  Matrix sigma_ordered(n, n);
  Vector e = Vector::Zero(n);
  for (int k = 0; k < n; ++k) {
    e[k] = 1.0;
    Vector w = solve_upper(e);
    for (int i = 0; i < n; ++i) w[i] *= columns_[static_cast<std::size_t>(i)].d;
    sigma_ordered.col(k) = solve_upper_transposed(w);
    e[k] = 0.0;
  }
  sigma_ordered = 0.5 * (sigma_ordered + sigma_ordered.transpose()).eval();
  Matrix sigma(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) sigma(perm_[static_cast<std::size_t>(a)],
                                      perm_[static_cast<std::size_t>(b)]) = sigma_ordered(a, b);
  return sigma;
}

Vector SparseICF::sample_field(Rng& rng) const {
  const int n = size();
  Vector rhs(n);
  for (int i = 0; i < n; ++i)
    rhs[i] = std::sqrt(columns_[static_cast<std::size_t>(i)].d) * rng.normal();
  const Vector y_ordered = solve_upper_transposed(rhs);
  Vector y(n);
  for (int k = 0; k < n; ++k) y[perm_[static_cast<std::size_t>(k)]] = y_ordered[k];
  return y;
}

Matrix SparseICF::linear_comb_cov(const Matrix& h) const {
  const int n = size();
  const auto k = h.rows();
  if (h.cols() != n) throw GeometryMismatch("H column count must equal the factor size");
  Matrix a(n, k);  // A = D^{1/2} U^{-1} H'
  for (Eigen::Index r = 0; r < k; ++r) {
    Vector h_ordered(n);
    for (int i = 0; i < n; ++i) h_ordered[i] = h(r, perm_[static_cast<std::size_t>(i)]);
    Vector x = solve_upper(h_ordered);
    for (int i = 0; i < n; ++i) x[i] *= std::sqrt(columns_[static_cast<std::size_t>(i)].d);
    a.col(r) = x;
  }
  return a.transpose() * a;
}

void SparseICF::save(const std::string& u_path, const std::string& d_path) const {
  std::ofstream u_file(u_path);
  if (!u_file) throw IoError("cannot open " + u_path + " for writing");
  u_file << "row,col,value\n";
  for (int i = 0; i < size(); ++i) {
    const auto& col = columns_[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < col.g.size(); ++j)
      u_file << (col.g[j] + 1) << ',' << (i + 1) << ','
             << format_double(col.u[static_cast<Eigen::Index>(j)]) << '\n';
  }
  std::ofstream d_file(d_path);
  if (!d_file) throw IoError("cannot open " + d_path + " for writing");
  d_file << "ordered_index,original_index,d\n";
  for (int i = 0; i < size(); ++i)
    d_file << (i + 1) << ',' << (perm_[static_cast<std::size_t>(i)] + 1) << ','
           << format_double(columns_[static_cast<std::size_t>(i)].d) << '\n';
}

SparseICF SparseICF::load(const std::string& u_path, const std::string& d_path) {
  const Matrix d_table = read_matrix_csv(d_path);
  const int n = static_cast<int>(d_table.rows());
  std::vector<FactorColumn> columns(static_cast<std::size_t>(n));
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int ordered = static_cast<int>(d_table(i, 0)) - 1;
    if (ordered < 0 || ordered >= n) throw IoError("bad ordered index in " + d_path);
    perm[static_cast<std::size_t>(ordered)] = static_cast<int>(d_table(i, 1)) - 1;
    columns[static_cast<std::size_t>(ordered)].d = d_table(i, 2);
  }
  std::vector<std::vector<double>> values(static_cast<std::size_t>(n));
  const Matrix u_table = read_matrix_csv(u_path);
  for (Eigen::Index r = 0; r < u_table.rows(); ++r) {
    const int row = static_cast<int>(u_table(r, 0)) - 1;
    const int col = static_cast<int>(u_table(r, 1)) - 1;
    if (col < 0 || col >= n) throw IoError("bad column index in " + u_path);
    columns[static_cast<std::size_t>(col)].g.push_back(row);
    values[static_cast<std::size_t>(col)].push_back(u_table(r, 2));
  }
  for (int i = 0; i < n; ++i) {
    auto& col = columns[static_cast<std::size_t>(i)];
    col.u = Eigen::Map<const Vector>(values[static_cast<std::size_t>(i)].data(),
                                     static_cast<Eigen::Index>(values[static_cast<std::size_t>(i)].size()));
  }
  return SparseICF(std::move(columns), std::move(perm));
}

double kl_divergence(const Matrix& sigma_hat, const Matrix& sigma_true) {
  const auto n = sigma_true.rows();
  if (sigma_hat.rows() != n || sigma_hat.cols() != n || sigma_true.cols() != n)
    throw Error("KL divergence needs matching square matrices");
  const Eigen::LLT<Matrix> llt_true(sigma_true);
  if (llt_true.info() != Eigen::Success)
    throw NotPositiveDefinite("true covariance is not SPD");
  const Eigen::LLT<Matrix> llt_hat(sigma_hat);
  if (llt_hat.info() != Eigen::Success)
    throw SingularEstimate("estimated covariance is not numerically SPD");

  // tr(Sigma_hat Sigma^{-1}) = ||L^{-1} L_hat||_F^2 with Sigma = LL',
  // Sigma_hat = L_hat L_hat'
  const Matrix l_hat = llt_hat.matrixL();
  const Matrix m = llt_true.matrixL().solve(l_hat);
  const double trace = m.squaredNorm();
  const double log_det_hat = 2.0 * l_hat.diagonal().array().log().sum();
  const double log_det_true =
      2.0 * llt_true.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return trace - (log_det_hat - log_det_true) - static_cast<double>(n);
}

double log_score(const Matrix& sigma_hat, const Matrix& y_test) {
  const auto n = sigma_hat.rows();
  if (y_test.cols() != n) throw Error("test data width must match the covariance");
  if (y_test.rows() == 0) throw Error("log score needs at least one test row");
  const Eigen::LLT<Matrix> llt(sigma_hat);
  if (llt.info() != Eigen::Success)
    throw SingularEstimate("estimated covariance is not numerically SPD");
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  double total = 0.0;
  for (Eigen::Index r = 0; r < y_test.rows(); ++r) {
    const Vector y = y_test.row(r);
    const double quad = y.dot(llt.solve(y));
    total += 0.5 * (static_cast<double>(n) * kLog2Pi + log_det + quad);
  }
  return total / static_cast<double>(y_test.rows());
}

}  // namespace cholcov
