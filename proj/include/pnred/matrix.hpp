#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pnred/jet.hpp"
#include "pnred/symexpr.hpp"

namespace pnred {

inline bool is_exact_zero(const Expr& e) { return e.is_zero(); }
inline bool is_exact_zero(const Jet& j) { return j.exactly_zero(); }
inline bool is_exact_zero(double d) { return d == 0.0; }

// Dense row-major matrix over a commutative ring (Expr, Jet or double).
template <class S>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  S& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const S& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<S> row(std::size_t i) const {
    return std::vector<S>(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                          data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
  }
  std::vector<S> col(std::size_t j) const {
    std::vector<S> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    }
    return t;
  }

  template <class F>
  auto map(F&& f) const -> Matrix<decltype(f(std::declval<const S&>()))> {
    Matrix<decltype(f(std::declval<const S&>()))> out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) out(i, j) = f((*this)(i, j));
    }
    return out;
  }

  bool is_zero() const {
    for (const auto& v : data_) {
      if (!is_exact_zero(v)) return false;
    }
    return true;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }
  friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    check_same(a, b);
    Matrix out(a.rows_, a.cols_);
    for (std::size_t k = 0; k < a.data_.size(); ++k) out.data_[k] = a.data_[k] + b.data_[k];
    return out;
  }
  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    check_same(a, b);
    Matrix out(a.rows_, a.cols_);
    for (std::size_t k = 0; k < a.data_.size(); ++k) out.data_[k] = a.data_[k] - b.data_[k];
    return out;
  }
  friend Matrix operator-(const Matrix& a) {
    Matrix out(a.rows_, a.cols_);
    for (std::size_t k = 0; k < a.data_.size(); ++k) out.data_[k] = -a.data_[k];
    return out;
  }
  friend Matrix operator*(const S& s, const Matrix& a) {
    Matrix out(a.rows_, a.cols_);
    for (std::size_t k = 0; k < a.data_.size(); ++k) out.data_[k] = s * a.data_[k];
    return out;
  }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product shape mismatch");
    Matrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const S& aik = a(i, k);
        if (is_exact_zero(aik)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) {
          const S& bkj = b(k, j);
          if (is_exact_zero(bkj)) continue;
          out(i, j) = out(i, j) + aik * bkj;
        }
      }
    }
    return out;
  }

  std::vector<S> apply(const std::vector<S>& v) const {
    if (v.size() != cols_) throw std::invalid_argument("matrix-vector shape mismatch");
    std::vector<S> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) {
        if (is_exact_zero((*this)(i, j)) || is_exact_zero(v[j])) continue;
        out[i] = out[i] + (*this)(i, j) * v[j];
      }
    }
    return out;
  }

 private:
  static void check_same(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<S> data_;
};

// Determinant of the submatrix on the given rows and columns by Laplace
// expansion memoised over column subsets. Uses ring operations only.
template <class S>
S minor_determinant(const Matrix<S>& m, const std::vector<std::size_t>& rows,
                    const std::vector<std::size_t>& cols) {
  const std::size_t k = rows.size();
  if (k != cols.size()) throw std::invalid_argument("minor must be square");
  if (k == 0) return S(1);
  if (k > 20) throw std::invalid_argument("matrix too large for subset expansion");
  std::vector<S> dp(std::size_t{1} << k);
  dp[0] = S(1);
  for (std::size_t mask = 1; mask < dp.size(); ++mask) {
    std::size_t t = static_cast<std::size_t>(__builtin_popcountll(mask)) - 1;
    S acc{};
    std::size_t pos = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if (!(mask & (std::size_t{1} << j))) continue;
      const S& entry = m(rows[t], cols[j]);
      const S& sub = dp[mask ^ (std::size_t{1} << j)];
      if (!is_exact_zero(entry) && !is_exact_zero(sub)) {
        if ((t + pos) % 2) acc = acc - entry * sub;
        else acc = acc + entry * sub;
      }
      ++pos;
    }
    dp[mask] = acc;
  }
  return dp.back();
}

template <class S>
S determinant(const Matrix<S>& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
  std::vector<std::size_t> idx(m.rows());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return minor_determinant(m, idx, idx);
}

template <class S>
Matrix<S> adjugate(const Matrix<S>& m) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw std::invalid_argument("adjugate of non-square matrix");
  Matrix<S> adj(n, n);
  if (n == 1) {
    adj(0, 0) = S(1);
    return adj;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<std::size_t> rows, cols;
      for (std::size_t r = 0; r < n; ++r) {
        if (r != i) rows.push_back(r);
      }
      for (std::size_t c = 0; c < n; ++c) {
        if (c != j) cols.push_back(c);
      }
      S minor = minor_determinant(m, rows, cols);
      adj(j, i) = (i + j) % 2 ? S(-minor) : minor;
    }
  }
  return adj;
}

template <class S>
Matrix<S> matrix_power(const Matrix<S>& m, int exponent) {
  if (exponent < 0) throw std::invalid_argument("negative matrix power");
  Matrix<S> out = Matrix<S>::identity(m.rows());
  for (int l = 0; l < exponent; ++l) out = out * m;
  return out;
}

// Inverse of a symbolic matrix as numerator / denominator with the
// numerator = adjugate. `exact` is filled when every entry divides exactly.
struct SymbolicInverse {
  Matrix<Expr> numerator;
  Expr denominator;
  std::optional<Matrix<Expr>> exact;
};

SymbolicInverse symbolic_inverse(const Matrix<Expr>& m);

// Divides every entry by d; nullopt unless all divisions are exact.
std::optional<Matrix<Expr>> try_divide(const Matrix<Expr>& m, const Expr& d);

// Kernel of a symbolic matrix over the field of fractions, returned as
// vectors with entries in the expression class, common single-term factors
// removed. Generic rank: pivots are decided by exact zero tests.
std::vector<std::vector<Expr>> symbolic_kernel(const Matrix<Expr>& m);

// Solves m * c = v exactly for a matrix of full column rank; nullopt when no
// solution exists or when it would need division by a non-monomial.
std::optional<std::vector<Expr>> solve_exact(const Matrix<Expr>& m, const std::vector<Expr>& v);

// Scales a vector by the inverse of its common single-term factor and its
// rational content; sign fixed so the first nonzero entry leads positively.
std::vector<Expr> normalize_vector(const std::vector<Expr>& v);

// True when a and b are proportional over the field of fractions.
bool proportional(const std::vector<Expr>& a, const std::vector<Expr>& b);

std::string to_string(const std::vector<Expr>& v);
std::string to_string(const Matrix<Expr>& m);

}  // namespace pnred
