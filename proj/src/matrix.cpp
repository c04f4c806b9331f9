#include "pnred/matrix.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace pnred {

namespace {

// Largest single term dividing every entry (exponents taken as minima,
// exponential factor only when shared by all terms, rational content).
Expr common_factor(const std::vector<Expr>& entries) {
  std::map<VarId, int> min_exp;
  bool first = true;
  std::optional<LinearForm> shared_lin;
  bool lin_shared = true;
  mpz_class num_gcd = 0;
  mpz_class den_lcm = 1;
  for (const auto& e : entries) {
    for (const auto& t : e.terms()) {
      std::map<VarId, int> exps(t.mono.begin(), t.mono.end());
      if (first) {
        min_exp = exps;
        shared_lin = t.lin;
        first = false;
      } else {
        for (auto& [v, m] : min_exp) {
          auto it = exps.find(v);
          m = std::min(m, it == exps.end() ? 0 : it->second);
        }
        for (const auto& [v, m] : exps) {
          if (!min_exp.count(v)) min_exp[v] = std::min(0, m);
        }
        if (lin_shared && !(t.lin == *shared_lin)) lin_shared = false;
      }
      mpz_class n = abs(t.coef.get_num());
      mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), n.get_mpz_t());
      mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), t.coef.get_den().get_mpz_t());
    }
  }
  if (first) return Expr(1);
  Term f;
  f.coef = Rational(num_gcd, den_lcm);
  f.coef.canonicalize();
  if (f.coef == 0) f.coef = 1;
  for (const auto& [v, m] : min_exp) {
    if (m != 0) f.mono.emplace_back(v, m);
  }
  if (lin_shared && shared_lin) f.lin = *shared_lin;
  return Expr::from_terms({f});
}

void strip_common_factor(std::vector<Expr>& row) {
  bool any = false;
  for (const auto& e : row) any = any || !e.is_zero();
  if (!any) return;
  Expr inv = common_factor(row).inverse();
  for (auto& e : row) e = e * inv;
}

}  // namespace

std::optional<Matrix<Expr>> try_divide(const Matrix<Expr>& m, const Expr& d) {
  Matrix<Expr> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      auto q = m(i, j).try_divide(d);
      if (!q) return std::nullopt;
      out(i, j) = *q;
    }
  }
  return out;
}

SymbolicInverse symbolic_inverse(const Matrix<Expr>& m) {
  SymbolicInverse inv;
  inv.numerator = adjugate(m);
  inv.denominator = determinant(m);
  if (!inv.denominator.is_zero()) inv.exact = try_divide(inv.numerator, inv.denominator);
  return inv;
}

std::vector<std::vector<Expr>> symbolic_kernel(const Matrix<Expr>& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  std::vector<std::vector<Expr>> a(rows);
  for (std::size_t i = 0; i < rows; ++i) a[i] = m.row(i);
  std::vector<std::size_t> pivot_col;  // indexed by pivot rank
  std::vector<std::size_t> pivot_row;
  std::vector<bool> used(rows, false);
  for (std::size_t c = 0; c < cols; ++c) {
    std::size_t best = rows;
    for (std::size_t i = 0; i < rows; ++i) {
      if (used[i] || a[i][c].is_zero()) continue;
      if (best == rows || a[i][c].size() < a[best][c].size()) best = i;
    }
    if (best == rows) continue;
    used[best] = true;
    pivot_col.push_back(c);
    pivot_row.push_back(best);
    const Expr p = a[best][c];
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == best || a[i][c].is_zero()) continue;
      const Expr f = a[i][c];
      for (std::size_t j = 0; j < cols; ++j) a[i][j] = p * a[i][j] - f * a[best][j];
      strip_common_factor(a[i]);
    }
  }
  std::vector<std::vector<Expr>> kernel;
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t c : pivot_col) is_pivot[c] = true;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Expr> v(cols);
    Expr all(1);
    for (std::size_t k = 0; k < pivot_row.size(); ++k) all *= a[pivot_row[k]][pivot_col[k]];
    v[f] = all;
    for (std::size_t k = 0; k < pivot_row.size(); ++k) {
      const auto& row = a[pivot_row[k]];
      if (row[f].is_zero()) continue;
      Expr others(1);
      for (std::size_t l = 0; l < pivot_row.size(); ++l) {
        if (l != k) others *= a[pivot_row[l]][pivot_col[l]];
      }
      v[pivot_col[k]] = -row[f] * others;
    }
    kernel.push_back(normalize_vector(v));
  }
  return kernel;
}

std::vector<Expr> normalize_vector(const std::vector<Expr>& v) {
  std::vector<Expr> out = v;
  strip_common_factor(out);
  for (const auto& e : out) {
    if (e.is_zero()) continue;
    std::string s = e.str();
    if (!s.empty() && s[0] == '-') {
      for (auto& x : out) x = -x;
    }
    break;
  }
  return out;
}

bool proportional(const std::vector<Expr>& a, const std::vector<Expr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if (!(a[i] * b[j] - a[j] * b[i]).is_zero()) return false;
    }
  }
  return true;
}

std::optional<std::vector<Expr>> solve_exact(const Matrix<Expr>& m, const std::vector<Expr>& v) {
  const std::size_t r = m.rows();
  const std::size_t s = m.cols();
  if (v.size() != r) throw std::invalid_argument("solve_exact: shape mismatch");
  if (s == 0) {
    for (const auto& e : v) {
      if (!e.is_zero()) return std::nullopt;
    }
    return std::vector<Expr>{};
  }
  std::vector<std::size_t> cols(s);
  for (std::size_t j = 0; j < s; ++j) cols[j] = j;
  // Try row subsets, preferring minors whose determinant is a single term.
  std::optional<std::vector<std::size_t>> fallback;
  std::optional<std::vector<std::size_t>> chosen;
  std::vector<int> sel(r, 0);
  std::fill(sel.end() - static_cast<std::ptrdiff_t>(std::min(s, r)), sel.end(), 1);
  do {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < r; ++i) {
      if (sel[i]) rows.push_back(i);
    }
    if (rows.size() != s) break;
    Expr det = minor_determinant(m, rows, cols);
    if (det.is_zero()) continue;
    if (det.is_single_term()) {
      chosen = rows;
      break;
    }
    if (!fallback) fallback = rows;
  } while (std::next_permutation(sel.begin(), sel.end()));
  if (!chosen) chosen = fallback;
  if (!chosen) return std::nullopt;
  Matrix<Expr> sub(s, s);
  std::vector<Expr> rhs(s);
  for (std::size_t a = 0; a < s; ++a) {
    for (std::size_t b = 0; b < s; ++b) sub(a, b) = m((*chosen)[a], b);
    rhs[a] = v[(*chosen)[a]];
  }
  SymbolicInverse inv = symbolic_inverse(sub);
  std::vector<Expr> numer = inv.numerator.apply(rhs);
  std::vector<Expr> c(s);
  for (std::size_t a = 0; a < s; ++a) {
    auto q = numer[a].try_divide(inv.denominator);
    if (!q) return std::nullopt;
    c[a] = *q;
  }
  std::vector<Expr> check = m.apply(c);
  for (std::size_t i = 0; i < r; ++i) {
    if (check[i] != v[i]) return std::nullopt;
  }
  return c;
}

std::string to_string(const std::vector<Expr>& v) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i].str();
  os << "]";
  return os.str();
}

std::string to_string(const Matrix<Expr>& m) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < m.rows(); ++i) os << (i ? ", " : "") << to_string(m.row(i));
  os << "]";
  return os.str();
}

}  // namespace pnred
