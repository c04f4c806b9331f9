#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pnred/jet.hpp"
#include "pnred/matrix.hpp"
#include "pnred/symexpr.hpp"
#include "pnred/verdict.hpp"

namespace pnred {

template <class S>
using SectionT = std::vector<S>;
using Section = SectionT<Expr>;

// Lie algebroid in a local frame: anchor(a, i) is the i-th coordinate
// component of rho(e_a) and C(a, b, c) the structure function C_ab^c with
// [e_a, e_b] = C_ab^c e_c. S is Expr for the symbolic engine or Jet for the
// pointwise numeric witness.
template <class S>
struct AlgebroidT {
  std::vector<std::string> base_vars;
  std::vector<std::string> frame;
  std::vector<VarId> base_ids;
  Matrix<S> anchor;
  std::vector<S> structure;

  std::size_t rank() const { return frame.size(); }
  std::size_t dim() const { return base_vars.size(); }

  S& C(std::size_t a, std::size_t b, std::size_t c) { return structure[(a * rank() + b) * rank() + c]; }
  const S& C(std::size_t a, std::size_t b, std::size_t c) const {
    return structure[(a * rank() + b) * rank() + c];
  }

  std::size_t frame_index(const std::string& name) const;
  std::size_t base_index(const std::string& name) const;
};

using LieAlgebroid = AlgebroidT<Expr>;

template <class S>
std::size_t AlgebroidT<S>::frame_index(const std::string& name) const {
  auto it = std::find(frame.begin(), frame.end(), name);
  if (it == frame.end()) throw std::invalid_argument("unknown frame element " + name);
  return static_cast<std::size_t>(it - frame.begin());
}

template <class S>
std::size_t AlgebroidT<S>::base_index(const std::string& name) const {
  auto it = std::find(base_vars.begin(), base_vars.end(), name);
  if (it == base_vars.end()) throw std::invalid_argument("unknown base variable " + name);
  return static_cast<std::size_t>(it - base_vars.begin());
}

// Validates shapes and that all coefficients live on the base.
LieAlgebroid make_algebroid(std::vector<std::string> base_vars, std::vector<std::string> frame,
                            Matrix<Expr> anchor, std::vector<Expr> structure);
// Empty structure functions of the right size.
std::vector<Expr> zero_structure(std::size_t rank);
// T M with the coordinate frame d_<var>.
LieAlgebroid tangent_algebroid(const std::vector<std::string>& vars);

// Jet evaluation of symbolic data at a base point (values in base order).
Jet jet_at(const Expr& e, const std::vector<VarId>& ids, const std::vector<double>& x);
Matrix<Jet> jet_at(const Matrix<Expr>& m, const std::vector<VarId>& ids, const std::vector<double>& x);
std::vector<Jet> jet_at(const std::vector<Expr>& v, const std::vector<VarId>& ids,
                        const std::vector<double>& x);
AlgebroidT<Jet> at_point(const LieAlgebroid& algebroid, const std::vector<double>& x);

inline Expr partial(const AlgebroidT<Expr>& A, const Expr& f, std::size_t i) {
  return f.diff(A.base_ids[i]);
}
inline Jet partial(const AlgebroidT<Jet>&, const Jet& f, std::size_t i) { return f.partial(i); }

// rho(e_a)(f)
template <class S>
S frame_derivative(const AlgebroidT<S>& A, std::size_t a, const S& f) {
  S out{};
  if (is_exact_zero(f)) return out;
  for (std::size_t i = 0; i < A.dim(); ++i) {
    const S& rho = A.anchor(a, i);
    if (is_exact_zero(rho)) continue;
    out = out + rho * partial(A, f, i);
  }
  return out;
}

// rho(X) as coordinate components.
template <class S>
std::vector<S> anchor_vector(const AlgebroidT<S>& A, const SectionT<S>& X) {
  std::vector<S> v(A.dim());
  for (std::size_t a = 0; a < A.rank(); ++a) {
    if (is_exact_zero(X[a])) continue;
    for (std::size_t i = 0; i < A.dim(); ++i) {
      if (!is_exact_zero(A.anchor(a, i))) v[i] = v[i] + X[a] * A.anchor(a, i);
    }
  }
  return v;
}

// rho(X)(f)
template <class S>
S anchor_apply(const AlgebroidT<S>& A, const SectionT<S>& X, const S& f) {
  S out{};
  if (is_exact_zero(f)) return out;
  std::vector<S> v = anchor_vector(A, X);
  for (std::size_t i = 0; i < A.dim(); ++i) {
    if (!is_exact_zero(v[i])) out = out + v[i] * partial(A, f, i);
  }
  return out;
}

template <class S>
SectionT<S> frame_section(const AlgebroidT<S>& A, std::size_t a) {
  SectionT<S> X(A.rank());
  X[a] = S(1);
  return X;
}

template <class S>
SectionT<S> add(const SectionT<S>& X, const SectionT<S>& Y) {
  SectionT<S> out(X.size());
  for (std::size_t a = 0; a < X.size(); ++a) out[a] = X[a] + Y[a];
  return out;
}

template <class S>
SectionT<S> sub(const SectionT<S>& X, const SectionT<S>& Y) {
  SectionT<S> out(X.size());
  for (std::size_t a = 0; a < X.size(); ++a) out[a] = X[a] - Y[a];
  return out;
}

template <class S>
SectionT<S> scale(const S& f, const SectionT<S>& X) {
  SectionT<S> out(X.size());
  for (std::size_t a = 0; a < X.size(); ++a) out[a] = f * X[a];
  return out;
}

template <class S>
bool is_zero_section(const SectionT<S>& X) {
  for (const auto& x : X) {
    if (!is_exact_zero(x)) return false;
  }
  return true;
}

// [X, Y]^c = X^a Y^b C_ab^c + rho(X)(Y^c) - rho(Y)(X^c)
template <class S>
SectionT<S> bracket(const AlgebroidT<S>& A, const SectionT<S>& X, const SectionT<S>& Y) {
  const std::size_t r = A.rank();
  SectionT<S> out(r);
  std::vector<S> rx = anchor_vector(A, X);
  std::vector<S> ry = anchor_vector(A, Y);
  for (std::size_t a = 0; a < r; ++a) {
    if (is_exact_zero(X[a])) continue;
    for (std::size_t b = 0; b < r; ++b) {
      if (is_exact_zero(Y[b])) continue;
      S xy = X[a] * Y[b];
      for (std::size_t c = 0; c < r; ++c) {
        if (!is_exact_zero(A.C(a, b, c))) out[c] = out[c] + xy * A.C(a, b, c);
      }
    }
  }
  for (std::size_t c = 0; c < r; ++c) {
    for (std::size_t i = 0; i < A.dim(); ++i) {
      if (!is_exact_zero(rx[i]) && !is_exact_zero(Y[c])) out[c] = out[c] + rx[i] * partial(A, Y[c], i);
      if (!is_exact_zero(ry[i]) && !is_exact_zero(X[c])) out[c] = out[c] - ry[i] * partial(A, X[c], i);
    }
  }
  return out;
}

template <class S>
SectionT<S> jacobiator(const AlgebroidT<S>& A, const SectionT<S>& X, const SectionT<S>& Y,
                       const SectionT<S>& Z) {
  return add(add(bracket(A, bracket(A, X, Y), Z), bracket(A, bracket(A, Y, Z), X)),
             bracket(A, bracket(A, Z, X), Y));
}

// Sign of the permutation sorting idx; 0 when an index repeats.
int sort_sign(std::vector<int>& idx);

// Calls fn on every strictly increasing tuple of length k drawn from [0, n).
void for_each_increasing(int n, int k, const std::function<void(const std::vector<int>&)>& fn);

// Alternating form of degree k on A, components on increasing frame tuples.
template <class S>
struct KFormT {
  int degree = 0;
  std::map<std::vector<int>, S> comp;

  KFormT() = default;
  explicit KFormT(int k) : degree(k) {}

  S get(std::vector<int> idx) const {
    int sign = sort_sign(idx);
    if (sign == 0) return S{};
    auto it = comp.find(idx);
    if (it == comp.end()) return S{};
    return sign > 0 ? it->second : S(-it->second);
  }

  void add(std::vector<int> idx, const S& value) {
    if (is_exact_zero(value)) return;
    int sign = sort_sign(idx);
    if (sign == 0) return;
    S& slot = comp[idx];
    slot = sign > 0 ? slot + value : slot - value;
    if (is_exact_zero(slot)) comp.erase(idx);
  }

  bool is_zero() const {
    for (const auto& [k, v] : comp) {
      if (!is_exact_zero(v)) return false;
    }
    return true;
  }
};

using KForm = KFormT<Expr>;

template <class S>
KFormT<S> function_form(const S& f) {
  KFormT<S> w(0);
  w.add({}, f);
  return w;
}

template <class S>
KFormT<S> one_form(const std::vector<S>& components) {
  KFormT<S> w(1);
  for (std::size_t a = 0; a < components.size(); ++a) w.add({static_cast<int>(a)}, components[a]);
  return w;
}

template <class S>
std::vector<S> one_form_components(const KFormT<S>& w, std::size_t rank) {
  if (w.degree != 1) throw std::invalid_argument("expected a 1-form");
  std::vector<S> out(rank);
  for (std::size_t a = 0; a < rank; ++a) out[a] = w.get({static_cast<int>(a)});
  return out;
}

template <class S>
KFormT<S> two_form(const Matrix<S>& m) {
  KFormT<S> w(2);
  for (std::size_t a = 0; a < m.rows(); ++a) {
    for (std::size_t b = a + 1; b < m.cols(); ++b) w.add({static_cast<int>(a), static_cast<int>(b)}, m(a, b));
  }
  return w;
}

template <class S>
Matrix<S> two_form_matrix(const KFormT<S>& w, std::size_t rank) {
  Matrix<S> m(rank, rank);
  for (std::size_t a = 0; a < rank; ++a) {
    for (std::size_t b = 0; b < rank; ++b) m(a, b) = w.get({static_cast<int>(a), static_cast<int>(b)});
  }
  return m;
}

// d_A by the Koszul formula on frame tuples.
template <class S>
KFormT<S> exterior_derivative(const AlgebroidT<S>& A, const KFormT<S>& w) {
  const int k = w.degree;
  const int r = static_cast<int>(A.rank());
  KFormT<S> out(k + 1);
  if (k + 1 > r) return out;
  for_each_increasing(r, k + 1, [&](const std::vector<int>& J) {
    S acc{};
    std::vector<int> rest;
    for (int i = 0; i <= k; ++i) {
      rest.clear();
      for (int l = 0; l <= k; ++l) {
        if (l != i) rest.push_back(J[static_cast<std::size_t>(l)]);
      }
      S val = w.get(rest);
      if (is_exact_zero(val)) continue;
      S term = frame_derivative(A, static_cast<std::size_t>(J[static_cast<std::size_t>(i)]), val);
      acc = (i % 2) ? acc - term : acc + term;
    }
    for (int i = 0; i <= k; ++i) {
      for (int l = i + 1; l <= k; ++l) {
        std::vector<int> tuple(1);
        for (int m = 0; m <= k; ++m) {
          if (m != i && m != l) tuple.push_back(J[static_cast<std::size_t>(m)]);
        }
        for (int g = 0; g < r; ++g) {
          const S& c = A.C(static_cast<std::size_t>(J[static_cast<std::size_t>(i)]),
                           static_cast<std::size_t>(J[static_cast<std::size_t>(l)]), static_cast<std::size_t>(g));
          if (is_exact_zero(c)) continue;
          tuple[0] = g;
          S val = w.get(tuple);
          if (is_exact_zero(val)) continue;
          S term = c * val;
          acc = ((i + l) % 2) ? acc - term : acc + term;
        }
      }
    }
    out.add(J, acc);
  });
  return out;
}

// i_X w
template <class S>
KFormT<S> interior(const SectionT<S>& X, const KFormT<S>& w) {
  KFormT<S> out(w.degree - 1);
  if (w.degree == 0) return out;
  const int r = static_cast<int>(X.size());
  for_each_increasing(r, w.degree - 1, [&](const std::vector<int>& I) {
    S acc{};
    std::vector<int> tuple(1);
    tuple.insert(tuple.end(), I.begin(), I.end());
    for (int a = 0; a < r; ++a) {
      if (is_exact_zero(X[static_cast<std::size_t>(a)])) continue;
      tuple[0] = a;
      S val = w.get(tuple);
      if (!is_exact_zero(val)) acc = acc + X[static_cast<std::size_t>(a)] * val;
    }
    out.add(I, acc);
  });
  return out;
}

// L_X = i_X d + d i_X
template <class S>
KFormT<S> lie_derivative(const AlgebroidT<S>& A, const SectionT<S>& X, const KFormT<S>& w) {
  KFormT<S> out = interior(X, exterior_derivative(A, w));
  if (w.degree == 0) return out;
  KFormT<S> second = exterior_derivative(A, interior(X, w));
  for (const auto& [idx, v] : second.comp) out.add(idx, v);
  return out;
}

template <class S>
KFormT<S> add_forms(const KFormT<S>& a, const KFormT<S>& b, bool subtract = false) {
  if (a.degree != b.degree) throw std::invalid_argument("adding forms of different degree");
  KFormT<S> out = a;
  for (const auto& [idx, v] : b.comp) out.add(idx, subtract ? S(-v) : v);
  return out;
}

// w(X_1, ..., X_k)
template <class S>
S evaluate(const KFormT<S>& w, const std::vector<SectionT<S>>& args) {
  if (static_cast<int>(args.size()) != w.degree) throw std::invalid_argument("wrong number of arguments");
  S total{};
  std::vector<int> perm(args.size());
  for (const auto& [I, coef] : w.comp) {
    for (std::size_t j = 0; j < perm.size(); ++j) perm[j] = static_cast<int>(j);
    do {
      std::vector<int> p = perm;
      int sign = sort_sign(p);
      S prod = coef;
      for (std::size_t j = 0; j < args.size() && !is_exact_zero(prod); ++j) {
        prod = prod * args[j][static_cast<std::size_t>(I[static_cast<std::size_t>(perm[j])])];
      }
      if (is_exact_zero(prod)) continue;
      total = sign > 0 ? total + prod : total - prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return total;
}

struct AlgebroidCheck {
  Verdict antisymmetry;
  Verdict jacobi;
  Verdict anchor_morphism;
  bool valid() const { return antisymmetry.ok && jacobi.ok && anchor_morphism.ok; }
};

AlgebroidCheck check_algebroid(const LieAlgebroid& A);

std::string form_to_string(const LieAlgebroid& A, const KForm& w);

}  // namespace pnred
