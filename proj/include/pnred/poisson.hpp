#pragma once

#include <cmath>
#include <vector>

#include "pnred/algebroid.hpp"

namespace pnred {

// Bivector P^{ab} = P(th^a, th^b), two-form W_ab = W(e_a, e_b), endomorphism
// N^a_b with N(e_b) = N^a_b e_a. All are r x r matrices in the frame.
using Bivector = Matrix<Expr>;
using TwoForm = Matrix<Expr>;
using Endomorphism = Matrix<Expr>;
using Covector = std::vector<Expr>;

template <class S>
std::vector<S> dual_frame_covector(std::size_t rank, std::size_t a) {
  std::vector<S> th(rank);
  th[a] = S(1);
  return th;
}

// (P# alpha)^b = alpha_g P^{gb}
template <class S>
SectionT<S> sharp(const Matrix<S>& P, const std::vector<S>& alpha) {
  SectionT<S> out(P.cols());
  for (std::size_t g = 0; g < P.rows(); ++g) {
    if (is_exact_zero(alpha[g])) continue;
    for (std::size_t b = 0; b < P.cols(); ++b) {
      if (!is_exact_zero(P(g, b))) out[b] = out[b] + alpha[g] * P(g, b);
    }
  }
  return out;
}

// P(alpha, beta) = alpha_a P^{ab} beta_b
template <class S>
S pairing(const Matrix<S>& P, const std::vector<S>& alpha, const std::vector<S>& beta) {
  S out{};
  for (std::size_t a = 0; a < P.rows(); ++a) {
    if (is_exact_zero(alpha[a])) continue;
    for (std::size_t b = 0; b < P.cols(); ++b) {
      if (is_exact_zero(beta[b]) || is_exact_zero(P(a, b))) continue;
      out = out + alpha[a] * P(a, b) * beta[b];
    }
  }
  return out;
}

template <class S>
S contract(const std::vector<S>& alpha, const SectionT<S>& X) {
  S out{};
  for (std::size_t a = 0; a < X.size(); ++a) {
    if (!is_exact_zero(alpha[a]) && !is_exact_zero(X[a])) out = out + alpha[a] * X[a];
  }
  return out;
}

// X ^ Y as an antisymmetric matrix
template <class S>
Matrix<S> wedge(const SectionT<S>& X, const SectionT<S>& Y) {
  Matrix<S> m(X.size(), X.size());
  for (std::size_t a = 0; a < X.size(); ++a) {
    for (std::size_t b = 0; b < X.size(); ++b) m(a, b) = X[a] * Y[b] - X[b] * Y[a];
  }
  return m;
}

template <class S>
std::vector<S> lie_derivative_one_form(const AlgebroidT<S>& A, const SectionT<S>& X, const std::vector<S>& alpha) {
  return one_form_components(lie_derivative(A, X, one_form(alpha)), A.rank());
}

// [X, P] evaluated on (th^a, th^b):
// rho(X) P^{ab} - P(L_X th^a, th^b) - P(th^a, L_X th^b)
template <class S>
Matrix<S> schouten_section(const AlgebroidT<S>& A, const SectionT<S>& X, const Matrix<S>& P) {
  const std::size_t r = A.rank();
  std::vector<std::vector<S>> lie(r);
  for (std::size_t a = 0; a < r; ++a) {
    lie[a] = lie_derivative_one_form(A, X, dual_frame_covector<S>(r, a));
  }
  Matrix<S> out(r, r);
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t b = a + 1; b < r; ++b) {
      S v = anchor_apply(A, X, P(a, b));
      for (std::size_t g = 0; g < r; ++g) {
        if (!is_exact_zero(lie[a][g]) && !is_exact_zero(P(g, b))) v = v - lie[a][g] * P(g, b);
        if (!is_exact_zero(lie[b][g]) && !is_exact_zero(P(a, g))) v = v - P(a, g) * lie[b][g];
      }
      out(a, b) = v;
      out(b, a) = -v;
    }
  }
  return out;
}

// For each a: -P#(d th^a) + [P# th^a, P]; all vanish iff P is Poisson.
template <class S>
std::vector<Matrix<S>> poisson_residual(const AlgebroidT<S>& A, const Matrix<S>& P) {
  const std::size_t r = A.rank();
  std::vector<Matrix<S>> out;
  out.reserve(r);
  for (std::size_t a = 0; a < r; ++a) {
    std::vector<S> th = dual_frame_covector<S>(r, a);
    Matrix<S> dth = two_form_matrix(exterior_derivative(A, one_form(th)), r);
    Matrix<S> res = schouten_section(A, sharp(P, th), P);
    for (std::size_t b = 0; b < r; ++b) {
      for (std::size_t c = b + 1; c < r; ++c) {
        S pd{};
        for (std::size_t u = 0; u < r; ++u) {
          if (is_exact_zero(P(b, u))) continue;
          for (std::size_t v = 0; v < r; ++v) {
            if (is_exact_zero(dth(u, v)) || is_exact_zero(P(c, v))) continue;
            pd = pd + dth(u, v) * P(b, u) * P(c, v);
          }
        }
        res(b, c) = res(b, c) - pd;
        res(c, b) = -res(b, c);
      }
    }
    out.push_back(std::move(res));
  }
  return out;
}

// [alpha, beta]_P = L_{P# alpha} beta - L_{P# beta} alpha - d P(alpha, beta)
template <class S>
std::vector<S> koszul_bracket(const AlgebroidT<S>& A, const Matrix<S>& P, const std::vector<S>& alpha,
                              const std::vector<S>& beta) {
  const std::size_t r = A.rank();
  std::vector<S> l1 = lie_derivative_one_form(A, sharp(P, alpha), beta);
  std::vector<S> l2 = lie_derivative_one_form(A, sharp(P, beta), alpha);
  std::vector<S> df = one_form_components(exterior_derivative(A, function_form(pairing(P, alpha, beta))), r);
  std::vector<S> out(r);
  for (std::size_t a = 0; a < r; ++a) out[a] = l1[a] - l2[a] - df[a];
  return out;
}

// Lambda^{ij} = rho_a^i P^{ab} rho_b^j
template <class S>
Matrix<S> induced_base_bivector(const AlgebroidT<S>& A, const Matrix<S>& P) {
  return A.anchor.transpose() * P * A.anchor;
}

inline double value_of(const Jet& j) { return j.value; }
inline double value_of(double d) { return d; }

template <class S>
double max_abs(const Matrix<S>& m) {
  double out = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out = std::max(out, std::fabs(value_of(m(i, j))));
  }
  return out;
}

template <class S>
double max_abs(const std::vector<S>& v) {
  double out = 0.0;
  for (const auto& x : v) out = std::max(out, std::fabs(value_of(x)));
  return out;
}

// Symbolic verdicts.
Verdict is_poisson(const LieAlgebroid& A, const Bivector& P);
Verdict are_compatible(const LieAlgebroid& A, const Bivector& P0, const Bivector& P1);
Verdict is_antisymmetric(const Matrix<Expr>& m, const std::string& label);
// dual algebroid (A*, rho o P#, [.,.]_P) with frame th_<name>
LieAlgebroid dual_algebroid(const LieAlgebroid& A, const Bivector& P);
Bivector induced_base_poisson(const LieAlgebroid& A, const Bivector& P);

// Sign convention: P# = -(W_flat)^{-1}, i.e. P = -W^{-1} and W = -P^{-1} as
// matrices, so that W(P# alpha, P# beta) = P(alpha, beta).
SymbolicInverse invert_poisson(const Bivector& P);
SymbolicInverse invert_symplectic(const TwoForm& W);

struct SymplecticCheck {
  Verdict antisymmetric;
  Verdict closed;
  Verdict nondegenerate;
  Expr determinant;  // zero locus of this expression is the degeneracy locus
  bool ok() const { return antisymmetric.ok && closed.ok && nondegenerate.ok; }
};
SymplecticCheck symplectic_check(const LieAlgebroid& A, const TwoForm& W);

// Numeric max |residual| of the Poisson condition at a base point.
double poisson_residual_at(const LieAlgebroid& A, const Bivector& P, const std::vector<double>& x);

}  // namespace pnred
