#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "pnred/poisson.hpp"

namespace pnred {

// (N* alpha)_b = alpha_a N^a_b
template <class S>
std::vector<S> endo_dual(const Matrix<S>& N, const std::vector<S>& alpha) {
  std::vector<S> out(N.cols());
  for (std::size_t a = 0; a < N.rows(); ++a) {
    if (is_exact_zero(alpha[a])) continue;
    for (std::size_t b = 0; b < N.cols(); ++b) {
      if (!is_exact_zero(N(a, b))) out[b] = out[b] + alpha[a] * N(a, b);
    }
  }
  return out;
}

// [X, Y]_N = [NX, Y] + [X, NY] - N[X, Y]
template <class S>
SectionT<S> deformed_bracket(const AlgebroidT<S>& A, const Matrix<S>& N, const SectionT<S>& X,
                             const SectionT<S>& Y) {
  SectionT<S> out = add(bracket(A, N.apply(X), Y), bracket(A, X, N.apply(Y)));
  return sub(out, N.apply(bracket(A, X, Y)));
}

// T_N(X, Y) = [NX, NY] - N[X, Y]_N
template <class S>
SectionT<S> torsion(const AlgebroidT<S>& A, const Matrix<S>& N, const SectionT<S>& X, const SectionT<S>& Y) {
  return sub(bracket(A, N.apply(X), N.apply(Y)), N.apply(deformed_bracket(A, N, X, Y)));
}

// Torsion on frame pairs a < b, in for_each_increasing order.
template <class S>
std::vector<SectionT<S>> torsion_frame(const AlgebroidT<S>& A, const Matrix<S>& N) {
  std::vector<SectionT<S>> out;
  const std::size_t r = A.rank();
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t b = a + 1; b < r; ++b) {
      out.push_back(torsion(A, N, frame_section(A, a), frame_section(A, b)));
    }
  }
  return out;
}

// NP with (NP)^{ab} = N^a_g P^{gb}; antisymmetric iff N o P# = P# o N*.
template <class S>
Matrix<S> compose_bivector(const Matrix<S>& N, const Matrix<S>& P) {
  return N * P;
}

template <class S>
Matrix<S> sharp_commute_residual(const Matrix<S>& P, const Matrix<S>& N) {
  Matrix<S> np = compose_bivector(N, P);
  return np + np.transpose();
}

// C(P,N)(alpha, beta) = [alpha,beta]_{NP} - ([N*alpha,beta]_P + [alpha,N*beta]_P - N*[alpha,beta]_P)
template <class S>
std::vector<S> concomitant_residual(const AlgebroidT<S>& A, const Matrix<S>& P, const Matrix<S>& N,
                                    const std::vector<S>& alpha, const std::vector<S>& beta) {
  const std::size_t r = A.rank();
  std::vector<S> np = koszul_bracket(A, compose_bivector(N, P), alpha, beta);
  std::vector<S> k1 = koszul_bracket(A, P, endo_dual(N, alpha), beta);
  std::vector<S> k2 = koszul_bracket(A, P, alpha, endo_dual(N, beta));
  std::vector<S> k3 = endo_dual(N, koszul_bracket(A, P, alpha, beta));
  std::vector<S> out(r);
  for (std::size_t a = 0; a < r; ++a) out[a] = np[a] - (k1[a] + k2[a] - k3[a]);
  return out;
}

class DegenerateBivector : public std::runtime_error {
 public:
  DegenerateBivector(const std::string& what, std::vector<Expr> witness)
      : std::runtime_error(what), witness_(std::move(witness)) {}
  // Covector alpha with P# alpha = 0.
  const std::vector<Expr>& witness() const { return witness_; }

 private:
  std::vector<Expr> witness_;
};

struct PNVerdict {
  Verdict torsion_zero;
  Verdict sharp_commutes;
  Verdict concomitant_zero;
  bool nondegenerate = false;
  bool pn() const { return torsion_zero.ok && sharp_commutes.ok && concomitant_zero.ok; }
  bool sn() const { return pn() && nondegenerate; }
};

Verdict torsion_verdict(const LieAlgebroid& A, const Endomorphism& N);
// Throws when the torsion does not vanish.
LieAlgebroid deformed_algebroid(const LieAlgebroid& A, const Endomorphism& N);
// Throws std::invalid_argument when NP is not antisymmetric.
Covector concomitant(const LieAlgebroid& A, const Bivector& P, const Endomorphism& N, const Covector& alpha,
                     const Covector& beta);
PNVerdict pn_check(const LieAlgebroid& A, const Bivector& P, const Endomorphism& N);

// N with N o P0# = P1#, i.e. N = P1 P0^{-1} as matrices, kept as
// numerator / denominator. Throws DegenerateBivector when det P0 == 0.
struct RecursionOperator {
  Endomorphism numerator;
  Expr denominator;
  std::optional<Endomorphism> exact;
};
RecursionOperator recursion_operator(const Bivector& P0, const Bivector& P1);

struct Hierarchy {
  std::vector<Bivector> bivectors;  // N^l P, l = 0..m
  std::vector<Verdict> poisson;
  // compatible[i][j] for i < j
  std::vector<std::vector<Verdict>> compatible;
  std::vector<PNVerdict> pn_powers;  // pn_check(P, N^l), l = 0..m
  bool ok() const;
};
Hierarchy hierarchy(const LieAlgebroid& A, const Bivector& P, const Endomorphism& N, int m);

Section hamiltonian_section(const LieAlgebroid& A, const Bivector& P, const Expr& H);
Verdict bihamiltonian_check(const LieAlgebroid& A, const Bivector& P0, const Bivector& P1, const Expr& H0,
                            const Expr& H1);

// Numeric max |residual| of each PN condition at a base point.
struct PNResidual {
  double poisson = 0.0;
  double torsion = 0.0;
  double sharp_commute = 0.0;
  double concomitant = 0.0;
  double max() const;
};
PNResidual pn_residual_at(const LieAlgebroid& A, const Bivector& P, const Endomorphism& N,
                          const std::vector<double>& x);
double compatibility_residual_at(const LieAlgebroid& A, const Bivector& P0, const Bivector& P1,
                                 const std::vector<double>& x);

}  // namespace pnred
