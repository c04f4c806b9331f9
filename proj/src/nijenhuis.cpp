#include "pnred/nijenhuis.hpp"

#include <algorithm>

namespace pnred {

Verdict torsion_verdict(const LieAlgebroid& A, const Endomorphism& N) {
  const std::size_t r = A.rank();
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t b = a + 1; b < r; ++b) {
      Section t = torsion(A, N, frame_section(A, a), frame_section(A, b));
      for (std::size_t c = 0; c < r; ++c) {
        if (!t[c].is_zero()) {
          return Verdict::fail("T_N(" + A.frame[a] + "," + A.frame[b] + ") has " + A.frame[c] + "-component " +
                               t[c].str());
        }
      }
    }
  }
  return Verdict::pass();
}

LieAlgebroid deformed_algebroid(const LieAlgebroid& A, const Endomorphism& N) {
  Verdict t = torsion_verdict(A, N);
  if (!t) throw std::invalid_argument("deformed algebroid needs a Nijenhuis operator: " + t.witness);
  const std::size_t r = A.rank();
  std::vector<Expr> structure = zero_structure(r);
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t b = a + 1; b < r; ++b) {
      Section br = deformed_bracket(A, N, frame_section(A, a), frame_section(A, b));
      for (std::size_t c = 0; c < r; ++c) {
        structure[(a * r + b) * r + c] = br[c];
        structure[(b * r + a) * r + c] = -br[c];
      }
    }
  }
  std::vector<std::string> frame;
  for (const auto& f : A.frame) frame.push_back(f + "_N");
  // (rho o N)(e_b) = N^a_b rho(e_a)
  return make_algebroid(A.base_vars, frame, N.transpose() * A.anchor, structure);
}

Covector concomitant(const LieAlgebroid& A, const Bivector& P, const Endomorphism& N, const Covector& alpha,
                     const Covector& beta) {
  Verdict anti = is_antisymmetric(compose_bivector(N, P), "NP");
  if (!anti) throw std::invalid_argument("N o P# != P# o N*: " + anti.witness);
  return concomitant_residual(A, P, N, alpha, beta);
}

PNVerdict pn_check(const LieAlgebroid& A, const Bivector& P, const Endomorphism& N) {
  PNVerdict v;
  const std::size_t r = A.rank();
  v.torsion_zero = torsion_verdict(A, N);
  Matrix<Expr> comm = sharp_commute_residual(P, N);
  for (std::size_t a = 0; a < r && v.sharp_commutes.ok; ++a) {
    for (std::size_t b = a; b < r; ++b) {
      if (!comm(a, b).is_zero()) {
        v.sharp_commutes = Verdict::fail("(NP)(th_" + A.frame[a] + ",th_" + A.frame[b] + ") + (NP)(th_" +
                                         A.frame[b] + ",th_" + A.frame[a] + ") = " + comm(a, b).str());
        break;
      }
    }
  }
  if (!v.sharp_commutes) {
    v.concomitant_zero = Verdict::fail("undefined: NP is not antisymmetric");
  } else {
    for (std::size_t a = 0; a < r && v.concomitant_zero.ok; ++a) {
      for (std::size_t b = a + 1; b < r && v.concomitant_zero.ok; ++b) {
        Covector c = concomitant_residual(A, P, N, dual_frame_covector<Expr>(r, a), dual_frame_covector<Expr>(r, b));
        for (std::size_t g = 0; g < r; ++g) {
          if (!c[g].is_zero()) {
            v.concomitant_zero = Verdict::fail("C(P,N)(th_" + A.frame[a] + ",th_" + A.frame[b] + ") has th_" +
                                               A.frame[g] + "-component " + c[g].str());
            break;
          }
        }
      }
    }
  }
  v.nondegenerate = !determinant(P).is_zero();
  return v;
}

RecursionOperator recursion_operator(const Bivector& P0, const Bivector& P1) {
  Expr det = determinant(P0);
  if (det.is_zero()) {
    auto kernel = symbolic_kernel(P0);
    std::vector<Expr> witness = kernel.empty() ? std::vector<Expr>(P0.rows()) : kernel.front();
    std::string what = "first bivector is degenerate; kernel covector " + to_string(witness);
    throw DegenerateBivector(what, std::move(witness));
  }
  RecursionOperator out;
  out.numerator = P1 * adjugate(P0);
  out.denominator = det;
  out.exact = try_divide(out.numerator, det);
  return out;
}

bool Hierarchy::ok() const {
  for (const auto& v : poisson) {
    if (!v) return false;
  }
  for (const auto& row : compatible) {
    for (const auto& v : row) {
      if (!v) return false;
    }
  }
  for (const auto& v : pn_powers) {
    if (!v.pn()) return false;
  }
  return true;
}

Hierarchy hierarchy(const LieAlgebroid& A, const Bivector& P, const Endomorphism& N, int m) {
  if (m < 0) throw std::invalid_argument("hierarchy depth must be non-negative");
  Hierarchy h;
  Endomorphism power = Endomorphism::identity(A.rank());
  for (int l = 0; l <= m; ++l) {
    if (l > 0) power = power * N;
    h.bivectors.push_back(compose_bivector(power, P));
    h.poisson.push_back(is_poisson(A, h.bivectors.back()));
    h.pn_powers.push_back(pn_check(A, P, power));
  }
  h.compatible.assign(h.bivectors.size(), std::vector<Verdict>(h.bivectors.size()));
  for (std::size_t i = 0; i < h.bivectors.size(); ++i) {
    for (std::size_t j = i + 1; j < h.bivectors.size(); ++j) {
      Verdict v = h.poisson[i] && h.poisson[j] ? is_poisson(A, h.bivectors[i] + h.bivectors[j])
                                               : Verdict::fail("a summand is not Poisson");
      h.compatible[i][j] = v;
    }
  }
  return h;
}

Section hamiltonian_section(const LieAlgebroid& A, const Bivector& P, const Expr& H) {
  std::vector<Expr> dH(A.rank());
  for (std::size_t a = 0; a < A.rank(); ++a) dH[a] = frame_derivative(A, a, H);
  return sharp(P, dH);
}

Verdict bihamiltonian_check(const LieAlgebroid& A, const Bivector& P0, const Bivector& P1, const Expr& H0,
                            const Expr& H1) {
  Section res = sub(hamiltonian_section(A, P0, H1), hamiltonian_section(A, P1, H0));
  for (std::size_t a = 0; a < res.size(); ++a) {
    if (!res[a].is_zero()) {
      return Verdict::fail("P0#dH1 - P1#dH0 has " + A.frame[a] + "-component " + res[a].str());
    }
  }
  return Verdict::pass();
}

double PNResidual::max() const { return std::max({poisson, torsion, sharp_commute, concomitant}); }

PNResidual pn_residual_at(const LieAlgebroid& A, const Bivector& P, const Endomorphism& N,
                          const std::vector<double>& x) {
  AlgebroidT<Jet> J = at_point(A, x);
  Matrix<Jet> pj = jet_at(P, A.base_ids, x);
  Matrix<Jet> nj = jet_at(N, A.base_ids, x);
  PNResidual out;
  for (const auto& m : poisson_residual(J, pj)) out.poisson = std::max(out.poisson, max_abs(m));
  for (const auto& t : torsion_frame(J, nj)) out.torsion = std::max(out.torsion, max_abs(t));
  out.sharp_commute = max_abs(sharp_commute_residual(pj, nj));
  const std::size_t r = A.rank();
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t b = a + 1; b < r; ++b) {
      auto c = concomitant_residual(J, pj, nj, dual_frame_covector<Jet>(r, a), dual_frame_covector<Jet>(r, b));
      out.concomitant = std::max(out.concomitant, max_abs(c));
    }
  }
  return out;
}

double compatibility_residual_at(const LieAlgebroid& A, const Bivector& P0, const Bivector& P1,
                                 const std::vector<double>& x) {
  return std::max({poisson_residual_at(A, P0, x), poisson_residual_at(A, P1, x),
                   poisson_residual_at(A, P0 + P1, x)});
}

}  // namespace pnred
