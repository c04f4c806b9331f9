#include "pnred/poisson.hpp"

namespace pnred {

namespace {

Verdict first_nonzero(const std::vector<Bivector>& residuals, const LieAlgebroid& A, const std::string& label) {
  for (std::size_t a = 0; a < residuals.size(); ++a) {
    const auto& m = residuals[a];
    for (std::size_t b = 0; b < m.rows(); ++b) {
      for (std::size_t c = b + 1; c < m.cols(); ++c) {
        if (!m(b, c).is_zero()) {
          return Verdict::fail(label + " residual at (th_" + A.frame[a] + "; th_" + A.frame[b] + ", th_" +
                               A.frame[c] + ") = " + m(b, c).str());
        }
      }
    }
  }
  return Verdict::pass();
}

}  // namespace

Verdict is_antisymmetric(const Matrix<Expr>& m, const std::string& label) {
  if (m.rows() != m.cols()) return Verdict::fail(label + " is not square");
  for (std::size_t a = 0; a < m.rows(); ++a) {
    for (std::size_t b = a; b < m.cols(); ++b) {
      Expr s = m(a, b) + m(b, a);
      if (!s.is_zero()) {
        return Verdict::fail(label + "(" + std::to_string(a) + "," + std::to_string(b) + ") + " + label + "(" +
                             std::to_string(b) + "," + std::to_string(a) + ") = " + s.str());
      }
    }
  }
  return Verdict::pass();
}

Verdict is_poisson(const LieAlgebroid& A, const Bivector& P) {
  Verdict anti = is_antisymmetric(P, "P");
  if (!anti) return anti;
  return first_nonzero(poisson_residual(A, P), A, "[P,P]");
}

Verdict are_compatible(const LieAlgebroid& A, const Bivector& P0, const Bivector& P1) {
  Verdict v0 = is_poisson(A, P0);
  if (!v0) return Verdict::fail("first bivector: " + v0.witness);
  Verdict v1 = is_poisson(A, P1);
  if (!v1) return Verdict::fail("second bivector: " + v1.witness);
  Verdict sum = is_poisson(A, P0 + P1);
  if (!sum) return Verdict::fail("sum: " + sum.witness);
  return Verdict::pass();
}

LieAlgebroid dual_algebroid(const LieAlgebroid& A, const Bivector& P) {
  Verdict poisson = is_poisson(A, P);
  if (!poisson) throw std::invalid_argument("dual algebroid needs a Poisson bivector: " + poisson.witness);
  const std::size_t r = A.rank();
  std::vector<std::string> frame;
  for (const auto& f : A.frame) frame.push_back("th_" + f);
  Matrix<Expr> anchor = P * A.anchor;
  std::vector<Expr> structure = zero_structure(r);
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t b = a + 1; b < r; ++b) {
      std::vector<Expr> br =
          koszul_bracket(A, P, dual_frame_covector<Expr>(r, a), dual_frame_covector<Expr>(r, b));
      for (std::size_t c = 0; c < r; ++c) {
        structure[(a * r + b) * r + c] = br[c];
        structure[(b * r + a) * r + c] = -br[c];
      }
    }
  }
  return make_algebroid(A.base_vars, frame, anchor, structure);
}

Bivector induced_base_poisson(const LieAlgebroid& A, const Bivector& P) { return induced_base_bivector(A, P); }

SymbolicInverse invert_poisson(const Bivector& P) {
  SymbolicInverse inv = symbolic_inverse(P);
  inv.numerator = -inv.numerator;
  if (inv.exact) inv.exact = -*inv.exact;
  return inv;
}

SymbolicInverse invert_symplectic(const TwoForm& W) { return invert_poisson(W); }

SymplecticCheck symplectic_check(const LieAlgebroid& A, const TwoForm& W) {
  SymplecticCheck out;
  out.antisymmetric = is_antisymmetric(W, "W");
  KForm dw = exterior_derivative(A, two_form(W));
  if (!dw.is_zero()) out.closed = Verdict::fail("d_A W = " + form_to_string(A, dw));
  out.determinant = determinant(W);
  if (out.determinant.is_zero()) out.nondegenerate = Verdict::fail("det W is identically zero");
  return out;
}

double poisson_residual_at(const LieAlgebroid& A, const Bivector& P, const std::vector<double>& x) {
  AlgebroidT<Jet> J = at_point(A, x);
  double out = 0.0;
  for (const auto& m : poisson_residual(J, jet_at(P, A.base_ids, x))) out = std::max(out, max_abs(m));
  return out;
}

}  // namespace pnred
