#include "pnred/lifts.hpp"

#include <set>
#include <stdexcept>

namespace pnred {

TotalSpace total_space(const LieAlgebroid& A, bool dual) {
  TotalSpace T;
  T.vars = A.base_vars;
  T.base_dim = A.dim();
  T.rank = A.rank();
  T.dual = dual;
  std::set<std::string> taken(A.base_vars.begin(), A.base_vars.end());
  for (const auto& f : A.frame) {
    std::string name = (dual ? "yd_" : "y_") + f;
    if (!taken.insert(name).second) throw std::invalid_argument("fiber coordinate clashes with " + name);
    T.vars.push_back(name);
  }
  for (const auto& v : T.vars) T.ids.push_back(intern(v));
  return T;
}

namespace {

Expr fiber(const TotalSpace& T, std::size_t a) { return Expr::variable(T.ids[T.base_dim + a]); }

}  // namespace

Expr lift_function(const LieAlgebroid& A, const Expr& f, LiftKind kind) {
  if (kind == LiftKind::vertical) return f;
  TotalSpace T = total_space(A);
  Expr out;
  for (std::size_t a = 0; a < A.rank(); ++a) out += fiber(T, a) * frame_derivative(A, a, f);
  return out;
}

TotalSpaceField lift_section(const LieAlgebroid& A, const Section& X, LiftKind kind) {
  TotalSpace T = total_space(A);
  const std::size_t n = A.dim();
  const std::size_t r = A.rank();
  TotalSpaceField U(n + r);
  if (kind == LiftKind::vertical) {
    for (std::size_t a = 0; a < r; ++a) U[n + a] = X[a];
    return U;
  }
  std::vector<Expr> base = anchor_vector(A, X);
  for (std::size_t i = 0; i < n; ++i) U[i] = base[i];
  for (std::size_t a = 0; a < r; ++a) {
    Expr comp;
    for (std::size_t b = 0; b < r; ++b) {
      Expr coef = frame_derivative(A, b, X[a]);
      for (std::size_t g = 0; g < r; ++g) {
        if (!X[g].is_zero() && !A.C(g, b, a).is_zero()) coef -= X[g] * A.C(g, b, a);
      }
      if (!coef.is_zero()) comp += coef * fiber(T, b);
    }
    U[n + a] = comp;
  }
  return U;
}

TotalSpaceField star_complete_lift(const LieAlgebroid& A, const Section& X) {
  TotalSpace T = total_space(A, true);
  const std::size_t n = A.dim();
  const std::size_t r = A.rank();
  TotalSpaceField U(n + r);
  std::vector<Expr> base = anchor_vector(A, X);
  for (std::size_t i = 0; i < n; ++i) U[i] = base[i];
  for (std::size_t a = 0; a < r; ++a) {
    Expr comp;
    for (std::size_t b = 0; b < r; ++b) comp += frame_derivative(A, a, X[b]) * fiber(T, b);
    for (std::size_t b = 0; b < r; ++b) {
      if (X[b].is_zero()) continue;
      for (std::size_t g = 0; g < r; ++g) {
        if (!A.C(a, b, g).is_zero()) comp += A.C(a, b, g) * fiber(T, g) * X[b];
      }
    }
    U[n + a] = -comp;
  }
  return U;
}

Expr linear_function(const LieAlgebroid& A, const Section& Y) {
  TotalSpace T = total_space(A, true);
  Expr out;
  for (std::size_t a = 0; a < A.rank(); ++a) out += Y[a] * fiber(T, a);
  return out;
}

Expr apply_field(const TotalSpace& T, const TotalSpaceField& U, const Expr& f) {
  Expr out;
  for (std::size_t k = 0; k < U.size(); ++k) {
    if (!U[k].is_zero()) out += U[k] * f.diff(T.ids[k]);
  }
  return out;
}

TotalSpaceField total_space_bracket(const TotalSpace& T, const TotalSpaceField& U, const TotalSpaceField& V) {
  TotalSpaceField W(U.size());
  for (std::size_t k = 0; k < U.size(); ++k) W[k] = apply_field(T, U, V[k]) - apply_field(T, V, U[k]);
  return W;
}

Multivector multivector(const Expr& f) {
  Multivector m;
  m.degree = 0;
  m.scalar = f;
  return m;
}

Multivector multivector(const Section& X) {
  Multivector m;
  m.degree = 1;
  m.vec = X;
  return m;
}

Multivector multivector_bivector(const Matrix<Expr>& P) {
  Multivector m;
  m.degree = 2;
  m.biv = P;
  return m;
}

Multivector lift_multivector(const LieAlgebroid& A, const Multivector& Q, LiftKind kind) {
  const std::size_t r = A.rank();
  switch (Q.degree) {
    case 0:
      return multivector(lift_function(A, Q.scalar, kind));
    case 1: {
      // X = X^a e_a, a sum of (function) ^ (frame element)
      std::size_t dim = A.dim() + r;
      TotalSpaceField out(dim);
      for (std::size_t a = 0; a < r; ++a) {
        if (Q.vec[a].is_zero()) continue;
        TotalSpaceField ev = lift_section(A, frame_section(A, a), LiftKind::vertical);
        if (kind == LiftKind::vertical) {
          for (std::size_t k = 0; k < dim; ++k) out[k] += Q.vec[a] * ev[k];
        } else {
          TotalSpaceField ec = lift_section(A, frame_section(A, a), LiftKind::complete);
          Expr fc = lift_function(A, Q.vec[a], LiftKind::complete);
          for (std::size_t k = 0; k < dim; ++k) out[k] += fc * ev[k] + Q.vec[a] * ec[k];
        }
      }
      Multivector m;
      m.degree = 1;
      m.vec = out;
      return m;
    }
    case 2: {
      // P = sum_{a<b} P^{ab} e_a ^ e_b
      std::size_t dim = A.dim() + r;
      Matrix<Expr> out(dim, dim);
      std::vector<TotalSpaceField> ev(r), ec(r);
      for (std::size_t a = 0; a < r; ++a) {
        ev[a] = lift_section(A, frame_section(A, a), LiftKind::vertical);
        ec[a] = lift_section(A, frame_section(A, a), LiftKind::complete);
      }
      for (std::size_t a = 0; a < r; ++a) {
        for (std::size_t b = a + 1; b < r; ++b) {
          const Expr& f = Q.biv(a, b);
          if (f.is_zero()) continue;
          Matrix<Expr> vv = wedge(ev[a], ev[b]);
          if (kind == LiftKind::vertical) {
            out = out + f * vv;
          } else {
            Matrix<Expr> cv = wedge(ec[a], ev[b]) + wedge(ev[a], ec[b]);
            out = out + lift_function(A, f, LiftKind::complete) * vv + f * cv;
          }
        }
      }
      return multivector_bivector(out);
    }
    default:
      throw std::invalid_argument("multivector lifts are limited to degree 2");
  }
}

FBGenerators fb_generators(const LieAlgebroid& A, const std::vector<Section>& frame_of_b,
                           const std::vector<double>& x, const std::vector<double>& y) {
  TotalSpace T = total_space(A);
  std::vector<double> point = x;
  point.insert(point.end(), y.begin(), y.end());
  const auto dim = static_cast<Eigen::Index>(A.dim() + A.rank());
  const auto m = static_cast<Eigen::Index>(frame_of_b.size());
  FBGenerators out;
  out.generators = Eigen::MatrixXd::Zero(dim, 2 * m);
  Eigen::MatrixXd vertical = Eigen::MatrixXd::Zero(dim, m);
  Eigen::MatrixXd frame_values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(A.rank()), m);
  Eigen::MatrixXd anchor_values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(A.dim()), m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Section& X = frame_of_b[static_cast<std::size_t>(i)];
    out.generators.col(i) = evaluate(lift_section(A, X, LiftKind::complete), T.ids, point);
    vertical.col(i) = evaluate(lift_section(A, X, LiftKind::vertical), T.ids, point);
    out.generators.col(m + i) = vertical.col(i);
    frame_values.col(i) = evaluate(X, A.base_ids, x);
    anchor_values.col(i) = evaluate(anchor_vector(A, X), A.base_ids, x);
  }
  RankDecision g = numeric_rank(out.generators);
  RankDecision v = numeric_rank(vertical);
  RankDecision b = numeric_rank(frame_values);
  RankDecision rho = numeric_rank(anchor_values);
  out.rank = g.rank;
  out.vertical_rank = v.rank;
  out.fiber_rank = b.rank;
  out.anchor_rank = rho.rank;
  out.ill_conditioned = g.ill_conditioned || v.ill_conditioned || b.ill_conditioned || rho.ill_conditioned;
  Eigen::MatrixXd augmented(frame_values.rows(), frame_values.cols() + 1);
  augmented << frame_values, Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  RankDecision with_y = numeric_rank(augmented);
  out.point_in_b = with_y.rank == b.rank;
  out.ill_conditioned = out.ill_conditioned || with_y.ill_conditioned;
  return out;
}

}  // namespace pnred
