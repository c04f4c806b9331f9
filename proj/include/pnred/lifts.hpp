#pragma once

#include <string>
#include <vector>

#include "pnred/numeric.hpp"
#include "pnred/poisson.hpp"

namespace pnred {

// Coordinates (x^i, y^a) on the total space of A, or (x^i, y_a) on A*.
struct TotalSpace {
  std::vector<std::string> vars;
  std::vector<VarId> ids;
  std::size_t base_dim = 0;
  std::size_t rank = 0;
  bool dual = false;
};

// Fiber coordinates are named y_<frame> on A and yd_<frame> on A*.
TotalSpace total_space(const LieAlgebroid& A, bool dual = false);

using TotalSpaceField = std::vector<Expr>;

enum class LiftKind { vertical, complete };

// f^v = f, f^c = y^a rho_a^i df/dx^i
Expr lift_function(const LieAlgebroid& A, const Expr& f, LiftKind kind);

// X^v = X^a d/dy^a
// X^c = X^a rho_a^i d/dx^i + (rho_b^i dX^a/dx^i - X^g C_gb^a) y^b d/dy^a
TotalSpaceField lift_section(const LieAlgebroid& A, const Section& X, LiftKind kind);

// X^{*c} = X^a rho_a^i d/dx^i - (rho_a^i dX^b/dx^i y_b + C_ab^g y_g X^b) d/dy_a
TotalSpaceField star_complete_lift(const LieAlgebroid& A, const Section& X);

// Linear function Y^a y_a on A*.
Expr linear_function(const LieAlgebroid& A, const Section& Y);

Expr apply_field(const TotalSpace& T, const TotalSpaceField& U, const Expr& f);
TotalSpaceField total_space_bracket(const TotalSpace& T, const TotalSpaceField& U, const TotalSpaceField& V);

// Multivector of degree 0, 1 or 2, on A (frame components) or on the total
// space (coordinate components).
struct Multivector {
  int degree = 0;
  Expr scalar;
  std::vector<Expr> vec;
  Matrix<Expr> biv;
};

Multivector multivector(const Expr& f);
Multivector multivector(const Section& X);
Multivector multivector_bivector(const Matrix<Expr>& P);

// Lift by frame expansion and the rules (Q^R)^v = Q^v ^ R^v,
// (Q^R)^c = Q^c ^ R^v + Q^v ^ R^c. Throws for degree > 2.
Multivector lift_multivector(const LieAlgebroid& A, const Multivector& Q, LiftKind kind);

struct FBGenerators {
  Eigen::MatrixXd generators;  // columns X_i^c(a), X_i^v(a)
  int rank = 0;                // dim of the span
  int anchor_rank = 0;         // dim rho(B_x)
  int fiber_rank = 0;          // rank B_x
  bool point_in_b = false;     // y in B_x within tolerance
  bool ill_conditioned = false;
  int vertical_rank = 0;       // dim of span of X_i^v(a)
};

// Numeric span of the lifted frame of B at the total-space point (x, y).
FBGenerators fb_generators(const LieAlgebroid& A, const std::vector<Section>& frame_of_b,
                           const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pnred
