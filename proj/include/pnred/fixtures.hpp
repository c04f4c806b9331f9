#pragma once

#include <string>
#include <vector>

#include "pnred/reduction.hpp"

namespace pnred {

// Non-periodic Toda lattice with n particles, its Flaschka quotient and the
// Atiyah algebroid of the R-action q -> q + t.
struct TodaFixture {
  int n = 0;
  LieAlgebroid phase;  // T R^{2n}, coordinates q1..qn, p1..pn
  Bivector lambda0, lambda1;
  Endomorphism recursion;  // the closed-form N on R^{2n}
  Expr h0, h1;

  LieAlgebroid flaschka;  // T of the quotient, coordinates a1..a_{n-1}, b1..bn
  Bivector lambda0_bar, lambda1_bar;
  Expr h0_bar, h1_bar;

  EpimorphismSpec projection;  // T pi: T R^{2n} -> T(quotient)

  LieAlgebroid atiyah;  // frame e1..en, f1..fn over the Flaschka coordinates
  Bivector pi0, pi1;
  Endomorphism atiyah_recursion;  // pi1 pi0^{-1}
};

// Throws std::invalid_argument for n < 2 and std::logic_error if a
// construction self-check fails.
TodaFixture build_toda(int n);

// Lie algebra data for the semidirect-product fixture: bracket[i][j][k] is
// the structure constant c^k_ij; h1 lists the basis indices spanning the
// subalgebra, the remaining indices must span an ideal.
struct LieAlgebraData {
  int dimension = 0;
  std::vector<std::vector<std::vector<Rational>>> bracket;
  std::vector<int> h1;
};
LieAlgebraData aff1_data();

struct SemidirectFixture {
  LieAlgebraData data;
  LieAlgebroid algebroid;  // frame xi_1..xi_d, eps_1..eps_d over mu_1..mu_d
  TwoForm omega;
  Bivector poisson;  // -Omega^{-1}
  Endomorphism projector;  // symplectic projector onto F = h1 + P_g^*(h1^*)
  Bivector lambda_h1;  // Poisson bivector of the restriction of Omega to F
  Endomorphism nijenhuis;  // N = projector
  // lambda_h1# o Omega^flat == sign * projector under the sharp/flat
  // convention P# = -(Omega^flat)^{-1}
  int recorded_sign = 0;
};

SemidirectFixture build_semidirect(const LieAlgebraData& data);

// Checks of the Atiyah-passage statements on the Toda fixture: PN pair on the
// Atiyah algebroid, compatibility of the projected base pair, and equality
// of the induced base bivectors with the projected ones.
struct AtiyahPassage {
  PNVerdict atiyah_pn;
  Verdict base_compatible;
  Verdict induced_match;
};
AtiyahPassage invariant_pn_to_atiyah(const TodaFixture& toda);

}  // namespace pnred
