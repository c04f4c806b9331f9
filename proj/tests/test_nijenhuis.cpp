#include <catch_amalgamated.hpp>

#include "generators.hpp"
#include "pnred/fixtures.hpp"

using namespace pnred;

namespace {

Expr v(const std::string& name) { return Expr::variable(name); }
std::string idx(const char* stem, int i) { return stem + std::to_string(i); }

// The closed-form recursion operator of the n-particle Toda lattice, column
// by column: N(d_qi) and N(d_pi).
Endomorphism toda_closed_form(int n) {
  const auto N = static_cast<std::size_t>(n);
  auto q = [&](int i) { return static_cast<std::size_t>(i - 1); };
  auto p = [&](int i) { return N + static_cast<std::size_t>(i - 1); };
  Endomorphism M(2 * N, 2 * N);
  for (int i = 1; i <= n; ++i) {
    M(q(i), q(i)) = v(idx("p", i));
    if (i > 1) M(p(i - 1), q(i)) = -exp(v(idx("q", i - 1)) - v(idx("q", i)));
    if (i < n) M(p(i + 1), q(i)) = exp(v(idx("q", i)) - v(idx("q", i + 1)));
    M(p(i), p(i)) = v(idx("p", i));
    for (int j = 1; j < i; ++j) M(q(j), p(i)) = Expr(1);
    for (int j = i + 1; j <= n; ++j) M(q(j), p(i)) = Expr(-1);
  }
  return M;
}

bool torsion_free(const LieAlgebroid& A, const Endomorphism& N) { return torsion_verdict(A, N).ok; }

}  // namespace

TEST_CASE("deformed bracket", "[nijenhuis]") {
  TodaFixture toda = build_toda(2);
  const LieAlgebroid& A = toda.phase;
  testgen::Gen gen(31);
  Endomorphism id = Endomorphism::identity(A.rank());
  Endomorphism zero(A.rank(), A.rank());
  for (int trial = 0; trial < 5; ++trial) {
    Section X = gen.section(A), Y = gen.section(A);
    CHECK(deformed_bracket(A, id, X, Y) == bracket(A, X, Y));
    CHECK(is_zero_section(deformed_bracket(A, zero, X, Y)));
  }
  // [N d_q1, d_p1] + [d_q1, N d_p1] = -d_p1(p1 d_q1 + e^{q1-q2} d_p2) + d_q1(p1 d_p1 - d_q2) = -d_q1
  Section expected(A.rank());
  expected[A.frame_index("d_q1")] = Expr(-1);
  CHECK(deformed_bracket(A, toda.recursion, frame_section(A, A.frame_index("d_q1")),
                         frame_section(A, A.frame_index("d_p1"))) == expected);
}

TEST_CASE("recursion operator reproduces the closed form", "[nijenhuis]") {
  for (int n : {2, 3, 4}) {
    TodaFixture toda = build_toda(n);
    Endomorphism hand = toda_closed_form(n);
    CHECK(toda.recursion == hand);
    RecursionOperator rec = recursion_operator(toda.lambda0, toda.lambda1);
    REQUIRE(rec.exact.has_value());
    CHECK(*rec.exact == hand);
    // cleared denominators: N P0 == P1 up to the denominator
    CHECK(rec.numerator * toda.lambda0 == toda.lambda1.map([&](const Expr& e) { return rec.denominator * e; }));
  }
  TodaFixture toda = build_toda(2);
  RecursionOperator same = recursion_operator(toda.pi1, toda.pi1);
  REQUIRE(same.exact.has_value());
  CHECK(*same.exact == Endomorphism::identity(4));
}

TEST_CASE("degenerate first bivector reports a kernel covector", "[nijenhuis]") {
  for (int n : {2, 3}) {
    TodaFixture toda = build_toda(n);
    try {
      recursion_operator(toda.lambda0_bar, toda.lambda1_bar);
      FAIL("expected DegenerateBivector");
    } catch (const DegenerateBivector& err) {
      Covector sum_db(toda.flaschka.rank());
      for (int i = 1; i <= n; ++i) sum_db[toda.flaschka.frame_index(idx("d_b", i))] = Expr(1);
      CHECK(proportional(err.witness(), sum_db));
      CHECK(is_zero_section(sharp(toda.lambda0_bar, err.witness())));
      // and the partner does not kill it, so no N can exist
      CHECK_FALSE(is_zero_section(sharp(toda.lambda1_bar, err.witness())));
    }
  }
}

TEST_CASE("torsion", "[nijenhuis]") {
  for (int n : {2, 3}) {
    TodaFixture toda = build_toda(n);
    CHECK(torsion_free(toda.phase, toda.recursion));
    CHECK(torsion_free(toda.atiyah, toda.atiyah_recursion));
  }
  LieAlgebroid plane = tangent_algebroid({"x", "y"});
  CHECK(torsion_free(plane, Endomorphism::identity(2)));
  // f Id is Nijenhuis for every f: [fX,fY] and f[X,Y]_{f Id} both expand to
  // f^2[X,Y] + f(Xf)Y - f(Yf)X.
  Endomorphism scaled = Endomorphism::identity(2).map([](const Expr& e) { return e * Expr::variable("x"); });
  CHECK(torsion_free(plane, scaled));

  // N = diag(y, 0): T(d_x, d_y) = [y d_x, 0] - N([y d_x, d_y]) = -N(-d_x) = y d_x
  Endomorphism diag(2, 2);
  diag(0, 0) = Expr::variable("y");
  Verdict verdict = torsion_verdict(plane, diag);
  CHECK_FALSE(verdict.ok);
  CHECK_FALSE(verdict.witness.empty());
  Section expected(2);
  expected[0] = Expr::variable("y");
  CHECK(torsion(plane, diag, frame_section(plane, 0), frame_section(plane, 1)) == expected);
}

TEST_CASE("powers of a torsion-free operator stay torsion-free", "[nijenhuis][property]") {
  TodaFixture toda = build_toda(2);
  for (int l = 1; l <= 3; ++l) {
    CHECK(torsion_free(toda.phase, matrix_power(toda.recursion, l)));
    CHECK(torsion_free(toda.atiyah, matrix_power(toda.atiyah_recursion, l)));
  }
}

TEST_CASE("deformed algebroid", "[nijenhuis]") {
  TodaFixture toda = build_toda(2);
  const LieAlgebroid& A = toda.atiyah;
  LieAlgebroid same = deformed_algebroid(A, Endomorphism::identity(A.rank()));
  CHECK(same.anchor == A.anchor);
  CHECK(same.structure == A.structure);

  LieAlgebroid deformed = deformed_algebroid(A, toda.atiyah_recursion);
  CHECK(check_algebroid(deformed).valid());
  const Endomorphism& N = toda.atiyah_recursion;
  for (std::size_t a = 0; a < A.rank(); ++a) {
    for (std::size_t b = a + 1; b < A.rank(); ++b) {
      Section X = frame_section(A, a), Y = frame_section(A, b);
      CHECK(N.apply(bracket(deformed, X, Y)) == bracket(A, N.apply(X), N.apply(Y)));
    }
  }

  testgen::Gen gen(32);
  for (int trial = 0; trial < 5; ++trial) {
    Section X = gen.section(A), Y = gen.section(A);
    Expr f = gen.expr(A.base_vars, 2);
    Section rho_n_x = N.apply(X);
    Section lhs = sub(sub(deformed_bracket(A, N, X, scale(f, Y)), scale(f, deformed_bracket(A, N, X, Y))),
                      scale(anchor_apply(A, rho_n_x, f), Y));
    CHECK(is_zero_section(lhs));
  }

  LieAlgebroid plane = tangent_algebroid({"x", "y"});
  Endomorphism diag(2, 2);
  diag(0, 0) = Expr::variable("y");
  CHECK_THROWS(deformed_algebroid(plane, diag));
}

TEST_CASE("Magri-Morosi concomitant", "[nijenhuis]") {
  TodaFixture toda = build_toda(2);
  auto all_pairs_zero = [](const LieAlgebroid& A, const Bivector& P, const Endomorphism& N) {
    for (std::size_t a = 0; a < A.rank(); ++a) {
      for (std::size_t b = a + 1; b < A.rank(); ++b) {
        Covector c = concomitant(A, P, N, dual_frame_covector<Expr>(A.rank(), a),
                                 dual_frame_covector<Expr>(A.rank(), b));
        if (!is_zero_section(c)) return false;
      }
    }
    return true;
  };
  CHECK(all_pairs_zero(toda.phase, toda.lambda0, toda.recursion));
  CHECK(all_pairs_zero(toda.atiyah, toda.pi0, toda.atiyah_recursion));
  CHECK(all_pairs_zero(toda.atiyah, toda.pi1, Endomorphism::identity(4)));

  Endomorphism bad = toda.recursion;
  bad(0, 0) += Expr(1);
  CHECK_THROWS_AS(concomitant(toda.phase, toda.lambda0, bad, dual_frame_covector<Expr>(4, 0),
                              dual_frame_covector<Expr>(4, 1)),
                  std::invalid_argument);
}

TEST_CASE("PN and symplectic-Nijenhuis verdicts", "[nijenhuis]") {
  TodaFixture toda3 = build_toda(3);
  PNVerdict pn = pn_check(toda3.phase, toda3.lambda0, toda3.recursion);
  CHECK(pn.pn());
  CHECK(pn.sn());

  TodaFixture toda = build_toda(2);
  PNVerdict sn = pn_check(toda.atiyah, toda.pi0, toda.atiyah_recursion);
  CHECK(sn.sn());

  Endomorphism bad = toda.recursion;
  bad(0, 0) += Expr(1);
  PNVerdict broken = pn_check(toda.phase, toda.lambda0, bad);
  CHECK_FALSE(broken.pn());
  CHECK_FALSE(broken.sharp_commutes.ok);
  CHECK_FALSE(broken.sharp_commutes.witness.empty());

  PNVerdict degenerate = pn_check(toda.flaschka, toda.lambda0_bar, Endomorphism::identity(3));
  CHECK(degenerate.pn());
  CHECK_FALSE(degenerate.sn());
}

TEST_CASE("hierarchy", "[nijenhuis]") {
  TodaFixture toda = build_toda(2);
  Hierarchy h = hierarchy(toda.atiyah, toda.pi0, toda.atiyah_recursion, 3);
  CHECK(h.ok());
  REQUIRE(h.bivectors.size() == 4);
  CHECK(h.bivectors[0] == toda.pi0);
  CHECK(h.bivectors[1] == toda.pi1);
  for (const auto& verdict : h.poisson) CHECK(verdict.ok);
  for (std::size_t i = 0; i < h.compatible.size(); ++i) {
    for (const auto& verdict : h.compatible[i]) CHECK(verdict.ok);
  }

  Hierarchy phase = hierarchy(toda.phase, toda.lambda0, toda.recursion, 2);
  CHECK(phase.ok());
  CHECK(phase.bivectors[1] == toda.lambda1);
  for (int l = 0; l <= 2; ++l) {
    CHECK(pn_check(toda.phase, phase.bivectors[static_cast<std::size_t>(l)], toda.recursion).pn());
  }

  // nilpotent N with N P == 0 on R^3
  LieAlgebroid space = tangent_algebroid({"x", "y", "z"});
  Bivector P(3, 3);
  P(0, 1) = Expr(1);
  P(1, 0) = Expr(-1);
  Endomorphism nil(3, 3);
  nil(0, 2) = Expr(1);
  Hierarchy zero = hierarchy(space, P, nil, 2);
  CHECK(zero.ok());
  CHECK(zero.bivectors[1].is_zero());
  CHECK(zero.bivectors[2].is_zero());
}

TEST_CASE("bi-Hamiltonian vector fields", "[nijenhuis]") {
  for (int n : {2, 3}) {
    TodaFixture toda = build_toda(n);
    CHECK(bihamiltonian_check(toda.phase, toda.lambda0, toda.lambda1, toda.h0, toda.h1).ok);
    CHECK(bihamiltonian_check(toda.flaschka, toda.lambda0_bar, toda.lambda1_bar, toda.h0_bar, toda.h1_bar).ok);
  }
  TodaFixture toda = build_toda(2);
  // hand-written Hamiltonians for two particles
  Expr h0 = v("p1") + v("p2");
  Expr h1 = Expr(Rational(1, 2)) * (v("p1") * v("p1") + v("p2") * v("p2")) + exp(v("q1") - v("q2"));
  CHECK(h0 == toda.h0);
  CHECK(h1 == toda.h1);
  CHECK(bihamiltonian_check(toda.phase, toda.lambda1, toda.lambda1, h1, h1).ok);
  CHECK_FALSE(bihamiltonian_check(toda.phase, toda.lambda0, toda.lambda1, h1, h1).ok);
  // H_{p1} for the canonical bivector is -d_q1 under P#(alpha)^b = alpha_g P^{gb}
  Section flow = hamiltonian_section(toda.phase, toda.lambda0, v("p1"));
  Section expected(4);
  expected[0] = Expr(-1);
  CHECK(flow == expected);
}

TEST_CASE("pointwise PN residuals", "[nijenhuis][property]") {
  TodaFixture toda = build_toda(3);
  testgen::Gen gen(33);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(toda.atiyah.dim());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = i < 2 ? gen.uniform(0.5, 2) : gen.uniform(-1, 1);
    CHECK(pn_residual_at(toda.atiyah, toda.pi0, toda.atiyah_recursion, x).max() < 1e-9);
    CHECK(compatibility_residual_at(toda.atiyah, toda.pi0, toda.pi1, x) < 1e-9);
  }
}
