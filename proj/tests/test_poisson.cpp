#include <catch_amalgamated.hpp>

#include "generators.hpp"
#include "pnred/fixtures.hpp"

using namespace pnred;

namespace {

Expr v(const std::string& name) { return Expr::variable(name); }

Covector covector_of(const LieAlgebroid& A, std::initializer_list<std::pair<const char*, Expr>> entries) {
  Covector out(A.rank());
  for (const auto& [name, value] : entries) out[A.frame_index(name)] = value;
  return out;
}

// Pfaffian of an antisymmetric matrix by expansion along the first row.
Expr pfaffian(const Matrix<Expr>& m) {
  const std::size_t n = m.rows();
  if (n == 0) return Expr(1);
  if (n % 2) return Expr(0);
  Expr out;
  for (std::size_t j = 1; j < n; ++j) {
    std::vector<std::size_t> keep;
    for (std::size_t k = 1; k < n; ++k) {
      if (k != j) keep.push_back(k);
    }
    Matrix<Expr> minor(keep.size(), keep.size());
    for (std::size_t a = 0; a < keep.size(); ++a) {
      for (std::size_t b = 0; b < keep.size(); ++b) minor(a, b) = m(keep[a], keep[b]);
    }
    Expr term = m(0, j) * pfaffian(minor);
    out += (j % 2 == 1) ? term : -term;
  }
  return out;
}

Matrix<Expr> product(const Matrix<Expr>& a, const Matrix<Expr>& b) {
  Matrix<Expr> out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      for (std::size_t k = 0; k < a.cols(); ++k) out(i, j) += a(i, k) * b(k, j);
    }
  }
  return out;
}

Covector random_covector(testgen::Gen& gen, const LieAlgebroid& A) { return gen.section(A, 2); }

}  // namespace

TEST_CASE("sharp of covectors", "[poisson]") {
  TodaFixture toda = build_toda(2);
  const LieAlgebroid& R4 = toda.phase;
  Section s = sharp(toda.lambda0, covector_of(R4, {{"d_q1", Expr(1)}}));
  Section expected(R4.rank());
  expected[R4.frame_index("d_p1")] = Expr(1);
  CHECK(s == expected);
  CHECK(is_zero_section(sharp(toda.lambda0, Covector(R4.rank()))));

  const LieAlgebroid& A = toda.atiyah;
  Section t = sharp(toda.pi0, covector_of(A, {{"e1", Expr(1)}}));
  Section a1_f1_minus_f2(A.rank());
  a1_f1_minus_f2[A.frame_index("f1")] = v("a1");
  a1_f1_minus_f2[A.frame_index("f2")] = -v("a1");
  CHECK(t == a1_f1_minus_f2);
}

TEST_CASE("Schouten bracket with a section", "[poisson]") {
  TodaFixture toda = build_toda(2);
  const LieAlgebroid& A = toda.atiyah;
  CHECK(schouten_section(A, frame_section(A, A.frame_index("e2")), toda.pi0).is_zero());

  testgen::Gen gen(21);
  LieAlgebroid S = build_semidirect(aff1_data()).algebroid;
  for (int trial = 0; trial < 5; ++trial) {
    Section X = gen.section(S), Y = gen.section(S);
    Expr f = gen.expr(S.base_vars, 2);
    // graded Leibniz: [Z, U ^ W] = [Z,U] ^ W + U ^ [Z,W]
    Section Z = scale(f, X);
    Matrix<Expr> lhs = schouten_section(S, Z, wedge(X, Y));
    Matrix<Expr> rhs = wedge(bracket(S, Z, X), Y) + wedge(X, bracket(S, Z, Y));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("Toda bivectors are Poisson and compatible", "[poisson]") {
  for (int n : {2, 3}) {
    TodaFixture toda = build_toda(n);
    CHECK(is_poisson(toda.phase, toda.lambda0).ok);
    CHECK(is_poisson(toda.phase, toda.lambda1).ok);
    CHECK(are_compatible(toda.phase, toda.lambda0, toda.lambda1).ok);
    CHECK(are_compatible(toda.flaschka, toda.lambda0_bar, toda.lambda1_bar).ok);
    CHECK(are_compatible(toda.atiyah, toda.pi0, toda.pi1).ok);
    CHECK(are_compatible(toda.phase, toda.lambda1, toda.lambda1).ok);
  }
}

TEST_CASE("perturbed bivector is rejected", "[poisson]") {
  TodaFixture toda = build_toda(2);
  Bivector P = toda.lambda0;
  std::size_t q2 = toda.phase.frame_index("d_q2"), p2 = toda.phase.frame_index("d_p2");
  P(q2, p2) = v("q1");
  P(p2, q2) = -v("q1");
  Verdict verdict = is_poisson(toda.phase, P);
  CHECK_FALSE(verdict.ok);
  CHECK_FALSE(verdict.witness.empty());
  CHECK_FALSE(are_compatible(toda.phase, toda.lambda0, P).ok);
  CHECK(poisson_residual_at(toda.phase, P, {0.3, -0.2, 0.5, 0.1}) > 1e-3);
}

TEST_CASE("pointwise Poisson residuals agree with the symbolic verdict", "[poisson][property]") {
  TodaFixture toda = build_toda(3);
  testgen::Gen gen(22);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(toda.phase.dim()), y(toda.atiyah.dim());
    for (auto& c : x) c = gen.uniform(-1, 1);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = i < 2 ? gen.uniform(0.5, 2) : gen.uniform(-1, 1);
    CHECK(poisson_residual_at(toda.phase, toda.lambda1, x) < 1e-9);
    CHECK(poisson_residual_at(toda.atiyah, toda.pi1, y) < 1e-9);
  }
}

TEST_CASE("Koszul bracket is antisymmetric and satisfies Jacobi", "[poisson][property]") {
  TodaFixture toda = build_toda(2);
  testgen::Gen gen(23);
  struct Case {
    const LieAlgebroid* A;
    const Bivector* P;
  };
  std::vector<Case> cases = {{&toda.phase, &toda.lambda0}, {&toda.phase, &toda.lambda1}, {&toda.atiyah, &toda.pi1}};
  for (const auto& c : cases) {
    for (int trial = 0; trial < 4; ++trial) {
      Covector a = random_covector(gen, *c.A), b = random_covector(gen, *c.A), g = random_covector(gen, *c.A);
      CHECK(is_zero_section(koszul_bracket(*c.A, *c.P, a, a)));
      auto kb = [&](const Covector& x, const Covector& y) { return koszul_bracket(*c.A, *c.P, x, y); };
      Covector jac = add(add(kb(kb(a, b), g), kb(kb(b, g), a)), kb(kb(g, a), b));
      CHECK(is_zero_section(jac));
      // sharp intertwines the brackets
      CHECK(is_zero_section(sub(sharp(*c.P, kb(a, b)), bracket(*c.A, sharp(*c.P, a), sharp(*c.P, b)))));
    }
  }
}

TEST_CASE("dual algebroids", "[poisson]") {
  TodaFixture toda = build_toda(2);
  LieAlgebroid d0 = dual_algebroid(toda.phase, toda.lambda0);
  CHECK(check_algebroid(d0).valid());
  std::size_t th_q1 = d0.frame_index("th_d_q1");
  std::vector<Expr> row = d0.anchor.row(th_q1);
  std::vector<Expr> expected(d0.dim());
  expected[d0.base_index("p1")] = Expr(1);
  CHECK(row == expected);

  LieAlgebroid dpi = dual_algebroid(toda.atiyah, toda.pi0);
  CHECK(check_algebroid(dpi).valid());
  LieAlgebroid dpi1 = dual_algebroid(toda.atiyah, toda.pi1);
  CHECK(check_algebroid(dpi1).valid());

  Bivector broken = toda.lambda0;
  broken(0, 3) = v("q1");
  broken(3, 0) = -v("q1");
  CHECK_THROWS_AS(dual_algebroid(toda.phase, broken), std::invalid_argument);
}

TEST_CASE("induced base bivectors", "[poisson]") {
  for (int n : {2, 3}) {
    TodaFixture toda = build_toda(n);
    CHECK(induced_base_poisson(toda.atiyah, toda.pi0) == toda.lambda0_bar);
    CHECK(induced_base_poisson(toda.atiyah, toda.pi1) == toda.lambda1_bar);
    CHECK(is_poisson(toda.flaschka, induced_base_poisson(toda.atiyah, toda.pi1)).ok);
  }
  // n = 2 by hand: a1 d_a1 ^ (d_b1 - d_b2)
  TodaFixture toda = build_toda(2);
  Bivector hand(3, 3);
  hand(0, 1) = v("a1");
  hand(1, 0) = -v("a1");
  hand(0, 2) = -v("a1");
  hand(2, 0) = v("a1");
  CHECK(toda.lambda0_bar == hand);

  // image in ker rho induces zero
  const LieAlgebroid& A = toda.atiyah;
  Bivector vertical(A.rank(), A.rank());
  CHECK(induced_base_poisson(A, vertical).is_zero());
}

TEST_CASE("inversion of pi0 against a Pfaffian oracle", "[poisson]") {
  TodaFixture toda = build_toda(2);
  Expr pf = pfaffian(toda.pi0);
  CHECK(pf * pf == v("a1") * v("a1"));

  SymbolicInverse omega = invert_poisson(toda.pi0);
  CHECK(omega.denominator * omega.denominator == pf * pf * pf * pf);
  REQUIRE(omega.exact.has_value());
  // P = -W^{-1}: W * P == -Id, multiplied out by hand
  Matrix<Expr> minus_id = Matrix<Expr>::identity(4).map([](const Expr& e) { return -e; });
  CHECK(product(*omega.exact, toda.pi0) == minus_id);

  SymplecticCheck check = symplectic_check(toda.atiyah, *omega.exact);
  CHECK(check.ok());
  double det_at = evaluate(check.determinant, toda.atiyah.base_ids, {1.5, 0.2, -0.4});
  CHECK(det_at == Catch::Approx(1.0 / (1.5 * 1.5)));

  SymbolicInverse back = invert_symplectic(*omega.exact);
  REQUIRE(back.exact.has_value());
  CHECK(*back.exact == toda.pi0);
}

TEST_CASE("aff(1) symplectic form", "[poisson]") {
  SemidirectFixture fx = build_semidirect(aff1_data());
  SymplecticCheck check = symplectic_check(fx.algebroid, fx.omega);
  CHECK(check.ok());
  // brute-force determinant = Pf^2
  Expr pf = pfaffian(fx.omega);
  CHECK(pf * pf == Expr(1));
  CHECK(check.determinant == Expr(1));
  Matrix<Expr> minus_id = Matrix<Expr>::identity(4).map([](const Expr& e) { return -e; });
  CHECK(product(fx.omega, fx.poisson) == minus_id);
  CHECK(is_poisson(fx.algebroid, fx.poisson).ok);
}

TEST_CASE("inversion round trip", "[poisson]") {
  TodaFixture toda = build_toda(2);
  SymbolicInverse w = invert_poisson(toda.lambda0);
  REQUIRE(w.exact.has_value());
  SymbolicInverse p = invert_symplectic(*w.exact);
  REQUIRE(p.exact.has_value());
  CHECK(*p.exact == toda.lambda0);
  CHECK_FALSE(symplectic_check(toda.flaschka, toda.lambda0_bar).nondegenerate.ok);
}

TEST_CASE("non-closed two-form is reported", "[poisson]") {
  LieAlgebroid A = tangent_algebroid({"x", "y", "z", "w"});
  TwoForm W(4, 4);
  W(0, 1) = v("z");
  W(1, 0) = -v("z");
  W(2, 3) = Expr(1);
  W(3, 2) = Expr(-1);
  SymplecticCheck check = symplectic_check(A, W);
  CHECK(check.antisymmetric.ok);
  CHECK_FALSE(check.closed.ok);
  CHECK(check.nondegenerate.ok);
}
