#include <catch_amalgamated.hpp>

#include "generators.hpp"
#include "pnred/fixtures.hpp"

using namespace pnred;

namespace {

Expr v(const std::string& name) { return Expr::variable(name); }

std::vector<std::vector<double>> random_points(testgen::Gen& gen, const std::vector<std::pair<double, double>>& box,
                                               int count) {
  std::vector<std::vector<double>> out;
  for (int i = 0; i < count; ++i) {
    std::vector<double> x;
    for (const auto& [lo, hi] : box) x.push_back(gen.uniform(lo, hi));
    out.push_back(x);
  }
  return out;
}

EpimorphismSpec identity_epimorphism(const LieAlgebroid& A) {
  EpimorphismSpec E;
  E.name = "identity";
  E.source = A;
  E.target = A;
  for (const auto& var : A.base_vars) E.base_map.push_back(v(var));
  E.fiber_map = Matrix<Expr>::identity(A.rank());
  return E;
}

// Lambda0 (+) 0 on R^4 with coordinates q, p, u, w.
struct BlockFixture {
  LieAlgebroid A = tangent_algebroid({"q", "p", "u", "w"});
  Bivector P{4, 4};
  BlockFixture() {
    P(0, 1) = Expr(1);
    P(1, 0) = Expr(-1);
  }
  LeafSpec leaf(Covector second) const {
    LeafSpec L;
    L.leaf_vars = {"q", "p"};
    L.embedding = {v("q"), v("p"), Expr(Rational(1, 2)), Expr(-1)};
    Covector minus_dp(4);
    minus_dp[1] = Expr(-1);
    L.generators = {minus_dp, std::move(second)};
    L.sample_points = {{0.1, 0.2}, {-0.7, 1.3}};
    return L;
  }
};

Covector unit_covector(std::size_t rank, std::size_t a) { return dual_frame_covector<Expr>(rank, a); }

const std::vector<std::pair<double, double>> kAtiyahBox2 = {{0.5, 2}, {-1, 1}, {-1, 1}};
const std::vector<std::pair<double, double>> kMuBox = {{-2, 2}, {-2, 2}};

}  // namespace

TEST_CASE("Flaschka epimorphism data", "[reduction]") {
  TodaFixture toda = build_toda(3);
  const EpimorphismSpec& E = toda.projection;
  CHECK(anchor_compatibility(E).ok);
  KernelFrame K = kernel_frame(E);
  REQUIRE(K.sections.size() == 1);
  Section sum_dq(6);
  for (std::size_t i = 0; i < 3; ++i) sum_dq[i] = Expr(1);
  CHECK(proportional(K.sections[0], sum_dq));
  REQUIRE(K.projectable.size() == 5);
  for (std::size_t a = 0; a < K.projectable.size(); ++a) {
    CHECK(E.fiber_map.apply(K.projectable[a]) == frame_section(E.target, a));
  }
  testgen::Gen gen(51);
  HypothesisReport h = vertical_hypothesis(E, random_points(gen, std::vector<std::pair<double, double>>(6, {-1, 1}), 10));
  CHECK(h.ok);
  CHECK_FALSE(h.ill_conditioned);
}

TEST_CASE("rewriting through the base map", "[reduction]") {
  TodaFixture toda = build_toda(3);
  const EpimorphismSpec& E = toda.projection;
  auto r = rewrite_basic(E, exp(v("q1") - v("q3")) * v("p2") + exp(v("q2") - v("q3")));
  REQUIRE(r.has_value());
  CHECK(*r == v("a1") * v("a2") * v("b2") + v("a2"));
  CHECK(pull_back_function(E, *r) == exp(v("q1") - v("q3")) * v("p2") + exp(v("q2") - v("q3")));
  CHECK_FALSE(rewrite_basic(E, v("q1")).has_value());
  CHECK_FALSE(rewrite_basic(E, exp(v("q1"))).has_value());
}

TEST_CASE("projectability verdicts on the Toda phase space", "[reduction]") {
  TodaFixture toda = build_toda(2);
  const EpimorphismSpec& E = toda.projection;
  CHECK(projectable_bivector_check(E, toda.lambda0).ok);
  CHECK(projectable_bivector_check(E, toda.lambda1).ok);

  Verdict endo = projectable_endo_check(E, toda.recursion);
  CHECK_FALSE(endo.ok);
  CHECK(endo.witness.find("N(Ker Pi) not in Ker Pi") != std::string::npos);
  CHECK_THROWS_AS(project_endo(E, toda.recursion), ProjectionError);

  Section dp1 = frame_section(toda.phase, toda.phase.frame_index("d_p1"));
  CHECK(projectable_section_check(E, dp1).ok);
  CHECK_FALSE(projectable_section_check(E, scale(v("q1"), dp1)).ok);

  Covector dq1 = unit_covector(4, 0);
  CHECK_FALSE(projectable_form_check(E, dq1).ok);
  Covector dq1_minus_dq2 = unit_covector(4, 0);
  dq1_minus_dq2[1] = Expr(-1);
  CHECK(projectable_form_check(E, dq1_minus_dq2).ok);
  CHECK_FALSE(projectable_form_check(E, Covector{v("q1"), -v("q1"), 0, 0}).ok);
}

TEST_CASE("pulled-back covectors are projectable", "[reduction][property]") {
  TodaFixture toda = build_toda(3);
  const EpimorphismSpec& E = toda.projection;
  testgen::Gen gen(52);
  for (int trial = 0; trial < 10; ++trial) {
    // exp of a target coordinate has no pullback in the class
    Covector target = gen.section(E.target, 2, false);
    Covector pulled(E.source.rank());
    for (std::size_t k = 0; k < E.source.rank(); ++k) {
      for (std::size_t j = 0; j < E.target.rank(); ++j) {
        pulled[k] += E.fiber_map(j, k) * pull_back_function(E, target[j]);
      }
    }
    CHECK(projectable_form_check(E, pulled).ok);
  }
}

TEST_CASE("projected Toda bivectors", "[reduction]") {
  for (int n : {2, 3, 4}) {
    TodaFixture toda = build_toda(n);
    Bivector p0 = project_bivector(toda.projection, toda.lambda0);
    Bivector p1 = project_bivector(toda.projection, toda.lambda1);
    CHECK(p0 == toda.lambda0_bar);
    CHECK(p1 == toda.lambda1_bar);
    CHECK(is_poisson(toda.flaschka, p0).ok);
    CHECK(is_poisson(toda.flaschka, p1).ok);
  }
}

TEST_CASE("projected bivector pairs pulled-back covectors like the original", "[reduction][property]") {
  TodaFixture toda = build_toda(3);
  const EpimorphismSpec& E = toda.projection;
  Bivector reduced = project_bivector(E, toda.lambda1);
  testgen::Gen gen(53);
  auto pull = [&](const Covector& target) {
    Covector out(E.source.rank());
    for (std::size_t k = 0; k < E.source.rank(); ++k) {
      for (std::size_t j = 0; j < E.target.rank(); ++j) out[k] += E.fiber_map(j, k) * pull_back_function(E, target[j]);
    }
    return out;
  };
  for (int trial = 0; trial < 10; ++trial) {
    Covector a = gen.section(E.target, 2, false), b = gen.section(E.target, 2, false);
    CHECK(pull_back_function(E, pairing(reduced, a, b)) == pairing(toda.lambda1, pull(a), pull(b)));
  }
}

TEST_CASE("identity epimorphism leaves structures unchanged", "[reduction]") {
  TodaFixture toda = build_toda(2);
  EpimorphismSpec E = identity_epimorphism(toda.atiyah);
  validate_epimorphism(E);
  CHECK(project_bivector(E, toda.pi1) == toda.pi1);
  CHECK(project_endo(E, toda.atiyah_recursion) == toda.atiyah_recursion);
  Section X(4);
  X[0] = v("a1") * v("b2");
  CHECK(project_section(E, X) == X);
}

TEST_CASE("malformed epimorphisms are rejected", "[reduction]") {
  TodaFixture toda = build_toda(2);
  EpimorphismSpec E = toda.projection;
  E.base_map.pop_back();
  CHECK_THROWS_AS(validate_epimorphism(E), std::invalid_argument);
  EpimorphismSpec F = toda.projection;
  F.base_map[0] = v("a1");
  CHECK_THROWS_AS(validate_epimorphism(F), std::invalid_argument);
}

TEST_CASE("characteristic rank", "[reduction]") {
  TodaFixture toda = build_toda(2);
  testgen::Gen gen(54);
  for (const auto& r : characteristic_rank(toda.atiyah, toda.pi0, random_points(gen, kAtiyahBox2, 10))) {
    CHECK(r.rank_d == 3);
    CHECK_FALSE(r.ill_conditioned);
  }
  for (const auto& r : characteristic_rank(toda.phase, toda.lambda0, {{0.1, 0.2, 0.3, 0.4}})) {
    CHECK(r.rank_d == 4);
    CHECK(r.rank_base == 4);
  }
  for (const auto& r : characteristic_rank(toda.atiyah, Bivector(4, 4), {{1, 0, 0}})) CHECK(r.rank_d == 0);
  // Flaschka base: S = D is the image of the degenerate bivector
  for (const auto& r : characteristic_rank(toda.flaschka, toda.lambda0_bar, {{1.1, 0.2, 0.3}})) {
    CHECK(r.rank_d == 2);
    CHECK(r.rank_base <= r.rank_d);
  }
}

TEST_CASE("restriction to the whole base", "[reduction]") {
  TodaFixture toda = build_toda(2);
  LeafSpec full;
  full.full_rank = true;
  full.sample_points = {{1.0, 0.2, -0.3}, {0.6, 0.9, 0.1}};
  LeafRestriction L = restrict_to_leaf(toda.atiyah, toda.pi0, toda.atiyah_recursion, full);
  SymbolicInverse inv = invert_poisson(toda.pi0);
  REQUIRE(inv.exact.has_value());
  CHECK(L.omega == *inv.exact);
  CHECK(L.nijenhuis == toda.atiyah_recursion);
  CHECK(L.algebroid.anchor == toda.atiyah.anchor);
  CHECK(L.omega_flat_identity.ok);
  CHECK(L.pullback_identity.ok);
  CHECK(L.symplectic.ok());
  CHECK(L.pn.sn());

  SemidirectFixture fx = build_semidirect(aff1_data());
  LeafSpec full2;
  full2.full_rank = true;
  LeafRestriction M = restrict_to_leaf(fx.algebroid, fx.poisson, Endomorphism::identity(4), full2);
  CHECK(M.omega == fx.omega);
  CHECK(M.symplectic.ok());

  LeafSpec wrong;
  wrong.full_rank = true;
  CHECK_THROWS_AS(restrict_to_leaf(toda.flaschka, toda.lambda0_bar, Endomorphism::identity(3), wrong),
                  HypothesisViolation);
}

TEST_CASE("restriction to a symplectic plane", "[reduction]") {
  BlockFixture block;
  Covector dq(4);
  dq[0] = Expr(1);
  LeafRestriction L = restrict_to_leaf(block.A, block.P, Endomorphism::identity(4), block.leaf(dq));
  // X_1 = P#(-dp) = d_q and X_2 = P#(dq) = d_p; Omega_L(X_1, X_2) = P(-dp, dq) = 1
  TwoForm canonical(2, 2);
  canonical(0, 1) = Expr(1);
  canonical(1, 0) = Expr(-1);
  CHECK(L.omega == canonical);
  CHECK(L.nijenhuis == Endomorphism::identity(2));
  CHECK(L.algebroid.anchor == Matrix<Expr>::identity(2));
  Matrix<Expr> inclusion(4, 2);
  inclusion(0, 0) = Expr(1);
  inclusion(1, 1) = Expr(1);
  CHECK(L.inclusion == inclusion);
  CHECK(L.omega_flat_identity.ok);
  CHECK(L.pullback_identity.ok);
  CHECK(L.symplectic.ok());
  CHECK(L.pn.sn());

  Covector du(4);
  du[2] = Expr(1);
  CHECK_THROWS_AS(restrict_to_leaf(block.A, block.P, Endomorphism::identity(4), block.leaf(du)), HypothesisViolation);

  Endomorphism mixing = Endomorphism::identity(4);
  mixing(2, 0) = Expr(1);  // N d_q has a d_u part, leaving P#(A*)
  CHECK_THROWS_AS(restrict_to_leaf(block.A, block.P, mixing, block.leaf(dq)), HypothesisViolation);
}

TEST_CASE("Riesz index reports", "[reduction]") {
  SemidirectFixture fx = build_semidirect(aff1_data());
  testgen::Gen gen(55);
  auto reports = riesz_report(fx.algebroid, fx.nijenhuis, random_points(gen, kMuBox, 100));
  for (const auto& r : reports) {
    CHECK(r.riesz_index == 1);
    CHECK(r.kernel_dim == 2);
    CHECK(r.image_dim == 2);
    CHECK(r.direct_sum);
    CHECK_FALSE(r.ill_conditioned);
    for (std::size_t l = 1; l < r.ranks.size(); ++l) CHECK(r.ranks[l] <= r.ranks[l - 1]);
    CHECK(r.ranks.size() == 5);
  }

  TodaFixture toda = build_toda(2);
  PointReport inv = riesz_report_at(toda.atiyah, toda.atiyah_recursion, {1.3, 0.4, 0.2});
  CHECK(inv.riesz_index == 0);
  CHECK(inv.kernel_dim == 0);
  CHECK(inv.image_dim == 4);

  // nilpotent Jordan block of size 3 inside rank 4: ranks 4, 2, 1, 0, 0
  LieAlgebroid R4 = tangent_algebroid({"x1", "x2", "x3", "x4"});
  Endomorphism jordan(4, 4);
  jordan(0, 1) = Expr(1);
  jordan(1, 2) = Expr(1);
  PointReport nil = riesz_report_at(R4, jordan, {0, 0, 0, 0});
  CHECK(nil.ranks == std::vector<int>{4, 2, 1, 0, 0});
  CHECK(nil.riesz_index == 3);
  CHECK(nil.kernel_dim == 4);
  CHECK(nil.direct_sum);
}

TEST_CASE("near-degenerate ranks are flagged", "[reduction]") {
  LieAlgebroid R2 = tangent_algebroid({"x", "y"});
  Endomorphism N(2, 2);
  N(0, 0) = Expr(1);
  N(1, 1) = v("x");
  PointReport r = riesz_report_at(R2, N, {3e-9, 0});
  CHECK(r.ill_conditioned);
}

TEST_CASE("symbolic projector identity on aff(1)", "[reduction]") {
  SemidirectFixture fx = build_semidirect(aff1_data());
  CHECK(fx.nijenhuis * fx.nijenhuis == fx.nijenhuis);
}

TEST_CASE("kernel and image subalgebroids on aff(1)", "[reduction]") {
  SemidirectFixture fx = build_semidirect(aff1_data());
  testgen::Gen gen(56);
  SubalgebroidCheck s = kernel_subalgebroid_check(fx.algebroid, fx.nijenhuis, 1, random_points(gen, kMuBox, 8));
  CHECK(s.symbolic);
  CHECK(s.constant_dimension.ok);
  // N is not Nijenhuis here: T_N(xi2, eps2) = eps1, computed by hand from
  // N xi2 = mu2 eps1, N eps2 = 0 and [xi2, eps2] = eps1 (coadjoint action).
  const LieAlgebroid& A = fx.algebroid;
  Section xi2 = frame_section(A, A.frame_index("xi2")), eps2 = frame_section(A, A.frame_index("eps2"));
  Section t = torsion(A, fx.nijenhuis, xi2, eps2);
  Section eps1 = frame_section(A, A.frame_index("eps1"));
  CHECK(proportional(t, eps1));
  CHECK_FALSE(s.torsion_hypothesis.ok);

  // ker N = span{xi2 - mu2 eps1, eps2}; their bracket is eps1 up to sign,
  // which N maps to eps1 itself, so the kernel is not closed.
  Section k1(4), k2 = eps2;
  k1[A.frame_index("xi2")] = Expr(1);
  k1[A.frame_index("eps1")] = -v("mu2");
  Section kb = bracket(A, k1, k2);
  CHECK(proportional(kb, eps1));
  CHECK_FALSE(is_zero_section(fx.nijenhuis.apply(kb)));
  CHECK_FALSE(s.kernel_closed.ok);
  CHECK_FALSE(s.kernel_closed.witness.empty());

  // im N = span{xi1, eps1}, closed
  Section xi1 = frame_section(A, A.frame_index("xi1"));
  CHECK(is_zero_section(bracket(A, xi1, eps1)));
  CHECK(s.image_closed.ok);

  TodaFixture toda = build_toda(2);
  SubalgebroidCheck inv = kernel_subalgebroid_check(toda.atiyah, toda.atiyah_recursion, 1, {{1.2, 0.1, 0.3}});
  CHECK(inv.kernel_frame.empty());
  CHECK(inv.kernel_closed.ok);
  CHECK(inv.torsion_hypothesis.ok);
}

TEST_CASE("condition F^B evidence", "[reduction]") {
  SemidirectFixture fx = build_semidirect(aff1_data());
  testgen::Gen gen(57);
  FBCheck fb = condition_fb_check(fx.algebroid, fx.nijenhuis, 1, random_points(gen, kMuBox, 6), 3);
  CHECK(fb.consistent.ok);
  CHECK_FALSE(fb.notes.empty());
}

TEST_CASE("fiberwise reduction", "[reduction]") {
  SemidirectFixture fx = build_semidirect(aff1_data());
  testgen::Gen gen(58);
  for (const auto& r : fiberwise_reduce(fx.algebroid, fx.poisson, fx.nijenhuis, random_points(gen, kMuBox, 20))) {
    CHECK(r.ok());
    CHECK(r.quotient_dim == 2);
    CHECK_FALSE(r.n_invertible);
    // N^2 = N, so the induced operator on A / ker N is the identity
    CHECK((r.reduced_n - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-9);
    CHECK(std::abs(r.reduced_p.determinant()) > 1e-6);
  }

  TodaFixture toda = build_toda(2);
  FiberwiseReduction generic = fiberwise_reduce_at(toda.atiyah, toda.pi0, toda.atiyah_recursion, {1.3, 0.4, 0.2});
  CHECK(generic.ok());
  CHECK(generic.n_invertible);
  CHECK(generic.riesz_index == 0);
  CHECK(generic.quotient_dim == 4);
  Eigen::MatrixXd N = evaluate(toda.atiyah_recursion, toda.atiyah.base_ids, {1.3, 0.4, 0.2});
  CHECK((generic.reduced_n.transpose() * generic.reduced_n - N.transpose() * N).norm() < 1e-9);

  // a1 = b1 b2: det N = (a1 - b1 b2)^2 vanishes
  FiberwiseReduction boundary = fiberwise_reduce_at(toda.atiyah, toda.pi0, toda.atiyah_recursion, {1.0, 2.0, 0.5});
  CHECK_FALSE(boundary.n_invertible);
  CHECK_FALSE(boundary.witness.empty());
}
