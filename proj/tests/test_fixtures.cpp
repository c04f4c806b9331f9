#include <catch_amalgamated.hpp>

#include <numeric>

#include "generators.hpp"
#include "pnred/fixtures.hpp"

using namespace pnred;

namespace {

Expr v(const std::string& name) { return Expr::variable(name); }

void add_wedge(Bivector& P, std::size_t a, std::size_t b, const Expr& c) {
  P(a, b) += c;
  P(b, a) -= c;
}

// Determinant by summing over permutations.
Expr permutation_det(const Matrix<Expr>& m) {
  std::vector<std::size_t> perm(m.rows());
  std::iota(perm.begin(), perm.end(), 0);
  Expr out;
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      for (std::size_t j = i + 1; j < perm.size(); ++j) inversions += perm[i] > perm[j];
    }
    Expr term(inversions % 2 ? -1 : 1);
    for (std::size_t i = 0; i < perm.size(); ++i) term *= m(i, perm[i]);
    out += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

// True when every maximal minor of the column stack [vectors..., extra]
// vanishes, i.e. extra lies in the span of vectors.
bool in_span(const std::vector<Section>& vectors, const Section& extra) {
  const std::size_t cols = vectors.size() + 1, rows = extra.size();
  std::vector<bool> pick(rows, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(cols), true);
  do {
    Matrix<Expr> minor(cols, cols);
    std::size_t r = 0;
    for (std::size_t i = 0; i < rows; ++i) {
      if (!pick[i]) continue;
      for (std::size_t c = 0; c < vectors.size(); ++c) minor(r, c) = vectors[c][i];
      minor(r, cols - 1) = extra[i];
      ++r;
    }
    if (!permutation_det(minor).is_zero()) return false;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return true;
}

}  // namespace

TEST_CASE("Toda fixtures build and self-verify", "[fixtures]") {
  for (int n : {2, 3, 4}) CHECK_NOTHROW(build_toda(n));
  CHECK_THROWS_AS(build_toda(1), std::invalid_argument);
}

TEST_CASE("Toda n = 2 entries", "[fixtures]") {
  TodaFixture toda = build_toda(2);
  // N(d_p2) = p2 d_p2 + d_q1
  std::vector<Expr> column = toda.recursion.col(toda.phase.frame_index("d_p2"));
  std::vector<Expr> expected(4);
  expected[toda.phase.frame_index("d_p2")] = v("p2");
  expected[toda.phase.frame_index("d_q1")] = Expr(1);
  CHECK(column == expected);

  // pi1 = -a1 e1^e2 + a1 e1^(b1 f1 - b2 f2) + b2 e2^f2 - a1 f1^f2
  const LieAlgebroid& A = toda.atiyah;
  std::size_t e1 = A.frame_index("e1"), e2 = A.frame_index("e2"), f1 = A.frame_index("f1"), f2 = A.frame_index("f2");
  Bivector pi1(4, 4);
  add_wedge(pi1, e1, e2, -v("a1"));
  add_wedge(pi1, e1, f1, v("a1") * v("b1"));
  add_wedge(pi1, e1, f2, -v("a1") * v("b2"));
  add_wedge(pi1, e2, f2, v("b2"));
  add_wedge(pi1, f1, f2, -v("a1"));
  CHECK(toda.pi1 == pi1);

  Bivector pi0(4, 4);
  add_wedge(pi0, e1, f1, v("a1"));
  add_wedge(pi0, e1, f2, -v("a1"));
  add_wedge(pi0, e2, f2, Expr(1));
  CHECK(toda.pi0 == pi0);

  // det pi1 = a1^2 (a1 - b1 b2)^2, det N_A = (a1 - b1 b2)^2
  Expr gap = v("a1") - v("b1") * v("b2");
  CHECK(permutation_det(toda.pi1) == v("a1") * v("a1") * gap * gap);
  CHECK(permutation_det(toda.atiyah_recursion) == gap * gap);
}

TEST_CASE("Toda n = 3 reduced bivector", "[fixtures]") {
  TodaFixture toda = build_toda(3);
  const LieAlgebroid& B = toda.flaschka;
  Bivector hand(5, 5);
  for (int i = 1; i <= 2; ++i) {
    std::size_t a = B.frame_index("d_a" + std::to_string(i));
    add_wedge(hand, a, B.frame_index("d_b" + std::to_string(i)), v("a" + std::to_string(i)));
    add_wedge(hand, a, B.frame_index("d_b" + std::to_string(i + 1)), -v("a" + std::to_string(i)));
  }
  CHECK(toda.lambda0_bar == hand);
  Expr h1 = Expr(Rational(1, 2)) * (v("b1") * v("b1") + v("b2") * v("b2") + v("b3") * v("b3")) + v("a1") + v("a2");
  CHECK(toda.h1_bar == h1);
}

TEST_CASE("passage to the Atiyah algebroid", "[fixtures]") {
  for (int n : {2, 3}) {
    AtiyahPassage passage = invariant_pn_to_atiyah(build_toda(n));
    CHECK(passage.atiyah_pn.sn());
    CHECK(passage.base_compatible.ok);
    CHECK(passage.induced_match.ok);
  }
}

TEST_CASE("aff(1) semidirect fixture", "[fixtures]") {
  SemidirectFixture fx = build_semidirect(aff1_data());
  Expr mu2 = v("mu2");
  TwoForm omega(4, 4);
  omega(0, 1) = mu2;
  omega(1, 0) = -mu2;
  omega(0, 2) = Expr(1);
  omega(2, 0) = Expr(-1);
  omega(1, 3) = Expr(1);
  omega(3, 1) = Expr(-1);
  CHECK(fx.omega == omega);
  CHECK(symplectic_check(fx.algebroid, fx.omega).ok());
  CHECK(fx.nijenhuis * fx.nijenhuis == fx.nijenhuis);
  CHECK(fx.recorded_sign == -1);
  CHECK(is_poisson(fx.algebroid, fx.lambda_h1).ok);

  const LieAlgebroid& A = fx.algebroid;
  Section xi1 = frame_section(A, 0), eps1 = frame_section(A, 2);
  // F = span{xi1, eps1} is symplectic: Omega(xi1, eps1) = 1
  CHECK(pairing(fx.omega, xi1, eps1) == Expr(1));
  CHECK(fx.nijenhuis.apply(xi1) == xi1);
  CHECK(fx.nijenhuis.apply(eps1) == eps1);
}

TEST_CASE("aff(1) kernel of N against the orthogonality conditions", "[fixtures]") {
  SemidirectFixture fx = build_semidirect(aff1_data());
  const LieAlgebroid& A = fx.algebroid;
  Section k1(4), k2(4);
  k1[A.frame_index("xi2")] = Expr(1);
  k1[A.frame_index("eps1")] = -v("mu2");
  k2[A.frame_index("eps2")] = Expr(1);
  CHECK(is_zero_section(fx.nijenhuis.apply(k1)));
  CHECK(is_zero_section(fx.nijenhuis.apply(k2)));

  std::vector<std::vector<Expr>> kernel = symbolic_kernel(fx.nijenhuis);
  REQUIRE(kernel.size() == 2);
  std::vector<Section> computed(kernel.begin(), kernel.end());
  CHECK(in_span(computed, k1));
  CHECK(in_span(computed, k2));
  CHECK(in_span({k1, k2}, computed[0]));
  CHECK(in_span({k1, k2}, computed[1]));
  CHECK_FALSE(in_span({k1, k2}, frame_section(A, 0)));

  // Omega-orthogonal to F = span{xi1, eps1}
  for (const auto& k : {k1, k2}) {
    CHECK(pairing(fx.omega, frame_section(A, 0), k).is_zero());
    CHECK(pairing(fx.omega, frame_section(A, 2), k).is_zero());
  }
}

TEST_CASE("rank jump of the anchor on ker N", "[fixtures]") {
  SemidirectFixture fx = build_semidirect(aff1_data());
  const LieAlgebroid& A = fx.algebroid;
  std::vector<std::vector<Expr>> kernel = symbolic_kernel(fx.nijenhuis);
  REQUIRE(kernel.size() == 2);
  auto anchor_rank = [&](double mu1, double mu2) {
    Eigen::MatrixXd images(2, 2);
    for (std::size_t c = 0; c < 2; ++c) {
      images.col(static_cast<Eigen::Index>(c)) = evaluate(anchor_vector(A, Section(kernel[c])), A.base_ids, {mu1, mu2});
    }
    return numeric_rank(images).rank;
  };
  CHECK(anchor_rank(0.3, 0.0) == 1);
  CHECK(anchor_rank(-1.1, 0.0) == 1);
  CHECK(anchor_rank(0.3, 0.7) == 2);
  CHECK(anchor_rank(0.3, -1.4) == 2);
}

TEST_CASE("semidirect data validation", "[fixtures]") {
  LieAlgebraData bad = aff1_data();
  bad.h1 = {1};
  try {
    build_semidirect(bad);
    FAIL("expected the ideal check to fail");
  } catch (const std::invalid_argument& err) {
    CHECK(std::string(err.what()).find("[xi_1,xi_2]") != std::string::npos);
  }
  LieAlgebraData asym = aff1_data();
  asym.bracket[1][0][1] = 1;
  CHECK_THROWS_AS(build_semidirect(asym), std::invalid_argument);

  LieAlgebraData abelian;
  abelian.dimension = 2;
  abelian.bracket.assign(2, std::vector<std::vector<Rational>>(2, std::vector<Rational>(2, Rational(0))));
  abelian.h1 = {0};
  SemidirectFixture fx = build_semidirect(abelian);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) CHECK(fx.nijenhuis(a, b).is_constant());
  }
  CHECK(torsion_verdict(fx.algebroid, fx.nijenhuis).ok);
}
