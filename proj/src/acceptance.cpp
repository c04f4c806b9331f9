#include "pnred/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <numeric>
#include <random>

#include "pnred/fixtures.hpp"
#include "pnred/lifts.hpp"
#include "pnred/sampling.hpp"

namespace pnred {
namespace {

Expr var(const std::string& name) { return Expr::variable(name); }
std::string numbered(const char* stem, int i) { return stem + std::to_string(i); }

class Recorder {
 public:
  explicit Recorder(CriterionResult& result) : result_(result) {}

  void expect(bool condition, const std::string& what) {
    ++result_.subchecks;
    if (!condition) {
      result_.ok = false;
      result_.failures.push_back(what);
    }
  }
  void verdict(const Verdict& v, const std::string& what) {
    expect(v.ok, v.ok ? what : what + ": " + v.witness);
  }
  void flag_ill_conditioned(bool ill, const std::string& what) {
    if (!ill) return;
    result_.ill_conditioned = true;
    result_.failures.push_back("ill-conditioned: " + what);
  }

 private:
  CriterionResult& result_;
};

// Oracles below are written from the defining formulas and share no code
// with the determinant, kernel and recursion routines under test.

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
    for (std::size_t i = 0; i < perm.size() && !term.is_zero(); ++i) term *= m(i, perm[i]);
    out += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

// Expansion along the first row.
Expr pfaffian(const Matrix<Expr>& m) {
  const std::size_t n = m.rows();
  if (n == 0) return Expr(1);
  if (n % 2) return Expr(0);
  Expr out;
  for (std::size_t j = 1; j < n; ++j) {
    if (m(0, j).is_zero()) continue;
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

// extra lies in span(vectors) iff every maximal minor of [vectors | extra]
// vanishes (vectors assumed independent).
bool in_span(const std::vector<Section>& vectors, const Section& extra) {
  const std::size_t cols = vectors.size() + 1, rows = extra.size();
  if (cols > rows) return true;
  std::vector<bool> pick(rows, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(cols), true);
  do {
    Matrix<Expr> minor(cols, cols);
    std::size_t r = 0;
    for (std::size_t i = 0; i < rows; ++i) {
      if (!pick[i]) continue;
      for (std::size_t c = 0; c + 1 < cols; ++c) minor(r, c) = vectors[c][i];
      minor(r, cols - 1) = extra[i];
      ++r;
    }
    if (!permutation_det(minor).is_zero()) return false;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return true;
}

// Toda recursion operator written out column by column on R^{2n}.
Endomorphism toda_recursion_closed_form(int n) {
  const auto N = static_cast<std::size_t>(n);
  auto q = [](int i) { return static_cast<std::size_t>(i - 1); };
  auto p = [&](int i) { return N + static_cast<std::size_t>(i - 1); };
  Endomorphism M(2 * N, 2 * N);
  for (int i = 1; i <= n; ++i) {
    M(q(i), q(i)) = var(numbered("p", i));
    if (i > 1) M(p(i - 1), q(i)) = -exp(var(numbered("q", i - 1)) - var(numbered("q", i)));
    if (i < n) M(p(i + 1), q(i)) = exp(var(numbered("q", i)) - var(numbered("q", i + 1)));
    M(p(i), p(i)) = var(numbered("p", i));
    for (int j = 1; j < i; ++j) M(q(j), p(i)) = Expr(1);
    for (int j = i + 1; j <= n; ++j) M(q(j), p(i)) = Expr(-1);
  }
  return M;
}

Expr product_of_squares(int n) {
  Expr out(1);
  for (int i = 1; i < n; ++i) out *= var(numbered("a", i)) * var(numbered("a", i));
  return out;
}

class RandomData {
 public:
  explicit RandomData(std::uint64_t seed) : rng_(seed) {}

  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Expr expr(const std::vector<std::string>& vars, int max_terms, bool with_exp) {
    Expr out;
    int terms = uniform_int(1, max_terms);
    for (int t = 0; t < terms; ++t) {
      Expr term(Rational(uniform_int(-3, 3), uniform_int(1, 2)));
      for (const auto& v : vars) {
        if (uniform_int(0, 3) == 0) term *= var(v).pow(uniform_int(1, 2));
      }
      if (with_exp && uniform_int(0, 3) == 0) {
        Expr arg(Rational(uniform_int(-2, 2), 2));
        for (const auto& v : vars) arg += Expr(uniform_int(-1, 1)) * var(v);
        term *= exp(arg);
      }
      out += term;
    }
    return out;
  }

  Section section(const LieAlgebroid& A, int max_terms, bool with_exp) {
    Section X(A.rank());
    for (auto& x : X) x = uniform_int(0, 2) == 0 ? Expr() : expr(A.base_vars, max_terms, with_exp);
    return X;
  }

  KForm form(const LieAlgebroid& A, int degree) {
    if (degree == 0) return function_form(expr(A.base_vars, 3, true));
    KForm w(degree);
    for_each_increasing(static_cast<int>(A.rank()), degree, [&](const std::vector<int>& idx) {
      if (uniform_int(0, 1)) w.add(idx, expr(A.base_vars, 2, true));
    });
    return w;
  }

 private:
  std::mt19937_64 rng_;
};

bool zero_field(const TotalSpaceField& U) {
  return std::all_of(U.begin(), U.end(), [](const Expr& e) { return e.is_zero(); });
}

TotalSpaceField field_sub(const TotalSpaceField& U, const TotalSpaceField& V) {
  TotalSpaceField out(U.size());
  for (std::size_t k = 0; k < U.size(); ++k) out[k] = U[k] - V[k];
  return out;
}

std::vector<Expr> vector_sub(const std::vector<Expr>& a, const std::vector<Expr>& b) {
  std::vector<Expr> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
  return out;
}

bool all_zero(const std::vector<Expr>& v) {
  return std::all_of(v.begin(), v.end(), [](const Expr& e) { return e.is_zero(); });
}

std::string point_string(const std::vector<double>& x) {
  std::string out = "(";
  for (std::size_t i = 0; i < x.size(); ++i) out += (i ? ", " : "") + std::to_string(x[i]);
  return out + ")";
}

struct PoissonCase {
  std::string label;
  LieAlgebroid algebroid;
  Bivector bivector;
};

// ---------------------------------------------------------------------------

void toda_pn_structure(Recorder& rec, const AcceptanceOptions& opt) {
  for (int n : {2, 3, 4}) {
    TodaFixture toda = build_toda(n);
    const std::string tag = "n=" + std::to_string(n) + " ";
    rec.verdict(is_poisson(toda.phase, toda.lambda0), tag + "Lambda0 Poisson");
    rec.verdict(is_poisson(toda.phase, toda.lambda1), tag + "Lambda1 Poisson");
    rec.verdict(are_compatible(toda.phase, toda.lambda0, toda.lambda1), tag + "compatible");
    PNVerdict pn = pn_check(toda.phase, toda.lambda0, toda.recursion);
    rec.verdict(pn.torsion_zero, tag + "torsion of N");
    rec.verdict(pn.sharp_commutes, tag + "N P0# = P0# N*");
    rec.verdict(pn.concomitant_zero, tag + "concomitant");

    auto points = sample_box(default_box(toda.phase.base_vars), opt.residual_points, opt.seed + static_cast<unsigned>(n));
    double worst = 0.0;
    std::vector<double> worst_at;
    for (const auto& x : points) {
      double r = std::max({pn_residual_at(toda.phase, toda.lambda0, toda.recursion, x).max(),
                           poisson_residual_at(toda.phase, toda.lambda1, x),
                           compatibility_residual_at(toda.phase, toda.lambda0, toda.lambda1, x)});
      if (r > worst) {
        worst = r;
        worst_at = x;
      }
    }
    rec.expect(worst < 1e-10, tag + "max pointwise residual " + std::to_string(worst) + " at " + point_string(worst_at));
  }
}

void recursion_closed_form(Recorder& rec, const AcceptanceOptions&) {
  for (int n : {2, 3, 4}) {
    TodaFixture toda = build_toda(n);
    Endomorphism hand = toda_recursion_closed_form(n);
    RecursionOperator r = recursion_operator(toda.lambda0, toda.lambda1);
    const std::string tag = "n=" + std::to_string(n) + " ";
    rec.expect(r.exact.has_value(), tag + "recursion operator has polynomial-exp entries");
    if (!r.exact) continue;
    for (std::size_t a = 0; a < hand.rows(); ++a) {
      for (std::size_t b = 0; b < hand.cols(); ++b) {
        const Expr& got = (*r.exact)(a, b);
        rec.expect(got == hand(a, b), tag + "entry (" + toda.phase.frame[a] + ", " + toda.phase.frame[b] +
                                          "): " + got.str() + " vs " + hand(a, b).str());
      }
    }
  }
}

void flaschka_projection(Recorder& rec, const AcceptanceOptions&) {
  for (int n : {2, 3}) {
    TodaFixture toda = build_toda(n);
    const std::string tag = "n=" + std::to_string(n) + " ";
    rec.verdict(anchor_compatibility(toda.projection), tag + "anchor compatibility");
    Bivector p0 = project_bivector(toda.projection, toda.lambda0);
    Bivector p1 = project_bivector(toda.projection, toda.lambda1);
    rec.expect(p0 == toda.lambda0_bar, tag + "Lambda0 projects to " + to_string(p0));
    rec.expect(p1 == toda.lambda1_bar, tag + "Lambda1 projects to " + to_string(p1));
    Verdict endo = projectable_endo_check(toda.projection, toda.recursion);
    rec.expect(!endo.ok, tag + "N reported projectable");
    rec.expect(endo.witness.find("N(Ker Pi) not in Ker Pi") != std::string::npos,
               tag + "endomorphism witness: " + endo.witness);
  }
}

void base_recursion_obstruction(Recorder& rec, const AcceptanceOptions&) {
  for (int n : {2, 3}) {
    TodaFixture toda = build_toda(n);
    const std::string tag = "n=" + std::to_string(n) + " ";
    try {
      recursion_operator(toda.lambda0_bar, toda.lambda1_bar);
      rec.expect(false, tag + "recursion operator on the base did not fail");
    } catch (const DegenerateBivector& err) {
      Covector sum_db(toda.flaschka.rank());
      for (int i = 1; i <= n; ++i) sum_db[toda.flaschka.frame_index(numbered("d_b", i))] = Expr(1);
      rec.expect(proportional(err.witness(), sum_db), tag + "witness " + to_string(err.witness()));
      rec.expect(is_zero_section(sharp(toda.lambda0_bar, sum_db)), tag + "Lambda0_bar#(sum db_i) != 0");
    }
  }
}

void atiyah_sn(Recorder& rec, const AcceptanceOptions&) {
  for (int n : {2, 3}) {
    TodaFixture toda = build_toda(n);
    const LieAlgebroid& A = toda.atiyah;
    const std::string tag = "n=" + std::to_string(n) + " ";
    AlgebroidCheck ac = check_algebroid(A);
    rec.verdict(ac.antisymmetry, tag + "Atiyah antisymmetry");
    rec.verdict(ac.jacobi, tag + "Atiyah Jacobi");
    rec.verdict(ac.anchor_morphism, tag + "Atiyah anchor morphism");

    Expr pf = pfaffian(toda.pi0);
    Expr det_oracle = pf * pf;
    rec.expect(det_oracle == product_of_squares(n), tag + "det pi0 oracle " + det_oracle.str());
    if (n == 2) rec.expect(permutation_det(toda.pi0) == det_oracle, "n=2 permutation det of pi0 differs");
    rec.expect(determinant(toda.pi0) == det_oracle, tag + "library det pi0 " + determinant(toda.pi0).str());

    SymbolicInverse w = invert_poisson(toda.pi0);
    rec.expect(w.exact.has_value(), tag + "Omega has polynomial-exp entries");
    if (w.exact) {
      SymplecticCheck sc = symplectic_check(A, *w.exact);
      rec.verdict(sc.antisymmetric, tag + "Omega antisymmetric");
      rec.verdict(sc.closed, tag + "Omega closed");
      rec.verdict(sc.nondegenerate, tag + "Omega nondegenerate");
      rec.expect(sc.determinant * det_oracle == Expr(1), tag + "det Omega " + sc.determinant.str());
    }
    PNVerdict pn = pn_check(A, toda.pi0, toda.atiyah_recursion);
    rec.verdict(pn.torsion_zero, tag + "N_A torsion");
    rec.verdict(pn.sharp_commutes, tag + "N_A pi0# = pi0# N_A*");
    rec.verdict(pn.concomitant_zero, tag + "concomitant");
    rec.expect(pn.sn(), tag + "SN");
    rec.expect(induced_base_poisson(A, toda.pi0) == toda.lambda0_bar, tag + "rho pi0 rho^T != Lambda0_bar");
    rec.expect(induced_base_poisson(A, toda.pi1) == toda.lambda1_bar, tag + "rho pi1 rho^T != Lambda1_bar");
  }
}

void bihamiltonian(Recorder& rec, const AcceptanceOptions&) {
  for (int n : {2, 3}) {
    TodaFixture toda = build_toda(n);
    const std::string tag = "n=" + std::to_string(n) + " ";
    rec.verdict(bihamiltonian_check(toda.phase, toda.lambda0, toda.lambda1, toda.h0, toda.h1), tag + "phase space");
    rec.verdict(bihamiltonian_check(toda.flaschka, toda.lambda0_bar, toda.lambda1_bar, toda.h0_bar, toda.h1_bar),
                tag + "Flaschka base");
  }
}

void atiyah_hierarchy(Recorder& rec, const AcceptanceOptions&) {
  for (int n : {2, 3}) {
    TodaFixture toda = build_toda(n);
    const std::string tag = "n=" + std::to_string(n) + " ";
    Hierarchy h = hierarchy(toda.atiyah, toda.pi0, toda.atiyah_recursion, 3);
    for (int l = 1; l <= 3; ++l) {
      const PNVerdict& pn = h.pn_powers[static_cast<std::size_t>(l)];
      rec.expect(pn.pn(), tag + "(pi0, N^" + std::to_string(l) + ") PN: " + pn.torsion_zero.witness +
                              pn.sharp_commutes.witness + pn.concomitant_zero.witness);
    }
    for (std::size_t i = 0; i < h.bivectors.size(); ++i) {
      rec.verdict(h.poisson[i], tag + "N^" + std::to_string(i) + " pi0 Poisson");
      for (std::size_t j = i + 1; j < h.bivectors.size(); ++j) {
        rec.verdict(h.compatible[i][j],
                    tag + "N^" + std::to_string(i) + " pi0 and N^" + std::to_string(j) + " pi0 compatible");
      }
    }
  }
}

void lift_identities(Recorder& rec, const AcceptanceOptions& opt) {
  std::vector<std::pair<std::string, LieAlgebroid>> cases = {
      {"toda atiyah", build_toda(2).atiyah}, {"aff1", build_semidirect(aff1_data()).algebroid}};
  RandomData gen(opt.seed + 8);
  for (const auto& [label, A] : cases) {
    TotalSpace T = total_space(A);
    auto complete = [&](const Section& Z) { return lift_section(A, Z, LiftKind::complete); };
    auto vertical = [&](const Section& Z) { return lift_section(A, Z, LiftKind::vertical); };
    int bad_cc = 0, bad_vv = 0, bad_cv = 0;
    for (int trial = 0; trial < opt.lift_pairs; ++trial) {
      Section X = gen.section(A, 1, true), Y = gen.section(A, 1, true);
      Section XY = bracket(A, X, Y);
      bad_cc += !zero_field(field_sub(total_space_bracket(T, complete(X), complete(Y)), complete(XY)));
      bad_vv += !zero_field(total_space_bracket(T, vertical(X), vertical(Y)));
      bad_cv += !zero_field(field_sub(total_space_bracket(T, complete(X), vertical(Y)), vertical(XY)));
    }
    rec.expect(bad_cc == 0, label + ": [X^c, Y^c] != [X,Y]^c for " + std::to_string(bad_cc) + " pairs");
    rec.expect(bad_vv == 0, label + ": [X^v, Y^v] != 0 for " + std::to_string(bad_vv) + " pairs");
    rec.expect(bad_cv == 0, label + ": [X^c, Y^v] != [X,Y]^v for " + std::to_string(bad_cv) + " pairs");

    // frame elements: e_a^v = d/dy^a, e_a^c = rho_a^i d/dx^i - C_ab^g y^b d/dy^g
    const std::size_t n = A.dim(), r = A.rank();
    for (std::size_t a = 0; a < r; ++a) {
      TotalSpaceField v_hand(n + r), c_hand(n + r);
      v_hand[n + a] = Expr(1);
      for (std::size_t i = 0; i < n; ++i) c_hand[i] = A.anchor(a, i);
      for (std::size_t b = 0; b < r; ++b) {
        for (std::size_t g = 0; g < r; ++g) c_hand[n + g] -= A.C(a, b, g) * var("y_" + A.frame[b]);
      }
      Section e = frame_section(A, a);
      rec.expect(vertical(e) == v_hand, label + ": vertical lift of " + A.frame[a]);
      rec.expect(complete(e) == c_hand, label + ": complete lift of " + A.frame[a]);
    }
  }
}

void semidirect_fixture(Recorder& rec, const AcceptanceOptions& opt) {
  SemidirectFixture fx = build_semidirect(aff1_data());
  const LieAlgebroid& A = fx.algebroid;
  SymplecticCheck sc = symplectic_check(A, fx.omega);
  rec.verdict(sc.closed, "Omega closed");
  rec.verdict(sc.nondegenerate, "Omega nondegenerate");
  rec.expect(sc.determinant == Expr(1), "det Omega = " + sc.determinant.str());
  Expr pf = pfaffian(fx.omega);
  rec.expect(pf * pf == Expr(1), "Pfaffian oracle gives det Omega = " + (pf * pf).str());
  rec.expect(fx.nijenhuis * fx.nijenhuis == fx.nijenhuis, "N^2 != N");

  auto points = sample_box(default_box(A.base_vars), opt.riesz_points, opt.seed + 9);
  int wrong_index = 0, wrong_kernel = 0;
  for (const auto& r : riesz_report(A, fx.nijenhuis, points)) {
    wrong_index += r.riesz_index != 1;
    wrong_kernel += r.kernel_dim != 2;
    rec.flag_ill_conditioned(r.ill_conditioned, "Riesz ranks at " + point_string(r.point));
  }
  rec.expect(wrong_index == 0, std::to_string(wrong_index) + " points with Riesz index != 1");
  rec.expect(wrong_kernel == 0, std::to_string(wrong_kernel) + " points with dim ker N != 2");

  // hand basis: Omega-orthogonal complement of span{xi1, eps1}
  Section k1(4), k2(4);
  k1[A.frame_index("xi2")] = Expr(1);
  k1[A.frame_index("eps1")] = -var("mu2");
  k2[A.frame_index("eps2")] = Expr(1);
  for (const auto& k : {k1, k2}) {
    rec.expect(pairing(fx.omega, frame_section(A, A.frame_index("xi1")), k).is_zero() &&
                   pairing(fx.omega, frame_section(A, A.frame_index("eps1")), k).is_zero(),
               "hand basis vector not Omega-orthogonal to F");
  }
  std::vector<std::vector<Expr>> kernel = symbolic_kernel(fx.nijenhuis);
  rec.expect(kernel.size() == 2, "symbolic kernel of N has " + std::to_string(kernel.size()) + " vectors");
  if (kernel.size() == 2) {
    std::vector<Section> computed(kernel.begin(), kernel.end());
    bool same = in_span(computed, k1) && in_span(computed, k2) && in_span({k1, k2}, computed[0]) &&
                in_span({k1, k2}, computed[1]);
    rec.expect(same, "ker N = span" + to_string(kernel[0]) + to_string(kernel[1]) + " differs from the hand basis");

    auto anchor_rank = [&](const std::vector<double>& x) {
      Eigen::MatrixXd images(static_cast<Eigen::Index>(A.dim()), 2);
      for (std::size_t c = 0; c < 2; ++c) {
        images.col(static_cast<Eigen::Index>(c)) = evaluate(anchor_vector(A, Section(kernel[c])), A.base_ids, x);
      }
      return numeric_rank(images);
    };
    for (const auto& x : std::vector<std::vector<double>>{{0.3, 0.0}, {-1.7, 0.0}, {1.2, 0.0}}) {
      RankDecision d = anchor_rank(x);
      rec.expect(d.rank == 1, "rank rho(ker N) at " + point_string(x) + " is " + std::to_string(d.rank));
      rec.flag_ill_conditioned(d.ill_conditioned, "rank rho(ker N) at " + point_string(x));
    }
    int generic_bad = 0;
    for (const auto& x : points) {
      if (std::abs(x[1]) < 1e-3) continue;
      generic_bad += anchor_rank(x).rank != 2;
    }
    rec.expect(generic_bad == 0, std::to_string(generic_bad) + " generic points with rank rho(ker N) != 2");
  }

  int bad_fiberwise = 0;
  std::string first;
  for (const auto& f : fiberwise_reduce(A, fx.poisson, fx.nijenhuis, points)) {
    bool good = f.reduced_n_invertible && f.reduced_p_nondegenerate && f.quotient_dim == 2 &&
                (f.reduced_n - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-9;
    rec.flag_ill_conditioned(f.ill_conditioned, "fiberwise reduction at " + point_string(f.point));
    if (!good && bad_fiberwise++ == 0) first = point_string(f.point) + " " + f.witness;
  }
  rec.expect(bad_fiberwise == 0, std::to_string(bad_fiberwise) + " points where the reduced N is not the identity "
                                                                 "or the reduced P is degenerate, first " + first);
}

void structural_properties(Recorder& rec, const AcceptanceOptions& opt) {
  TodaFixture toda = build_toda(2);
  SemidirectFixture fx = build_semidirect(aff1_data());
  RandomData gen(opt.seed + 10);

  std::vector<std::pair<std::string, LieAlgebroid>> valid = {
      {"phase", toda.phase}, {"flaschka", toda.flaschka}, {"atiyah", toda.atiyah}, {"aff1", fx.algebroid}};
  for (const auto& [label, A] : valid) {
    int bad = 0;
    for (int trial = 0; trial < opt.random_forms; ++trial) {
      int degree = std::min(trial % 3, static_cast<int>(A.rank()));
      bad += !exterior_derivative(A, exterior_derivative(A, gen.form(A, degree))).is_zero();
    }
    rec.expect(bad == 0, label + ": d^2 != 0 on " + std::to_string(bad) + " random forms");
  }

  // Jacobi-breaking perturbation of the Atiyah structure functions
  LieAlgebroid perturbed = toda.atiyah;
  std::size_t e2 = perturbed.frame_index("e2"), f1 = perturbed.frame_index("f1"), f2 = perturbed.frame_index("f2");
  perturbed.C(e2, f1, f2) = var("a1");
  perturbed.C(f1, e2, f2) = -var("a1");
  AlgebroidCheck broken = check_algebroid(perturbed);
  rec.expect(!broken.jacobi.ok && !broken.jacobi.witness.empty(), "perturbed Atiyah algebroid passes Jacobi");

  std::vector<PoissonCase> poisson = {
      {"Lambda0", toda.phase, toda.lambda0},          {"Lambda1", toda.phase, toda.lambda1},
      {"Lambda0_bar", toda.flaschka, toda.lambda0_bar}, {"Lambda1_bar", toda.flaschka, toda.lambda1_bar},
      {"pi0", toda.atiyah, toda.pi0},                 {"pi1", toda.atiyah, toda.pi1},
      {"aff1 P", fx.algebroid, fx.poisson},           {"aff1 lambda_h1", fx.algebroid, fx.lambda_h1}};
  for (const auto& pc : poisson) {
    const LieAlgebroid& A = pc.algebroid;
    const Bivector& P = pc.bivector;
    const std::size_t r = A.rank();
    std::vector<Covector> covectors;
    for (std::size_t a = 0; a < r; ++a) covectors.push_back(dual_frame_covector<Expr>(r, a));
    for (int extra = 0; extra < 3; ++extra) covectors.push_back(gen.section(A, 1, false));
    auto kb = [&](const Covector& x, const Covector& y) { return koszul_bracket(A, P, x, y); };
    int bad_jacobi = 0, bad_morphism = 0;
    const std::size_t m = covectors.size();
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        const Covector &x = covectors[i], &y = covectors[j];
        bad_morphism += !all_zero(vector_sub(sharp(P, kb(x, y)), bracket(A, sharp(P, x), sharp(P, y))));
        // mixed frame/random triples only, to keep the symbolic cost bounded
        if (i >= r && j >= r) continue;
        for (std::size_t k = j + 1; k < m; ++k) {
          const Covector& z = covectors[k];
          std::vector<Expr> jac = kb(kb(x, y), z);
          std::vector<Expr> t2 = kb(kb(y, z), x), t3 = kb(kb(z, x), y);
          for (std::size_t c = 0; c < r; ++c) jac[c] += t2[c] + t3[c];
          bad_jacobi += !all_zero(jac);
        }
      }
    }
    rec.expect(bad_jacobi == 0, pc.label + ": Koszul Jacobi fails on " + std::to_string(bad_jacobi) + " triples");
    rec.expect(bad_morphism == 0, pc.label + ": P#[a,b]_P != [P#a, P#b] on " + std::to_string(bad_morphism) + " pairs");
  }

  for (const auto& pc : {poisson[0], poisson[4]}) {
    AlgebroidCheck dual = check_algebroid(dual_algebroid(pc.algebroid, pc.bivector));
    rec.expect(dual.valid(), "dual algebroid of " + pc.label + ": " + dual.antisymmetry.witness +
                                 dual.jacobi.witness + dual.anchor_morphism.witness);
  }

  // restriction to leaves
  LeafSpec full;
  full.full_rank = true;
  full.sample_points = sample_box(default_box(toda.atiyah.base_vars), 5, opt.seed + 11);
  LeafRestriction atiyah_leaf = restrict_to_leaf(toda.atiyah, toda.pi0, toda.atiyah_recursion, full);
  rec.verdict(atiyah_leaf.omega_flat_identity, "atiyah leaf: Omega_L^flat identity");
  rec.verdict(atiyah_leaf.pullback_identity, "atiyah leaf: pullback identity");
  full.sample_points = sample_box(default_box(fx.algebroid.base_vars), 5, opt.seed + 12);
  LeafRestriction aff1_leaf = restrict_to_leaf(fx.algebroid, fx.poisson, fx.nijenhuis, full);
  rec.verdict(aff1_leaf.omega_flat_identity, "aff1 leaf: Omega_L^flat identity");
  rec.verdict(aff1_leaf.pullback_identity, "aff1 leaf: pullback identity");

  // P = dq ^ dp block inside R^4, leaf u = 1/2, w = -1
  LieAlgebroid R4 = tangent_algebroid({"q", "p", "u", "w"});
  Bivector block(4, 4);
  block(0, 1) = Expr(1);
  block(1, 0) = Expr(-1);
  LeafSpec plane;
  plane.leaf_vars = {"q", "p"};
  plane.embedding = {var("q"), var("p"), Expr(Rational(1, 2)), Expr(-1)};
  Covector minus_dp(4), dq(4);
  minus_dp[1] = Expr(-1);
  dq[0] = Expr(1);
  plane.generators = {minus_dp, dq};
  plane.sample_points = {{0.1, 0.2}, {-0.7, 1.3}};
  LeafRestriction plane_leaf = restrict_to_leaf(R4, block, Endomorphism::identity(4), plane);
  rec.verdict(plane_leaf.omega_flat_identity, "plane leaf: Omega_L^flat identity");
  rec.verdict(plane_leaf.pullback_identity, "plane leaf: pullback identity");

  // ker N^k (+) im N^k = A
  auto check_direct_sum = [&](const std::string& label, const LieAlgebroid& A, const Endomorphism& N,
                              const std::vector<std::vector<double>>& points) {
    int bad = 0;
    for (const auto& r : riesz_report(A, N, points)) {
      bad += !r.direct_sum;
      rec.flag_ill_conditioned(r.ill_conditioned, label + " Riesz ranks at " + point_string(r.point));
    }
    rec.expect(bad == 0, label + ": direct sum fails at " + std::to_string(bad) + " points");
  };
  check_direct_sum("aff1", fx.algebroid, fx.nijenhuis,
                   sample_box(default_box(fx.algebroid.base_vars), opt.riesz_points, opt.seed + 13));
  check_direct_sum("atiyah", toda.atiyah, toda.atiyah_recursion,
                   sample_box(default_box(toda.atiyah.base_vars), opt.riesz_points, opt.seed + 14));
}

void boundary_locus(Recorder& rec, const AcceptanceOptions& opt) {
  TodaFixture toda = build_toda(2);
  const LieAlgebroid& A = toda.atiyah;
  Expr pf = pfaffian(toda.pi1);
  Expr a1 = var("a1"), b1b2 = var("b1") * var("b2");
  Expr expected = a1 * a1 * (a1 - b1b2) * (a1 - b1b2);
  rec.expect(pf * pf == expected, "Pfaffian oracle: det pi1 = " + (pf * pf).str());
  rec.expect(determinant(toda.pi1) == pf * pf, "library det pi1 = " + determinant(toda.pi1).str());

  // points on a1 = b1 b2 with a1 > 0
  auto raw = sample_box({{0.8, 1.4}, {0.8, 1.4}}, 20, opt.seed + 15);
  int missed = 0;
  for (const auto& bb : raw) {
    std::vector<double> x = {bb[0] * bb[1], bb[0], bb[1]};
    FiberwiseReduction f = fiberwise_reduce_at(A, toda.pi0, toda.atiyah_recursion, x);
    if (f.n_invertible || f.witness.empty()) ++missed;
  }
  rec.expect(missed == 0, std::to_string(missed) + " points on a1 = b1 b2 where N_A was reported invertible");

  int false_alarm = 0;
  for (const auto& x : sample_box(default_box(A.base_vars), 50, opt.seed + 16)) {
    if (std::abs(x[0] - x[1] * x[2]) < 0.05) continue;
    FiberwiseReduction f = fiberwise_reduce_at(A, toda.pi0, toda.atiyah_recursion, x);
    false_alarm += !(f.n_invertible && f.ok());
    rec.flag_ill_conditioned(f.ill_conditioned, "fiberwise reduction at " + point_string(x));
  }
  rec.expect(false_alarm == 0, std::to_string(false_alarm) + " generic points where N_A was reported singular");
}

struct CriterionDef {
  int id;
  const char* title;
  void (*run)(Recorder&, const AcceptanceOptions&);
};

const CriterionDef kCriteria[] = {
    {1, "Toda PN structure on R^2n, n = 2, 3, 4", toda_pn_structure},
    {2, "recursion operator equals the closed form", recursion_closed_form},
    {3, "Flaschka projection of the Toda bivectors", flaschka_projection},
    {4, "recursion obstruction on the Flaschka base", base_recursion_obstruction},
    {5, "Toda Atiyah algebroid is symplectic-Nijenhuis", atiyah_sn},
    {6, "bi-Hamiltonian identities", bihamiltonian},
    {7, "hierarchy of the Atiyah PN structure", atiyah_hierarchy},
    {8, "complete and vertical lift identities", lift_identities},
    {9, "aff(1) semidirect fixture", semidirect_fixture},
    {10, "structural property suites", structural_properties},
    {11, "degeneracy locus a1 = b1 b2 of the Atiyah recursion operator", boundary_locus},
};

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, const std::vector<int>& only) {
  std::vector<CriterionResult> out;
  for (const auto& def : kCriteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), def.id) == only.end()) continue;
    CriterionResult result;
    result.id = def.id;
    result.title = def.title;
    Recorder rec(result);
    auto start = std::chrono::steady_clock::now();
    try {
      def.run(rec, options);
    } catch (const std::exception& err) {
      rec.expect(false, std::string("exception: ") + err.what());
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(std::move(result));
  }
  return out;
}

}  // namespace pnred
