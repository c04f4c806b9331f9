#include "pnred/fixtures.hpp"

#include <stdexcept>

namespace pnred {

namespace {

Expr var(const std::string& name) { return Expr::variable(name); }
std::string idx(const std::string& stem, int i) { return stem + std::to_string(i); }

void require(bool ok, const std::string& what) {
  if (!ok) throw std::logic_error("fixture self-check failed: " + what);
}

// Adds f * (X ^ Y) for coordinate frame indices.
void add_wedge(Bivector& P, std::size_t a, std::size_t b, const Expr& f) {
  P(a, b) += f;
  P(b, a) -= f;
}

}  // namespace

TodaFixture build_toda(int n) {
  if (n < 2) throw std::invalid_argument("the Toda fixture needs n >= 2");
  TodaFixture t;
  t.n = n;
  const auto N = static_cast<std::size_t>(n);
  std::vector<std::string> phase_vars;
  for (int i = 1; i <= n; ++i) phase_vars.push_back(idx("q", i));
  for (int i = 1; i <= n; ++i) phase_vars.push_back(idx("p", i));
  t.phase = tangent_algebroid(phase_vars);
  auto q = [&](int i) { return static_cast<std::size_t>(i - 1); };
  auto p = [&](int i) { return N + static_cast<std::size_t>(i - 1); };
  auto P = [&](int i) { return var(idx("p", i)); };
  // exponential interaction between neighbours i and i+1
  auto link = [&](int i) { return exp(var(idx("q", i)) - var(idx("q", i + 1))); };

  t.lambda0 = Bivector(2 * N, 2 * N);
  t.lambda1 = Bivector(2 * N, 2 * N);
  for (int i = 1; i <= n; ++i) {
    add_wedge(t.lambda0, q(i), p(i), Expr(1));
    add_wedge(t.lambda1, q(i), p(i), P(i));
    for (int j = i + 1; j <= n; ++j) add_wedge(t.lambda1, q(i), q(j), Expr(-1));
    if (i < n) add_wedge(t.lambda1, p(i + 1), p(i), link(i));
  }

  t.recursion = Endomorphism(2 * N, 2 * N);
  for (int i = 1; i <= n; ++i) {
    t.recursion(q(i), q(i)) = P(i);
    if (i > 1) t.recursion(p(i - 1), q(i)) = -link(i - 1);
    if (i < n) t.recursion(p(i + 1), q(i)) = link(i);
    t.recursion(p(i), p(i)) = P(i);
    for (int j = 1; j <= n; ++j) {
      if (j < i) t.recursion(q(j), p(i)) = Expr(1);
      if (j > i) t.recursion(q(j), p(i)) = Expr(-1);
    }
  }

  for (int i = 1; i <= n; ++i) {
    t.h0 += P(i);
    t.h1 += Expr(Rational(1, 2)) * P(i) * P(i);
    if (i < n) t.h1 += link(i);
  }

  std::vector<std::string> quotient_vars;
  for (int i = 1; i < n; ++i) quotient_vars.push_back(idx("a", i));
  for (int i = 1; i <= n; ++i) quotient_vars.push_back(idx("b", i));
  t.flaschka = tangent_algebroid(quotient_vars);
  const std::size_t m = quotient_vars.size();
  auto ai = [&](int i) { return static_cast<std::size_t>(i - 1); };
  auto bi = [&](int i) { return N - 1 + static_cast<std::size_t>(i - 1); };
  auto A = [&](int i) { return var(idx("a", i)); };
  auto B = [&](int i) { return var(idx("b", i)); };
  t.lambda0_bar = Bivector(m, m);
  t.lambda1_bar = Bivector(m, m);
  for (int i = 1; i < n; ++i) {
    add_wedge(t.lambda0_bar, ai(i), bi(i), A(i));
    add_wedge(t.lambda0_bar, ai(i), bi(i + 1), -A(i));
    add_wedge(t.lambda1_bar, ai(i), bi(i), A(i) * B(i));
    add_wedge(t.lambda1_bar, ai(i), bi(i + 1), -A(i) * B(i + 1));
    add_wedge(t.lambda1_bar, bi(i + 1), bi(i), A(i));
    if (i + 1 < n) add_wedge(t.lambda1_bar, ai(i + 1), ai(i), A(i) * A(i + 1));
  }
  for (int i = 1; i <= n; ++i) {
    t.h0_bar += B(i);
    t.h1_bar += Expr(Rational(1, 2)) * B(i) * B(i);
    if (i < n) t.h1_bar += A(i);
  }

  t.projection.name = "flaschka";
  t.projection.source = t.phase;
  t.projection.target = t.flaschka;
  for (int i = 1; i < n; ++i) t.projection.base_map.push_back(link(i));
  for (int i = 1; i <= n; ++i) t.projection.base_map.push_back(P(i));
  t.projection.fiber_map = Matrix<Expr>(m, 2 * N);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < 2 * N; ++k) {
      t.projection.fiber_map(j, k) = t.projection.base_map[j].diff(t.phase.base_ids[k]);
    }
  }
  validate_epimorphism(t.projection);

  std::vector<std::string> frame;
  for (int i = 1; i <= n; ++i) frame.push_back(idx("e", i));
  for (int j = 1; j <= n; ++j) frame.push_back(idx("f", j));
  auto e = [&](int i) { return static_cast<std::size_t>(i - 1); };
  auto f = [&](int j) { return N + static_cast<std::size_t>(j - 1); };
  Matrix<Expr> anchor(2 * N, m);
  for (int i = 1; i < n; ++i) anchor(e(i), ai(i)) = Expr(1);
  for (int j = 1; j <= n; ++j) anchor(f(j), bi(j)) = Expr(1);
  t.atiyah = make_algebroid(quotient_vars, frame, anchor, zero_structure(2 * N));

  t.pi0 = Bivector(2 * N, 2 * N);
  t.pi1 = Bivector(2 * N, 2 * N);
  for (int i = 1; i < n; ++i) {
    add_wedge(t.pi0, e(i), f(i), A(i));
    add_wedge(t.pi0, e(i), f(i + 1), -A(i));
    add_wedge(t.pi1, e(i), f(i), A(i) * B(i));
    add_wedge(t.pi1, e(i), f(i + 1), -A(i) * B(i + 1));
    add_wedge(t.pi1, f(i), f(i + 1), -A(i));
    if (i + 1 < n) add_wedge(t.pi1, e(i), e(i + 1), -A(i) * A(i + 1));
  }
  add_wedge(t.pi0, e(n), f(n), Expr(1));
  add_wedge(t.pi1, e(n - 1), e(n), -A(n - 1));
  add_wedge(t.pi1, e(n), f(n), B(n));

  RecursionOperator rec = recursion_operator(t.pi0, t.pi1);
  require(rec.exact.has_value(), "pi1 pi0^{-1} is not in the expression class");
  t.atiyah_recursion = *rec.exact;

  for (const auto* biv : {&t.lambda0, &t.lambda1, &t.lambda0_bar, &t.lambda1_bar, &t.pi0, &t.pi1}) {
    require(is_antisymmetric(*biv, "bivector").ok, "stored bivector is not antisymmetric");
  }
  require(check_algebroid(t.atiyah).valid(), "Atiyah algebroid axioms");
  require(anchor_compatibility(t.projection).ok, "projection preserves anchors");
  return t;
}

LieAlgebraData aff1_data() {
  LieAlgebraData d;
  d.dimension = 2;
  d.bracket.assign(2, std::vector<std::vector<Rational>>(2, std::vector<Rational>(2, Rational(0))));
  // [xi_1, xi_2] = xi_2
  d.bracket[0][1][1] = 1;
  d.bracket[1][0][1] = -1;
  d.h1 = {0};
  return d;
}

SemidirectFixture build_semidirect(const LieAlgebraData& data) {
  const int d = data.dimension;
  if (d <= 0) throw std::invalid_argument("Lie algebra dimension must be positive");
  const auto D = static_cast<std::size_t>(d);
  if (data.bracket.size() != D) throw std::invalid_argument("structure constants have the wrong shape");
  std::vector<bool> in_h1(D, false);
  for (int i : data.h1) {
    if (i < 0 || i >= d) throw std::invalid_argument("h1 index out of range");
    in_h1[static_cast<std::size_t>(i)] = true;
  }
  auto c = [&](std::size_t i, std::size_t j, std::size_t k) { return data.bracket.at(i).at(j).at(k); };
  for (std::size_t i = 0; i < D; ++i) {
    for (std::size_t j = 0; j < D; ++j) {
      for (std::size_t k = 0; k < D; ++k) {
        if (c(i, j, k) != -c(j, i, k)) throw std::invalid_argument("structure constants are not antisymmetric");
        std::string br = "[xi_" + std::to_string(i + 1) + ",xi_" + std::to_string(j + 1) + "]";
        if (in_h1[i] && in_h1[j] && !in_h1[k] && c(i, j, k) != 0) {
          throw std::invalid_argument("h1 is not a subalgebra: " + br + " has xi_" + std::to_string(k + 1) +
                                      "-component " + c(i, j, k).get_str());
        }
        if (!in_h1[i] && in_h1[k] && c(i, j, k) != 0) {
          throw std::invalid_argument("complement of h1 is not an ideal: " + br + " has xi_" +
                                      std::to_string(k + 1) + "-component " + c(i, j, k).get_str());
        }
      }
    }
  }

  SemidirectFixture s;
  s.data = data;
  std::vector<std::string> mu;
  std::vector<std::string> frame;
  for (int a = 1; a <= d; ++a) mu.push_back(idx("mu", a));
  for (int a = 1; a <= d; ++a) frame.push_back(idx("xi", a));
  for (int a = 1; a <= d; ++a) frame.push_back(idx("eps", a));
  const std::size_t r = 2 * D;
  Matrix<Expr> anchor(r, D);
  for (std::size_t a = 0; a < D; ++a) anchor(D + a, a) = Expr(1);
  std::vector<Expr> structure = zero_structure(r);
  for (std::size_t i = 0; i < D; ++i) {
    for (std::size_t j = 0; j < D; ++j) {
      for (std::size_t k = 0; k < D; ++k) structure[(i * r + j) * r + k] = Expr(c(i, j, k));
    }
  }
  s.algebroid = make_algebroid(mu, frame, anchor, structure);
  require(check_algebroid(s.algebroid).valid(), "semidirect algebroid axioms (Jacobi of the Lie algebra)");

  s.omega = TwoForm(r, r);
  for (std::size_t i = 0; i < D; ++i) {
    for (std::size_t j = 0; j < D; ++j) {
      Expr v;
      for (std::size_t k = 0; k < D; ++k) v += Expr(c(i, j, k)) * var(mu[k]);
      s.omega(i, j) = v;
    }
    s.omega(i, D + i) = Expr(1);
    s.omega(D + i, i) = Expr(-1);
  }
  SymbolicInverse pinv = invert_symplectic(s.omega);
  require(pinv.exact.has_value(), "Omega^{-1} in closed form");
  s.poisson = *pinv.exact;

  std::vector<std::size_t> basis;
  for (std::size_t i = 0; i < D; ++i) {
    if (in_h1[i]) basis.push_back(i);
  }
  for (std::size_t i = 0; i < D; ++i) {
    if (in_h1[i]) basis.push_back(D + i);
  }
  Matrix<Expr> F(r, basis.size());
  for (std::size_t col = 0; col < basis.size(); ++col) F(basis[col], col) = Expr(1);
  Matrix<Expr> omega_f = F.transpose() * s.omega * F;
  SymbolicInverse finv = symbolic_inverse(omega_f);
  require(finv.exact.has_value(), "Omega restricted to F is invertible in closed form");
  s.projector = F * *finv.exact * F.transpose() * s.omega;
  s.lambda_h1 = F * (-*finv.exact) * F.transpose();
  s.nijenhuis = s.projector;

  Endomorphism composed = s.lambda_h1.transpose() * s.omega.transpose();
  if (composed == s.projector) {
    s.recorded_sign = 1;
  } else if (composed == Expr(-1) * s.projector) {
    s.recorded_sign = -1;
  }
  require(s.recorded_sign != 0, "lambda_h1# o Omega^flat is not +-projector");
  return s;
}

AtiyahPassage invariant_pn_to_atiyah(const TodaFixture& toda) {
  AtiyahPassage out;
  out.atiyah_pn = pn_check(toda.atiyah, toda.pi0, toda.atiyah_recursion);
  Bivector second = compose_bivector(toda.recursion, toda.lambda0);
  Bivector base0 = project_bivector(toda.projection, toda.lambda0);
  Bivector base1 = project_bivector(toda.projection, second);
  out.base_compatible = are_compatible(toda.flaschka, base0, base1);
  Bivector induced0 = induced_base_poisson(toda.atiyah, toda.pi0);
  Bivector induced1 = induced_base_poisson(toda.atiyah, toda.pi1);
  if (!(induced0 == base0)) {
    out.induced_match = Verdict::fail("induced base bivector of pi0 " + to_string(induced0) +
                                      " differs from the projection " + to_string(base0));
  } else if (!(induced1 == base1)) {
    out.induced_match = Verdict::fail("induced base bivector of pi1 " + to_string(induced1) +
                                      " differs from the projection " + to_string(base1));
  }
  return out;
}

}  // namespace pnred
