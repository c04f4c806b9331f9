#include "pnred/reduction.hpp"

#include <random>
#include <sstream>

#include "pnred/lifts.hpp"

namespace pnred {

namespace {

Expr compose(const Expr& f, const std::map<VarId, Expr>& subst) { return f.substitute(subst); }

std::map<VarId, Expr> pullback_map(const EpimorphismSpec& E) {
  std::map<VarId, Expr> m;
  for (std::size_t j = 0; j < E.target.dim(); ++j) m[E.target.base_ids[j]] = E.base_map[j];
  return m;
}

struct Atom {
  Expr target;
  Term source;
};

// Exponent pattern of a single term: monomial degrees, exp coefficients and
// the exp constant, keyed for the linear system below.
std::map<std::pair<int, VarId>, Rational> pattern(const Term& t, Rational& exp_constant) {
  std::map<std::pair<int, VarId>, Rational> out;
  for (const auto& [v, e] : t.mono) out[{0, v}] = e;
  for (const auto& [v, c] : t.lin.coeffs) out[{1, v}] = c;
  exp_constant = t.lin.constant;
  return out;
}

// Solves M k = rhs over the rationals, free unknowns set to zero.
std::optional<std::vector<Rational>> solve_rational(std::vector<std::vector<Rational>> M, std::vector<Rational> rhs,
                                                    std::size_t unknowns) {
  const std::size_t rows = M.size();
  std::vector<std::size_t> pivot_col;
  std::size_t row = 0;
  for (std::size_t col = 0; col < unknowns && row < rows; ++col) {
    std::size_t p = row;
    while (p < rows && M[p][col] == 0) ++p;
    if (p == rows) continue;
    std::swap(M[p], M[row]);
    std::swap(rhs[p], rhs[row]);
    Rational inv = 1 / M[row][col];
    for (auto& x : M[row]) x *= inv;
    rhs[row] *= inv;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == row || M[r][col] == 0) continue;
      Rational f = M[r][col];
      for (std::size_t c = 0; c < unknowns; ++c) M[r][c] -= f * M[row][c];
      rhs[r] -= f * rhs[row];
    }
    pivot_col.push_back(col);
    ++row;
  }
  for (std::size_t r = row; r < rows; ++r) {
    if (rhs[r] != 0) return std::nullopt;
  }
  std::vector<Rational> k(unknowns, Rational(0));
  for (std::size_t r = 0; r < pivot_col.size(); ++r) k[pivot_col[r]] = rhs[r];
  return k;
}

std::vector<Atom> atoms_of(const EpimorphismSpec& E) {
  std::vector<Atom> atoms;
  for (std::size_t j = 0; j < E.target.dim(); ++j) {
    if (E.base_map[j].is_single_term()) {
      atoms.push_back({Expr::variable(E.target.base_ids[j]), E.base_map[j].terms().front()});
    }
  }
  for (const auto& [target, source] : E.basic_substitutions) {
    if (source.is_single_term()) atoms.push_back({parse(target), source.terms().front()});
  }
  return atoms;
}

std::optional<Expr> rewrite_term(const std::vector<Atom>& atoms, const Term& t) {
  Rational c0;
  auto goal = pattern(t, c0);
  std::vector<std::map<std::pair<int, VarId>, Rational>> pats;
  std::vector<Rational> consts;
  std::set<std::pair<int, VarId>> keys;
  for (const auto& [k, v] : goal) keys.insert(k);
  for (const auto& a : atoms) {
    Rational c;
    pats.push_back(pattern(a.source, c));
    consts.push_back(c);
    for (const auto& [k, v] : pats.back()) keys.insert(k);
  }
  std::vector<std::vector<Rational>> M;
  std::vector<Rational> rhs;
  for (const auto& key : keys) {
    std::vector<Rational> rowv(atoms.size());
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      auto it = pats[j].find(key);
      rowv[j] = it == pats[j].end() ? Rational(0) : it->second;
    }
    M.push_back(rowv);
    auto it = goal.find(key);
    rhs.push_back(it == goal.end() ? Rational(0) : it->second);
  }
  std::vector<Rational> rowc(consts);
  M.push_back(rowc);
  rhs.push_back(c0);
  auto k = solve_rational(M, rhs, atoms.size());
  if (!k) return std::nullopt;
  Expr out(t.coef);
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    const Rational& e = (*k)[j];
    if (e == 0) continue;
    if (e.get_den() != 1 || !e.get_num().fits_sint_p()) return std::nullopt;
    int power = static_cast<int>(e.get_num().get_si());
    // the atom's own coefficient is divided out
    Expr atom_coef(atoms[j].source.coef);
    out = out * atoms[j].target.pow(power) * atom_coef.pow(-power);
  }
  return out;
}

std::string label(const std::vector<std::string>& names, std::size_t i) { return names.at(i); }

}  // namespace

void validate_epimorphism(const EpimorphismSpec& E) {
  if (E.base_map.size() != E.target.dim()) throw std::invalid_argument("base map needs one entry per target coordinate");
  if (E.fiber_map.rows() != E.target.rank() || E.fiber_map.cols() != E.source.rank()) {
    throw std::invalid_argument("fiber map must be (target rank) x (source rank)");
  }
  std::set<std::string> allowed(E.source.base_vars.begin(), E.source.base_vars.end());
  auto on_source = [&](const Expr& e, const std::string& what) {
    for (const auto& v : e.free_vars()) {
      if (!allowed.count(v)) throw std::invalid_argument(what + " uses " + v + ", not a source coordinate");
    }
  };
  for (const auto& e : E.base_map) on_source(e, "base map");
  for (std::size_t i = 0; i < E.fiber_map.rows(); ++i) {
    for (std::size_t j = 0; j < E.fiber_map.cols(); ++j) on_source(E.fiber_map(i, j), "fiber map");
  }
}

Expr pull_back_function(const EpimorphismSpec& E, const Expr& target_expr) {
  return compose(target_expr, pullback_map(E));
}

std::optional<Expr> rewrite_basic(const EpimorphismSpec& E, const Expr& source_expr) {
  if (source_expr.is_zero()) return Expr();
  std::vector<Atom> atoms = atoms_of(E);
  Expr out;
  for (const auto& t : source_expr.terms()) {
    auto r = rewrite_term(atoms, t);
    if (!r) return std::nullopt;
    out += *r;
  }
  if (!(pull_back_function(E, out) - source_expr).is_zero()) return std::nullopt;
  return out;
}

Verdict anchor_compatibility(const EpimorphismSpec& E) {
  auto pb = pullback_map(E);
  const std::size_t nt = E.target.dim();
  for (std::size_t a = 0; a < E.source.rank(); ++a) {
    std::vector<Expr> rho = anchor_vector(E.source, frame_section(E.source, a));
    for (std::size_t jt = 0; jt < nt; ++jt) {
      Expr lhs;
      for (std::size_t i = 0; i < E.source.dim(); ++i) {
        if (!rho[i].is_zero()) lhs += E.base_map[jt].diff(E.source.base_ids[i]) * rho[i];
      }
      Expr rhs;
      for (std::size_t b = 0; b < E.target.rank(); ++b) {
        if (!E.fiber_map(b, a).is_zero()) rhs += E.fiber_map(b, a) * compose(E.target.anchor(b, jt), pb);
      }
      Expr diff = lhs - rhs;
      if (!diff.is_zero()) {
        return Verdict::fail("T pi rho(" + E.source.frame[a] + ") - rho~(Pi " + E.source.frame[a] + ") has " +
                             E.target.base_vars[jt] + "-component " + diff.str());
      }
    }
  }
  return Verdict::pass();
}

KernelFrame kernel_frame(const EpimorphismSpec& E) {
  KernelFrame out;
  out.sections = symbolic_kernel(E.fiber_map);
  // metric complement: X_a = Pi^T (Pi Pi^T)^{-1} e~_a
  Matrix<Expr> gram = E.fiber_map * E.fiber_map.transpose();
  SymbolicInverse inv = symbolic_inverse(gram);
  Matrix<Expr> lift = E.fiber_map.transpose() * (inv.exact ? *inv.exact : inv.numerator);
  out.projectable_exact = inv.exact.has_value();
  for (std::size_t a = 0; a < E.target.rank(); ++a) out.projectable.push_back(lift.col(a));
  return out;
}

HypothesisReport vertical_hypothesis(const EpimorphismSpec& E, const std::vector<std::vector<double>>& points) {
  HypothesisReport out;
  KernelFrame kf = kernel_frame(E);
  Matrix<Expr> jac(E.target.dim(), E.source.dim());
  for (std::size_t j = 0; j < E.target.dim(); ++j) {
    for (std::size_t i = 0; i < E.source.dim(); ++i) jac(j, i) = E.base_map[j].diff(E.source.base_ids[i]);
  }
  for (const auto& x : points) {
    Eigen::MatrixXd J = evaluate(jac, E.source.base_ids, x);
    RankDecision jr = numeric_rank(J);
    int vertical_dim = static_cast<int>(E.source.dim()) - jr.rank;
    Eigen::MatrixXd rho(static_cast<Eigen::Index>(E.source.dim()), static_cast<Eigen::Index>(kf.sections.size()));
    for (std::size_t c = 0; c < kf.sections.size(); ++c) {
      rho.col(static_cast<Eigen::Index>(c)) =
          evaluate(anchor_vector(E.source, kf.sections[c]), E.source.base_ids, x);
    }
    RankDecision rr = numeric_rank(rho);
    out.ill_conditioned = out.ill_conditioned || jr.ill_conditioned || rr.ill_conditioned;
    bool inside = kf.sections.empty() || (J * rho).norm() <= default_tolerance() * std::max(1.0, J.norm() * rho.norm());
    if (rr.rank != vertical_dim || !inside) {
      out.ok = false;
      std::ostringstream s;
      s << "at point " << Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())).transpose()
        << ": rank rho(Ker Pi) = " << rr.rank << ", dim V pi = " << vertical_dim;
      out.witness = s.str();
      return out;
    }
  }
  return out;
}

Verdict projectable_section_check(const EpimorphismSpec& E, const Section& X) {
  KernelFrame kf = kernel_frame(E);
  for (std::size_t i = 0; i < kf.sections.size(); ++i) {
    Section br = bracket(E.source, kf.sections[i], X);
    std::vector<Expr> image = E.fiber_map.apply(br);
    for (std::size_t b = 0; b < image.size(); ++b) {
      if (!image[b].is_zero()) {
        return Verdict::fail("Pi [xi_" + std::to_string(i + 1) + ", X] has " + E.target.frame[b] + "-component " +
                             image[b].str());
      }
    }
  }
  return Verdict::pass();
}

Verdict projectable_form_check(const EpimorphismSpec& E, const Covector& alpha) {
  KernelFrame kf = kernel_frame(E);
  for (std::size_t i = 0; i < kf.sections.size(); ++i) {
    Expr v = contract(alpha, kf.sections[i]);
    if (!v.is_zero()) return Verdict::fail("alpha(xi_" + std::to_string(i + 1) + ") = " + v.str());
    Covector lie = lie_derivative_one_form(E.source, kf.sections[i], alpha);
    for (std::size_t a = 0; a < lie.size(); ++a) {
      if (!lie[a].is_zero()) {
        return Verdict::fail("L_xi_" + std::to_string(i + 1) + " alpha has th_" + E.source.frame[a] +
                             "-component " + lie[a].str());
      }
    }
  }
  return Verdict::pass();
}

Verdict projectable_bivector_check(const EpimorphismSpec& E, const Bivector& P) {
  KernelFrame kf = kernel_frame(E);
  for (std::size_t i = 0; i < kf.sections.size(); ++i) {
    Matrix<Expr> lie = schouten_section(E.source, kf.sections[i], P);
    // Pi ([xi, P]# Pi^* th~^a) for every target covector
    Matrix<Expr> m = E.fiber_map * lie.transpose() * E.fiber_map.transpose();
    for (std::size_t b = 0; b < m.rows(); ++b) {
      for (std::size_t a = 0; a < m.cols(); ++a) {
        if (!m(b, a).is_zero()) {
          return Verdict::fail("Pi [xi_" + std::to_string(i + 1) + ", P]#(Pi^* th_" + E.target.frame[a] + ") has " +
                               E.target.frame[b] + "-component " + m(b, a).str());
        }
      }
    }
  }
  return Verdict::pass();
}

Verdict projectable_endo_check(const EpimorphismSpec& E, const Endomorphism& N) {
  KernelFrame kf = kernel_frame(E);
  for (std::size_t i = 0; i < kf.sections.size(); ++i) {
    Section nxi = N.apply(kf.sections[i]);
    std::vector<Expr> image = E.fiber_map.apply(nxi);
    for (std::size_t b = 0; b < image.size(); ++b) {
      if (!image[b].is_zero()) {
        return Verdict::fail("N(Ker Pi) not in Ker Pi: N xi_" + std::to_string(i + 1) + " = " + to_string(nxi) +
                             " and Pi N xi_" + std::to_string(i + 1) + " = " + to_string(image));
      }
    }
  }
  // (L_xi N) X is tensorial in X, so the scaled complement frame suffices.
  for (std::size_t i = 0; i < kf.sections.size(); ++i) {
    for (std::size_t a = 0; a < kf.projectable.size(); ++a) {
      const Section& X = kf.projectable[a];
      Section lie = sub(bracket(E.source, kf.sections[i], N.apply(X)), N.apply(bracket(E.source, kf.sections[i], X)));
      std::vector<Expr> image = E.fiber_map.apply(lie);
      for (std::size_t b = 0; b < image.size(); ++b) {
        if (!image[b].is_zero()) {
          return Verdict::fail("Pi (L_xi_" + std::to_string(i + 1) + " N)(X_" + E.target.frame[a] + ") has " +
                               E.target.frame[b] + "-component " + image[b].str());
        }
      }
    }
  }
  return Verdict::pass();
}

Bivector project_bivector(const EpimorphismSpec& E, const Bivector& P) {
  Verdict v = projectable_bivector_check(E, P);
  if (!v) throw ProjectionError("bivector is not projectable: " + v.witness);
  Matrix<Expr> m = E.fiber_map * P * E.fiber_map.transpose();
  Bivector out(m.rows(), m.cols());
  for (std::size_t a = 0; a < m.rows(); ++a) {
    for (std::size_t b = 0; b < m.cols(); ++b) {
      auto r = rewrite_basic(E, m(a, b));
      if (!r) {
        throw ProjectionError("component (" + label(E.target.frame, a) + "," + label(E.target.frame, b) + ") = " +
                              m(a, b).str() + " is not basic");
      }
      out(a, b) = *r;
    }
  }
  return out;
}

Endomorphism project_endo(const EpimorphismSpec& E, const Endomorphism& N) {
  Verdict v = projectable_endo_check(E, N);
  if (!v) throw ProjectionError("endomorphism is not projectable: " + v.witness);
  Matrix<Expr> gram = E.fiber_map * E.fiber_map.transpose();
  Expr det = determinant(gram);
  Matrix<Expr> num = E.fiber_map * N * E.fiber_map.transpose() * adjugate(gram);
  auto m = try_divide(num, det);
  if (!m) throw ProjectionError("projected operator left the expression class");
  Endomorphism out(m->rows(), m->cols());
  for (std::size_t a = 0; a < m->rows(); ++a) {
    for (std::size_t b = 0; b < m->cols(); ++b) {
      auto r = rewrite_basic(E, (*m)(a, b));
      if (!r) {
        throw ProjectionError("component (" + label(E.target.frame, a) + "," + label(E.target.frame, b) + ") = " +
                              (*m)(a, b).str() + " is not basic");
      }
      out(a, b) = *r;
    }
  }
  return out;
}

Section project_section(const EpimorphismSpec& E, const Section& X) {
  Verdict v = projectable_section_check(E, X);
  if (!v) throw ProjectionError("section is not projectable: " + v.witness);
  std::vector<Expr> image = E.fiber_map.apply(X);
  Section out(image.size());
  for (std::size_t a = 0; a < image.size(); ++a) {
    auto r = rewrite_basic(E, image[a]);
    if (!r) throw ProjectionError(label(E.target.frame, a) + "-component " + image[a].str() + " is not basic");
    out[a] = *r;
  }
  return out;
}

LeafRestriction restrict_to_leaf(const LieAlgebroid& A, const Bivector& P, const Endomorphism& N,
                                 const LeafSpec& leaf) {
  const std::size_t r = A.rank();
  std::vector<Covector> alphas;
  std::map<VarId, Expr> iota;
  std::vector<std::string> leaf_vars;
  LeafRestriction out;

  if (leaf.full_rank) {
    SymbolicInverse inv = invert_poisson(P);
    if (inv.denominator.is_zero()) {
      auto kernel = symbolic_kernel(P);
      throw HypothesisViolation("P is degenerate, the leaf is not the whole base; kernel covector " +
                                to_string(kernel.empty() ? Covector(r) : kernel.front()));
    }
    if (!inv.exact) throw HypothesisViolation("P^{-1} is not available in closed form");
    for (const auto& x : leaf.sample_points) {
      double d = evaluate(inv.denominator, A.base_ids, x);
      if (std::abs(d) <= default_tolerance()) throw HypothesisViolation("det P vanishes at a sample point");
    }
    leaf_vars = A.base_vars;
    // P# alpha_a = e_a  <=>  alpha_a = column a of Omega = -P^{-1}
    for (std::size_t a = 0; a < r; ++a) alphas.push_back(inv.exact->col(a));
    out.algebroid = A;
    out.omega = *inv.exact;
    out.nijenhuis = N;
    out.inclusion = Matrix<Expr>::identity(r);
  } else {
    leaf_vars = leaf.leaf_vars;
    if (leaf.embedding.size() != A.dim()) throw std::invalid_argument("embedding needs one entry per base coordinate");
    for (std::size_t i = 0; i < A.dim(); ++i) iota[A.base_ids[i]] = leaf.embedding[i];
    alphas = leaf.generators;
    const std::size_t rl = alphas.size();
    if (rl == 0) throw std::invalid_argument("leaf restriction needs generator covectors");
    std::vector<VarId> leaf_ids;
    for (const auto& v : leaf_vars) leaf_ids.push_back(intern(v));

    Matrix<Expr> I(r, rl);
    std::vector<Section> images;
    for (std::size_t a = 0; a < rl; ++a) {
      if (alphas[a].size() != r) throw std::invalid_argument("generator covector has the wrong length");
      images.push_back(sharp(P, alphas[a]));
      for (std::size_t c = 0; c < r; ++c) I(c, a) = compose(images[a][c], iota);
    }
    Matrix<Expr> P_on_leaf = P.map([&](const Expr& e) { return compose(e, iota); });
    for (const auto& s : leaf.sample_points) {
      RankDecision pr = numeric_rank(evaluate(P_on_leaf, leaf_ids, s));
      RankDecision ir = numeric_rank(evaluate(I, leaf_ids, s));
      if (pr.rank != static_cast<int>(rl) || ir.rank != static_cast<int>(rl) || pr.ill_conditioned ||
          ir.ill_conditioned) {
        std::ostringstream msg;
        msg << "at leaf point (";
        for (std::size_t i = 0; i < s.size(); ++i) msg << (i ? "," : "") << s[i];
        msg << "): rank P = " << pr.rank << ", rank of the supplied frame = " << ir.rank << ", expected " << rl;
        throw HypothesisViolation(msg.str());
      }
    }

    std::vector<Expr> structure = zero_structure(rl);
    for (std::size_t a = 0; a < rl; ++a) {
      for (std::size_t b = a + 1; b < rl; ++b) {
        Section rhs = sharp(P, koszul_bracket(A, P, alphas[a], alphas[b]));
        for (auto& e : rhs) e = compose(e, iota);
        auto c = solve_exact(I, rhs);
        if (!c) throw HypothesisViolation("bracket of generators leaves the span of the supplied frame");
        for (std::size_t g = 0; g < rl; ++g) {
          structure[(a * rl + b) * rl + g] = (*c)[g];
          structure[(b * rl + a) * rl + g] = -(*c)[g];
        }
      }
    }
    Matrix<Expr> jac(A.dim(), leaf_vars.size());
    for (std::size_t i = 0; i < A.dim(); ++i) {
      for (std::size_t l = 0; l < leaf_vars.size(); ++l) jac(i, l) = leaf.embedding[i].diff(leaf_ids[l]);
    }
    Matrix<Expr> anchor(rl, leaf_vars.size());
    Endomorphism NL(rl, rl);
    for (std::size_t a = 0; a < rl; ++a) {
      std::vector<Expr> w = anchor_vector(A, images[a]);
      for (auto& e : w) e = compose(e, iota);
      auto v = solve_exact(jac, w);
      if (!v) throw HypothesisViolation("rho(P# alpha) is not tangent to the leaf");
      for (std::size_t l = 0; l < leaf_vars.size(); ++l) anchor(a, l) = (*v)[l];
      Section u = N.apply(images[a]);
      for (auto& e : u) e = compose(e, iota);
      auto n = solve_exact(I, u);
      if (!n) throw HypothesisViolation("N does not preserve P#(A*) along the leaf");
      for (std::size_t c = 0; c < rl; ++c) NL(c, a) = (*n)[c];
    }
    std::vector<std::string> frame;
    for (std::size_t a = 0; a < rl; ++a) frame.push_back("leaf_" + std::to_string(a + 1));
    out.algebroid = make_algebroid(leaf_vars, frame, anchor, structure);
    out.omega = Matrix<Expr>(rl, rl);
    for (std::size_t a = 0; a < rl; ++a) {
      for (std::size_t b = 0; b < rl; ++b) out.omega(a, b) = compose(pairing(P, alphas[a], alphas[b]), iota);
    }
    out.nijenhuis = NL;
    out.inclusion = I;
  }

  const std::size_t rl = alphas.size();
  auto on_leaf = [&](const Expr& e) { return leaf.full_rank ? e : compose(e, iota); };
  // I^* alpha_a as a leaf covector
  std::vector<Covector> pulled(rl, Covector(rl));
  for (std::size_t a = 0; a < rl; ++a) {
    for (std::size_t c = 0; c < rl; ++c) {
      Expr s;
      for (std::size_t g = 0; g < r; ++g) {
        if (!alphas[a][g].is_zero() && !out.inclusion(g, c).is_zero()) s += on_leaf(alphas[a][g]) * out.inclusion(g, c);
      }
      pulled[a][c] = s;
    }
  }
  for (std::size_t a = 0; a < rl && out.omega_flat_identity.ok; ++a) {
    for (std::size_t b = 0; b < rl; ++b) {
      Expr d = out.omega(a, b) + pulled[a][b];
      if (!d.is_zero()) {
        out.omega_flat_identity = Verdict::fail("Omega_L^flat(X_" + std::to_string(a + 1) + ") + I^* alpha_" +
                                                std::to_string(a + 1) + " has component " + d.str());
        break;
      }
    }
  }
  SymbolicInverse pl = invert_symplectic(out.omega);
  for (std::size_t a = 0; a < rl && out.pullback_identity.ok; ++a) {
    for (std::size_t b = a + 1; b < rl; ++b) {
      Expr lhs = pairing(pl.numerator, pulled[a], pulled[b]);
      Expr rhs = pl.denominator * on_leaf(pairing(P, alphas[a], alphas[b]));
      if (!(lhs - rhs).is_zero()) {
        out.pullback_identity = Verdict::fail("P_L(I^* alpha_" + std::to_string(a + 1) + ", I^* alpha_" +
                                              std::to_string(b + 1) + ") differs from P(alpha, beta) o iota");
        break;
      }
    }
  }
  out.symplectic = symplectic_check(out.algebroid, out.omega);
  if (pl.exact) {
    out.pn = pn_check(out.algebroid, *pl.exact, out.nijenhuis);
  } else {
    out.pn.torsion_zero = torsion_verdict(out.algebroid, out.nijenhuis);
    out.pn.sharp_commutes = Verdict::fail("P_L is not available in closed form");
    out.pn.concomitant_zero = Verdict::fail("P_L is not available in closed form");
  }
  return out;
}

std::vector<CharacteristicRank> characteristic_rank(const LieAlgebroid& A, const Bivector& P,
                                                    const std::vector<std::vector<double>>& points) {
  Matrix<Expr> d = (P * A.anchor).transpose();
  Matrix<Expr> base = induced_base_bivector(A, P);
  std::vector<CharacteristicRank> out;
  for (const auto& x : points) {
    CharacteristicRank c;
    c.point = x;
    RankDecision rd = numeric_rank(evaluate(d, A.base_ids, x));
    RankDecision rb = numeric_rank(evaluate(base, A.base_ids, x));
    c.rank_d = rd.rank;
    c.rank_base = rb.rank;
    c.ill_conditioned = rd.ill_conditioned || rb.ill_conditioned;
    out.push_back(c);
  }
  return out;
}

PointReport riesz_report_at(const LieAlgebroid& A, const Endomorphism& N, const std::vector<double>& x, double tol) {
  PointReport rep;
  rep.point = x;
  rep.tolerance = tol;
  const auto r = static_cast<Eigen::Index>(A.rank());
  Eigen::MatrixXd n = evaluate(N, A.base_ids, x);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(r, r);
  std::vector<Eigen::MatrixXd> powers;
  for (Eigen::Index l = 0; l <= r; ++l) {
    if (l > 0) power = power * n;
    powers.push_back(power);
    RankDecision d = numeric_rank(power, tol);
    rep.ranks.push_back(d.rank);
    rep.ill_conditioned = rep.ill_conditioned || d.ill_conditioned;
  }
  rep.riesz_index = static_cast<int>(r);
  for (std::size_t l = 0; l + 1 < rep.ranks.size(); ++l) {
    if (rep.ranks[l] == rep.ranks[l + 1]) {
      rep.riesz_index = static_cast<int>(l);
      break;
    }
  }
  const Eigen::MatrixXd& nk = powers[static_cast<std::size_t>(rep.riesz_index)];
  int rank_k = rep.ranks[static_cast<std::size_t>(rep.riesz_index)];
  rep.kernel_basis = null_space(nk, rank_k);
  rep.image_basis = column_space(nk, rank_k);
  rep.kernel_dim = static_cast<int>(rep.kernel_basis.cols());
  rep.image_dim = static_cast<int>(rep.image_basis.cols());
  Eigen::MatrixXd joined(r, rep.kernel_dim + rep.image_dim);
  joined << rep.kernel_basis, rep.image_basis;
  RankDecision j = numeric_rank(joined, tol);
  rep.ill_conditioned = rep.ill_conditioned || j.ill_conditioned;
  rep.direct_sum = rep.kernel_dim + rep.image_dim == r && j.rank == r;
  return rep;
}

std::vector<PointReport> riesz_report(const LieAlgebroid& A, const Endomorphism& N,
                                      const std::vector<std::vector<double>>& points, double tol) {
  std::vector<PointReport> out;
  for (const auto& x : points) out.push_back(riesz_report_at(A, N, x, tol));
  return out;
}

SubalgebroidCheck kernel_subalgebroid_check(const LieAlgebroid& A, const Endomorphism& N, int k,
                                            const std::vector<std::vector<double>>& points) {
  SubalgebroidCheck out;
  out.torsion_hypothesis = torsion_verdict(A, N);
  Endomorphism nk = matrix_power(N, k);
  int dim = -1;
  for (const auto& x : points) {
    RankDecision d = numeric_rank(evaluate(nk, A.base_ids, x));
    int kd = static_cast<int>(A.rank()) - d.rank;
    if (dim >= 0 && kd != dim) {
      std::ostringstream s;
      s << "dim ker N^" << k << " is " << dim << " at the first point and " << kd << " at (";
      for (std::size_t i = 0; i < x.size(); ++i) s << (i ? "," : "") << x[i];
      s << ")";
      out.constant_dimension = Verdict::fail(s.str());
      break;
    }
    dim = kd;
  }
  out.kernel_frame = symbolic_kernel(nk);
  for (std::size_t i = 0; i < out.kernel_frame.size() && out.kernel_closed.ok; ++i) {
    for (std::size_t j = i + 1; j < out.kernel_frame.size(); ++j) {
      Section br = bracket(A, out.kernel_frame[i], out.kernel_frame[j]);
      std::vector<Expr> img = nk.apply(br);
      if (!is_zero_section(img)) {
        out.kernel_closed = Verdict::fail("[" + to_string(out.kernel_frame[i]) + ", " + to_string(out.kernel_frame[j]) +
                                          "] = " + to_string(br) + " is not in ker N^" + std::to_string(k) +
                                          " (N^k image " + to_string(img) + ")");
        break;
      }
    }
  }
  for (std::size_t c = 0; c < nk.cols(); ++c) {
    Section col = nk.col(c);
    if (!is_zero_section(col)) out.image_frame.push_back(col);
  }
  std::vector<Covector> annihilator = symbolic_kernel(nk.transpose());
  for (std::size_t i = 0; i < out.image_frame.size() && out.image_closed.ok; ++i) {
    for (std::size_t j = i + 1; j < out.image_frame.size() && out.image_closed.ok; ++j) {
      Section br = bracket(A, out.image_frame[i], out.image_frame[j]);
      for (const auto& lambda : annihilator) {
        Expr v = contract(lambda, br);
        if (!v.is_zero()) {
          out.image_closed = Verdict::fail("[" + to_string(out.image_frame[i]) + ", " +
                                           to_string(out.image_frame[j]) + "] = " + to_string(br) +
                                           " is not in im N^" + std::to_string(k));
          break;
        }
      }
    }
  }
  return out;
}

FBCheck condition_fb_check(const LieAlgebroid& A, const Endomorphism& N, int k,
                           const std::vector<std::vector<double>>& points, unsigned seed) {
  FBCheck out;
  Endomorphism nk = matrix_power(N, k);
  std::vector<Section> frame = symbolic_kernel(nk);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (const auto& x : points) {
    std::vector<double> y(A.rank(), 0.0);
    for (const auto& s : frame) {
      Eigen::VectorXd v = evaluate(s, A.base_ids, x);
      double c = coef(rng);
      for (std::size_t a = 0; a < y.size(); ++a) y[a] += c * v(static_cast<Eigen::Index>(a));
    }
    FBGenerators g = fb_generators(A, frame, x, y);
    out.ill_conditioned = out.ill_conditioned || g.ill_conditioned;
    std::ostringstream s;
    s << "at (";
    for (std::size_t i = 0; i < x.size(); ++i) s << (i ? "," : "") << x[i];
    s << "): dim F^B = " << g.rank << ", dim rho(B) = " << g.anchor_rank << ", rank B = " << g.fiber_rank;
    if (!g.point_in_b) {
      out.consistent = Verdict::fail(s.str() + "; sampled fiber point is not in B");
      return out;
    }
    if (g.vertical_rank != g.fiber_rank) {
      out.consistent = Verdict::fail(s.str() + "; fiber translations by B are not tangent to F^B");
      return out;
    }
    if (g.rank != g.anchor_rank + g.fiber_rank) {
      out.consistent = Verdict::fail(s.str() + "; dimension formula violated");
      return out;
    }
    out.notes.push_back(s.str());
  }
  return out;
}

FiberwiseReduction fiberwise_reduce_at(const LieAlgebroid& A, const Bivector& P, const Endomorphism& N,
                                       const std::vector<double>& x, double tol) {
  FiberwiseReduction out;
  out.point = x;
  PointReport rep = riesz_report_at(A, N, x, tol);
  out.riesz_index = rep.riesz_index;
  out.ill_conditioned = rep.ill_conditioned;
  const auto r = static_cast<Eigen::Index>(A.rank());
  out.n_invertible = rep.ranks[1] == r;
  Eigen::MatrixXd n = evaluate(N, A.base_ids, x);
  Eigen::MatrixXd p = evaluate(P, A.base_ids, x);
  Eigen::MatrixXd nk = Eigen::MatrixXd::Identity(r, r);
  for (int l = 0; l < rep.riesz_index; ++l) nk = nk * n;
  int rank_k = rep.ranks[static_cast<std::size_t>(rep.riesz_index)];
  // (ker N^k)^perp = row space of N^k represents the quotient A_x / ker N^k_x
  Eigen::MatrixXd q = column_space(nk.transpose(), rank_k);
  out.quotient_dim = rank_k;
  std::ostringstream w;
  if (rep.kernel_dim > 0) {
    double leak = (q.transpose() * n * rep.kernel_basis).norm();
    if (leak > tol * std::max(1.0, n.norm())) w << "N does not preserve ker N^k (leak " << leak << "); ";
  }
  out.reduced_n = q.transpose() * n * q;
  out.reduced_p = q.transpose() * p * q;
  RankDecision rn = numeric_rank(out.reduced_n, tol);
  RankDecision rp = numeric_rank(out.reduced_p, tol);
  out.ill_conditioned = out.ill_conditioned || rn.ill_conditioned || rp.ill_conditioned;
  out.reduced_n_invertible = rn.rank == rank_k;
  out.reduced_p_nondegenerate = rp.rank == rank_k;
  if (!out.n_invertible) w << "N_x is singular (rank " << rep.ranks[1] << " of " << r << "); ";
  if (!out.reduced_n_invertible) w << "reduced N has rank " << rn.rank << " of " << rank_k << "; ";
  if (!out.reduced_p_nondegenerate) w << "reduced P has rank " << rp.rank << " of " << rank_k << "; ";
  if (out.ill_conditioned) w << "ill-conditioned rank decision; ";
  out.witness = w.str();
  return out;
}

std::vector<FiberwiseReduction> fiberwise_reduce(const LieAlgebroid& A, const Bivector& P, const Endomorphism& N,
                                                 const std::vector<std::vector<double>>& points, double tol) {
  std::vector<FiberwiseReduction> out;
  for (const auto& x : points) out.push_back(fiberwise_reduce_at(A, P, N, x, tol));
  return out;
}

}  // namespace pnred
