#include "pnred/algebroid.hpp"

#include <set>
#include <sstream>
#include <unordered_map>

namespace pnred {

int sort_sign(std::vector<int>& idx) {
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
      if (idx[j - 1] == idx[j]) return 0;
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
    }
  }
  return sign;
}

void for_each_increasing(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  if (k < 0 || k > n) return;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (;;) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

std::vector<Expr> zero_structure(std::size_t rank) { return std::vector<Expr>(rank * rank * rank); }

LieAlgebroid make_algebroid(std::vector<std::string> base_vars, std::vector<std::string> frame,
                            Matrix<Expr> anchor, std::vector<Expr> structure) {
  const std::size_t n = base_vars.size();
  const std::size_t r = frame.size();
  if (anchor.rows() != r || anchor.cols() != n) {
    throw std::invalid_argument("anchor must be rank x dim");
  }
  if (structure.size() != r * r * r) throw std::invalid_argument("structure functions must have rank^3 entries");
  std::set<std::string> names(base_vars.begin(), base_vars.end());
  if (names.size() != n) throw std::invalid_argument("duplicate base variable");
  std::set<std::string> frames(frame.begin(), frame.end());
  if (frames.size() != r) throw std::invalid_argument("duplicate frame name");
  auto check_vars = [&](const Expr& e, const std::string& where) {
    for (const auto& v : e.free_vars()) {
      if (!names.count(v)) throw std::invalid_argument(where + " depends on non-base variable " + v);
    }
  };
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t i = 0; i < n; ++i) check_vars(anchor(a, i), "anchor");
  }
  for (const auto& c : structure) check_vars(c, "structure function");
  LieAlgebroid A;
  A.base_vars = std::move(base_vars);
  A.frame = std::move(frame);
  for (const auto& v : A.base_vars) A.base_ids.push_back(intern(v));
  A.anchor = std::move(anchor);
  A.structure = std::move(structure);
  return A;
}

LieAlgebroid tangent_algebroid(const std::vector<std::string>& vars) {
  std::vector<std::string> frame;
  for (const auto& v : vars) frame.push_back("d_" + v);
  return make_algebroid(vars, frame, Matrix<Expr>::identity(vars.size()), zero_structure(vars.size()));
}

Jet jet_at(const Expr& e, const std::vector<VarId>& ids, const std::vector<double>& x) {
  if (ids.size() > kMaxJetDim) throw std::out_of_range("too many base variables for jet evaluation");
  return e.eval_with<Jet>([&](VarId v) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] == v) return Jet::variable(x[i], i);
    }
    throw ExprError("unbound variable " + var_name(v));
  });
}

Matrix<Jet> jet_at(const Matrix<Expr>& m, const std::vector<VarId>& ids, const std::vector<double>& x) {
  return m.map([&](const Expr& e) { return jet_at(e, ids, x); });
}

std::vector<Jet> jet_at(const std::vector<Expr>& v, const std::vector<VarId>& ids,
                        const std::vector<double>& x) {
  std::vector<Jet> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(jet_at(e, ids, x));
  return out;
}

AlgebroidT<Jet> at_point(const LieAlgebroid& A, const std::vector<double>& x) {
  AlgebroidT<Jet> J;
  J.base_vars = A.base_vars;
  J.frame = A.frame;
  J.base_ids = A.base_ids;
  J.anchor = jet_at(A.anchor, A.base_ids, x);
  J.structure = jet_at(A.structure, A.base_ids, x);
  return J;
}

AlgebroidCheck check_algebroid(const LieAlgebroid& A) {
  AlgebroidCheck out;
  const std::size_t r = A.rank();
  const std::size_t n = A.dim();
  for (std::size_t a = 0; a < r && out.antisymmetry.ok; ++a) {
    for (std::size_t b = a; b < r && out.antisymmetry.ok; ++b) {
      for (std::size_t c = 0; c < r; ++c) {
        Expr s = A.C(a, b, c) + A.C(b, a, c);
        if (!s.is_zero()) {
          out.antisymmetry = Verdict::fail("C(" + A.frame[a] + "," + A.frame[b] + ")^" + A.frame[c] +
                                           " + C(" + A.frame[b] + "," + A.frame[a] + ")^" + A.frame[c] +
                                           " = " + s.str());
          break;
        }
      }
    }
  }
  for (std::size_t a = 0; a < r && out.jacobi.ok; ++a) {
    for (std::size_t b = a + 1; b < r && out.jacobi.ok; ++b) {
      for (std::size_t c = b + 1; c < r && out.jacobi.ok; ++c) {
        Section jac = jacobiator(A, frame_section(A, a), frame_section(A, b), frame_section(A, c));
        for (std::size_t g = 0; g < r; ++g) {
          if (!jac[g].is_zero()) {
            out.jacobi = Verdict::fail("Jacobi(" + A.frame[a] + "," + A.frame[b] + "," + A.frame[c] + ") has " +
                                       A.frame[g] + "-component " + jac[g].str());
            break;
          }
        }
      }
    }
  }
  for (std::size_t a = 0; a < r && out.anchor_morphism.ok; ++a) {
    for (std::size_t b = a + 1; b < r && out.anchor_morphism.ok; ++b) {
      for (std::size_t i = 0; i < n; ++i) {
        Expr lhs;
        for (std::size_t g = 0; g < r; ++g) lhs += A.C(a, b, g) * A.anchor(g, i);
        Expr rhs = frame_derivative(A, a, A.anchor(b, i)) - frame_derivative(A, b, A.anchor(a, i));
        Expr res = lhs - rhs;
        if (!res.is_zero()) {
          out.anchor_morphism = Verdict::fail("rho([" + A.frame[a] + "," + A.frame[b] + "]) - [rho(" + A.frame[a] +
                                              "),rho(" + A.frame[b] + ")] has " + A.base_vars[i] +
                                              "-component " + res.str());
          break;
        }
      }
    }
  }
  return out;
}

std::string form_to_string(const LieAlgebroid& A, const KForm& w) {
  if (w.comp.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [idx, v] : w.comp) {
    if (!first) os << " + ";
    first = false;
    os << "(" << v.str() << ")";
    for (std::size_t k = 0; k < idx.size(); ++k) {
      os << (k ? "^" : " ") << "th_" << A.frame[static_cast<std::size_t>(idx[k])];
    }
  }
  return os.str();
}

}  // namespace pnred
