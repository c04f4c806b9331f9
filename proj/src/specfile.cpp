#include "pnred/specfile.hpp"

#include <fstream>
#include <sstream>

namespace pnred {

using nlohmann::json;

namespace {

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

const json& require_key(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw SpecError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SpecError(path, "missing key \"" + key + "\"");
  return *it;
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw SpecError(path, "expected a string");
  return j.get<std::string>();
}

std::vector<std::string> string_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw SpecError(path, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_string(j[i], child(path, i)));
  return out;
}

Expr as_expr(const json& j, const std::string& path) {
  if (j.is_number_integer()) return Expr(j.get<long>());
  if (!j.is_string()) throw SpecError(path, "expected an expression string or integer");
  try {
    return parse(j.get<std::string>());
  } catch (const std::exception& err) {
    throw SpecError(path, err.what());
  }
}

void require_vars(const Expr& e, const std::vector<std::string>& allowed, const std::string& path) {
  for (const auto& v : e.free_vars()) {
    if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
      throw SpecError(path, "expression uses " + v + ", which is not a coordinate here");
    }
  }
}

Matrix<Expr> expr_matrix(const json& j, std::size_t rows, std::size_t cols, const std::vector<std::string>& vars,
                         const std::string& path) {
  if (!j.is_array() || j.size() != rows) throw SpecError(path, "expected " + std::to_string(rows) + " rows");
  Matrix<Expr> m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    std::string rp = child(path, i);
    if (!j[i].is_array() || j[i].size() != cols) throw SpecError(rp, "expected " + std::to_string(cols) + " entries");
    for (std::size_t k = 0; k < cols; ++k) {
      m(i, k) = as_expr(j[i][k], child(rp, k));
      require_vars(m(i, k), vars, child(rp, k));
    }
  }
  return m;
}

std::pair<std::size_t, std::size_t> frame_pair(const std::string& key, const std::vector<std::string>& frame,
                                               const std::string& path) {
  std::string s;
  for (char c : key) {
    if (c != ' ') s += c;
  }
  if (s.size() < 5 || s.front() != '(' || s.back() != ')') throw SpecError(path, "expected a key of the form (a,b)");
  s = s.substr(1, s.size() - 2);
  auto comma = s.find(',');
  if (comma == std::string::npos) throw SpecError(path, "expected a key of the form (a,b)");
  auto index = [&](const std::string& name) {
    auto it = std::find(frame.begin(), frame.end(), name);
    if (it == frame.end()) throw SpecError(path, "unknown frame element " + name);
    return static_cast<std::size_t>(it - frame.begin());
  };
  std::size_t a = index(s.substr(0, comma)), b = index(s.substr(comma + 1));
  if (a == b) throw SpecError(path, "diagonal entry of antisymmetric data");
  return {a, b};
}

// Sets m(a, b) = value and m(b, a) = -value, rejecting contradictions.
void set_antisymmetric(Matrix<Expr>& m, std::size_t a, std::size_t b, const Expr& value, const std::string& path) {
  if (!m(a, b).is_zero() && m(a, b) != value) throw SpecError(path, "conflicts with the entry given for the transposed key");
  m(a, b) = value;
  m(b, a) = -value;
}

Matrix<Expr> antisymmetric_block(const json& j, const LieAlgebroid& A, const std::string& path) {
  if (!j.is_object()) throw SpecError(path, "expected an object of (a,b) entries");
  Matrix<Expr> m(A.rank(), A.rank());
  for (const auto& [key, value] : j.items()) {
    std::string p = child(path, key);
    auto [a, b] = frame_pair(key, A.frame, p);
    Expr e = as_expr(value, p);
    require_vars(e, A.base_vars, p);
    set_antisymmetric(m, a, b, e, p);
  }
  return m;
}

AlgebroidEntry parse_algebroid(const json& j, const std::string& path) {
  AlgebroidEntry out;
  auto base = string_list(require_key(j, "base_vars", path), child(path, "base_vars"));
  auto frame = string_list(require_key(j, "frame", path), child(path, "frame"));
  const std::size_t r = frame.size(), n = base.size();
  Matrix<Expr> anchor(r, n);
  if (j.contains("anchor")) anchor = expr_matrix(j["anchor"], r, n, base, child(path, "anchor"));
  std::vector<Expr> structure = zero_structure(r);
  if (j.contains("structure")) {
    const json& s = j["structure"];
    std::string sp = child(path, "structure");
    if (!s.is_object()) throw SpecError(sp, "expected an object of (a,b) entries");
    std::vector<Matrix<Expr>> per_target(r, Matrix<Expr>(r, r));
    for (const auto& [key, targets] : s.items()) {
      std::string p = child(sp, key);
      auto [a, b] = frame_pair(key, frame, p);
      if (!targets.is_object()) throw SpecError(p, "expected an object frame element -> expression");
      for (const auto& [cname, value] : targets.items()) {
        std::string cp = child(p, cname);
        auto it = std::find(frame.begin(), frame.end(), cname);
        if (it == frame.end()) throw SpecError(cp, "unknown frame element " + cname);
        Expr e = as_expr(value, cp);
        require_vars(e, base, cp);
        set_antisymmetric(per_target[static_cast<std::size_t>(it - frame.begin())], a, b, e, cp);
      }
    }
    for (std::size_t a = 0; a < r; ++a) {
      for (std::size_t b = 0; b < r; ++b) {
        for (std::size_t c = 0; c < r; ++c) structure[(a * r + b) * r + c] = per_target[c](a, b);
      }
    }
  }
  try {
    out.algebroid = make_algebroid(base, frame, anchor, structure);
  } catch (const std::exception& err) {
    throw SpecError(path, err.what());
  }
  const LieAlgebroid& A = out.algebroid;
  auto named = [&](const char* key, auto&& fn) {
    if (!j.contains(key)) return;
    std::string p = child(path, key);
    if (!j[key].is_object()) throw SpecError(p, "expected an object of named entries");
    for (const auto& [name, value] : j[key].items()) fn(name, value, child(p, name));
  };
  named("bivectors", [&](const std::string& name, const json& v, const std::string& p) {
    out.bivectors[name] = antisymmetric_block(v, A, p);
  });
  named("two_forms", [&](const std::string& name, const json& v, const std::string& p) {
    out.two_forms[name] = antisymmetric_block(v, A, p);
  });
  named("endomorphisms", [&](const std::string& name, const json& v, const std::string& p) {
    out.endomorphisms[name] = expr_matrix(v, r, r, base, p);
  });
  named("functions", [&](const std::string& name, const json& v, const std::string& p) {
    Expr e = as_expr(v, p);
    require_vars(e, base, p);
    out.functions[name] = e;
  });
  return out;
}

EpimorphismEntry parse_epimorphism(const json& j, const std::string& source_default, const SpecDocument& doc,
                                   const std::string& path, const std::string& name) {
  EpimorphismEntry out;
  out.source = source_default.empty() ? as_string(require_key(j, "source", path), child(path, "source")) : source_default;
  out.target = as_string(require_key(j, "target", path), child(path, "target"));
  auto find = [&](const std::string& n, const std::string& key) -> const AlgebroidEntry& {
    auto it = doc.algebroids.find(n);
    if (it == doc.algebroids.end()) throw SpecError(child(path, key), "unknown algebroid " + n);
    return it->second;
  };
  const LieAlgebroid& S = find(out.source, "source").algebroid;
  const LieAlgebroid& T = find(out.target, "target").algebroid;
  EpimorphismSpec& E = out.spec;
  E.name = name;
  E.source = S;
  E.target = T;
  const json& bm = require_key(j, "base_map", path);
  std::string bp = child(path, "base_map");
  if (!bm.is_object()) throw SpecError(bp, "expected an object target coordinate -> expression");
  for (const auto& var : T.base_vars) {
    if (!bm.contains(var)) throw SpecError(bp, "missing target coordinate " + var);
    Expr e = as_expr(bm[var], child(bp, var));
    require_vars(e, S.base_vars, child(bp, var));
    E.base_map.push_back(e);
  }
  for (const auto& [key, value] : bm.items()) {
    if (std::find(T.base_vars.begin(), T.base_vars.end(), key) == T.base_vars.end()) {
      throw SpecError(child(bp, key), "not a target coordinate");
    }
  }
  E.fiber_map = expr_matrix(require_key(j, "fiber_map", path), T.rank(), S.rank(), S.base_vars, child(path, "fiber_map"));
  if (j.contains("basic_substitutions")) {
    std::string sp = child(path, "basic_substitutions");
    if (!j["basic_substitutions"].is_object()) throw SpecError(sp, "expected an object");
    for (const auto& [key, value] : j["basic_substitutions"].items()) {
      Expr lhs = as_expr(json(key), child(sp, key));
      require_vars(lhs, T.base_vars, child(sp, key));
      Expr rhs = as_expr(value, child(sp, key));
      require_vars(rhs, S.base_vars, child(sp, key));
      E.basic_substitutions[lhs.str()] = rhs;
    }
  }
  try {
    validate_epimorphism(E);
  } catch (const std::exception& err) {
    throw SpecError(path, err.what());
  }
  return out;
}

Covector parse_covector(const json& j, const LieAlgebroid& A, const std::string& path) {
  Covector out(A.rank());
  if (j.is_array()) {
    if (j.size() != A.rank()) throw SpecError(path, "expected " + std::to_string(A.rank()) + " components");
    for (std::size_t a = 0; a < A.rank(); ++a) out[a] = as_expr(j[a], child(path, a));
  } else if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      auto it = std::find(A.frame.begin(), A.frame.end(), key);
      if (it == A.frame.end()) throw SpecError(child(path, key), "unknown frame element " + key);
      out[static_cast<std::size_t>(it - A.frame.begin())] = as_expr(value, child(path, key));
    }
  } else {
    throw SpecError(path, "expected a covector as array or object");
  }
  for (std::size_t a = 0; a < out.size(); ++a) require_vars(out[a], A.base_vars, path);
  return out;
}

std::vector<std::vector<double>> point_list(const json& j, std::size_t dim, const std::string& path) {
  if (!j.is_array()) throw SpecError(path, "expected an array of points");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string p = child(path, i);
    if (!j[i].is_array() || j[i].size() != dim) throw SpecError(p, "expected " + std::to_string(dim) + " coordinates");
    std::vector<double> x;
    for (std::size_t k = 0; k < dim; ++k) {
      if (!j[i][k].is_number()) throw SpecError(child(p, k), "expected a number");
      x.push_back(j[i][k].get<double>());
    }
    out.push_back(x);
  }
  return out;
}

LeafEntry parse_leaf(const json& j, const SpecDocument& doc, const std::string& path) {
  LeafEntry out;
  out.algebroid = as_string(require_key(j, "algebroid", path), child(path, "algebroid"));
  auto it = doc.algebroids.find(out.algebroid);
  if (it == doc.algebroids.end()) throw SpecError(child(path, "algebroid"), "unknown algebroid " + out.algebroid);
  const AlgebroidEntry& entry = it->second;
  const LieAlgebroid& A = entry.algebroid;
  out.bivector = as_string(require_key(j, "bivector", path), child(path, "bivector"));
  if (!entry.bivectors.count(out.bivector)) throw SpecError(child(path, "bivector"), "unknown bivector " + out.bivector);
  if (j.contains("endomorphism")) {
    out.endomorphism = as_string(j["endomorphism"], child(path, "endomorphism"));
    if (!entry.endomorphisms.count(out.endomorphism)) {
      throw SpecError(child(path, "endomorphism"), "unknown endomorphism " + out.endomorphism);
    }
  }
  LeafSpec& L = out.leaf;
  L.full_rank = j.value("full_rank", false);
  if (L.full_rank) {
    if (j.contains("sample_points")) L.sample_points = point_list(j["sample_points"], A.dim(), child(path, "sample_points"));
    return out;
  }
  L.leaf_vars = string_list(require_key(j, "leaf_vars", path), child(path, "leaf_vars"));
  const json& emb = require_key(j, "embedding", path);
  std::string ep = child(path, "embedding");
  if (!emb.is_object()) throw SpecError(ep, "expected an object source coordinate -> expression");
  for (const auto& var : A.base_vars) {
    if (!emb.contains(var)) throw SpecError(ep, "missing source coordinate " + var);
    Expr e = as_expr(emb[var], child(ep, var));
    require_vars(e, L.leaf_vars, child(ep, var));
    L.embedding.push_back(e);
  }
  const json& gens = require_key(j, "generators", path);
  std::string gp = child(path, "generators");
  if (!gens.is_array()) throw SpecError(gp, "expected an array of covectors");
  for (std::size_t i = 0; i < gens.size(); ++i) L.generators.push_back(parse_covector(gens[i], A, child(gp, i)));
  if (j.contains("sample_points")) {
    L.sample_points = point_list(j["sample_points"], L.leaf_vars.size(), child(path, "sample_points"));
  }
  return out;
}

std::string pair_key(const std::vector<std::string>& frame, std::size_t a, std::size_t b) {
  return "(" + frame[a] + "," + frame[b] + ")";
}

json antisymmetric_json(const Matrix<Expr>& m, const std::vector<std::string>& frame) {
  json out = json::object();
  for (std::size_t a = 0; a < m.rows(); ++a) {
    for (std::size_t b = a + 1; b < m.cols(); ++b) {
      if (!m(a, b).is_zero()) out[pair_key(frame, a, b)] = m(a, b).str();
    }
  }
  return out;
}

json matrix_json(const Matrix<Expr>& m) {
  json out = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(m(i, k).str());
    out.push_back(row);
  }
  return out;
}

json algebroid_json(const AlgebroidEntry& entry) {
  const LieAlgebroid& A = entry.algebroid;
  json out;
  out["base_vars"] = A.base_vars;
  out["frame"] = A.frame;
  out["anchor"] = matrix_json(A.anchor);
  json structure = json::object();
  const std::size_t r = A.rank();
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t b = a + 1; b < r; ++b) {
      json targets = json::object();
      for (std::size_t c = 0; c < r; ++c) {
        if (!A.C(a, b, c).is_zero()) targets[A.frame[c]] = A.C(a, b, c).str();
      }
      if (!targets.empty()) structure[pair_key(A.frame, a, b)] = targets;
    }
  }
  out["structure"] = structure;
  auto emit = [&](const char* key, const auto& items, auto&& fn) {
    if (items.empty()) return;
    json obj = json::object();
    for (const auto& [name, value] : items) obj[name] = fn(value);
    out[key] = obj;
  };
  emit("bivectors", entry.bivectors, [&](const Matrix<Expr>& m) { return antisymmetric_json(m, A.frame); });
  emit("two_forms", entry.two_forms, [&](const Matrix<Expr>& m) { return antisymmetric_json(m, A.frame); });
  emit("endomorphisms", entry.endomorphisms, [&](const Matrix<Expr>& m) { return matrix_json(m); });
  emit("functions", entry.functions, [&](const Expr& e) { return json(e.str()); });
  return out;
}

std::vector<std::vector<double>> default_atiyah_points(int n) {
  std::vector<std::vector<double>> pts;
  for (int k = 0; k < 3; ++k) {
    std::vector<double> x;
    for (int i = 1; i < n; ++i) x.push_back(0.7 + 0.3 * k + 0.1 * i);
    for (int i = 1; i <= n; ++i) x.push_back(-0.5 + 0.25 * k + 0.2 * i);
    pts.push_back(x);
  }
  return pts;
}

}  // namespace

const AlgebroidEntry& SpecDocument::algebroid(const std::string& name) const {
  auto it = algebroids.find(name);
  if (it == algebroids.end()) throw SpecError("/algebroids", "unknown algebroid " + name);
  return it->second;
}

SpecDocument parse_spec(const json& doc) {
  SpecDocument out;
  if (!doc.is_object()) throw SpecError("", "expected a JSON object");
  std::vector<std::pair<std::string, std::string>> nested;  // (algebroid name, path)
  if (doc.contains("base_vars")) {
    std::string name = doc.contains("name") ? as_string(doc["name"], "/name") : "main";
    out.algebroids[name] = parse_algebroid(doc, "");
    if (doc.contains("epimorphism")) nested.emplace_back(name, "");
  } else {
    for (const auto& key : doc.items()) {
      if (key.key() != "algebroids" && key.key() != "epimorphisms" && key.key() != "leaves") {
        throw SpecError("/" + key.key(), "unknown top-level key");
      }
    }
    if (doc.contains("algebroids")) {
      const json& algs = doc["algebroids"];
      if (!algs.is_object()) throw SpecError("/algebroids", "expected an object of named algebroids");
      for (const auto& [name, value] : algs.items()) {
        out.algebroids[name] = parse_algebroid(value, "/algebroids/" + name);
        if (value.contains("epimorphism")) nested.emplace_back(name, "/algebroids/" + name);
      }
    }
  }
  for (const auto& [name, path] : nested) {
    const json& block = path.empty() ? doc["epimorphism"] : doc["algebroids"][name]["epimorphism"];
    std::string p = path + "/epimorphism";
    std::string epi_name = block.contains("name") ? as_string(block["name"], p + "/name")
                                                  : name + "_to_" + as_string(require_key(block, "target", p), p + "/target");
    out.epimorphisms[epi_name] = parse_epimorphism(block, name, out, p, epi_name);
  }
  if (doc.contains("epimorphisms")) {
    const json& epis = doc["epimorphisms"];
    if (!epis.is_object()) throw SpecError("/epimorphisms", "expected an object of named epimorphisms");
    for (const auto& [name, value] : epis.items()) {
      std::string p = "/epimorphisms/" + name;
      if (out.epimorphisms.count(name)) throw SpecError(p, "duplicate epimorphism name");
      out.epimorphisms[name] = parse_epimorphism(value, "", out, p, name);
    }
  }
  if (doc.contains("leaves")) {
    const json& leaves = doc["leaves"];
    if (!leaves.is_object()) throw SpecError("/leaves", "expected an object of named leaves");
    for (const auto& [name, value] : leaves.items()) out.leaves[name] = parse_leaf(value, out, "/leaves/" + name);
  }
  return out;
}

SpecDocument parse_spec_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw SpecError("", std::string("malformed JSON: ") + err.what());
  }
  return parse_spec(doc);
}

SpecDocument load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec_text(ss.str());
}

json to_json(const SpecDocument& doc) {
  json out = json::object();
  json algs = json::object();
  for (const auto& [name, entry] : doc.algebroids) algs[name] = algebroid_json(entry);
  out["algebroids"] = algs;
  if (!doc.epimorphisms.empty()) {
    json epis = json::object();
    for (const auto& [name, entry] : doc.epimorphisms) {
      const EpimorphismSpec& E = entry.spec;
      json e;
      e["source"] = entry.source;
      e["target"] = entry.target;
      json bm = json::object();
      for (std::size_t j = 0; j < E.base_map.size(); ++j) bm[E.target.base_vars[j]] = E.base_map[j].str();
      e["base_map"] = bm;
      e["fiber_map"] = matrix_json(E.fiber_map);
      if (!E.basic_substitutions.empty()) {
        json subs = json::object();
        for (const auto& [key, value] : E.basic_substitutions) subs[key] = value.str();
        e["basic_substitutions"] = subs;
      }
      epis[name] = e;
    }
    out["epimorphisms"] = epis;
  }
  if (!doc.leaves.empty()) {
    json leaves = json::object();
    for (const auto& [name, entry] : doc.leaves) {
      const LeafSpec& L = entry.leaf;
      json l;
      l["algebroid"] = entry.algebroid;
      l["bivector"] = entry.bivector;
      if (!entry.endomorphism.empty()) l["endomorphism"] = entry.endomorphism;
      l["full_rank"] = L.full_rank;
      if (!L.full_rank) {
        l["leaf_vars"] = L.leaf_vars;
        const LieAlgebroid& A = doc.algebroid(entry.algebroid).algebroid;
        json emb = json::object();
        for (std::size_t i = 0; i < L.embedding.size(); ++i) emb[A.base_vars[i]] = L.embedding[i].str();
        l["embedding"] = emb;
        json gens = json::array();
        for (const auto& g : L.generators) {
          json row = json::array();
          for (const auto& c : g) row.push_back(c.str());
          gens.push_back(row);
        }
        l["generators"] = gens;
      }
      if (!L.sample_points.empty()) l["sample_points"] = L.sample_points;
      leaves[name] = l;
    }
    out["leaves"] = leaves;
  }
  return out;
}

std::string serialize(const SpecDocument& doc) { return to_json(doc).dump(2) + "\n"; }

SpecDocument export_toda(const TodaFixture& toda) {
  SpecDocument doc;
  AlgebroidEntry phase{toda.phase, {}, {}, {}, {}};
  phase.bivectors = {{"lambda0", toda.lambda0}, {"lambda1", toda.lambda1}};
  phase.endomorphisms = {{"N", toda.recursion}};
  phase.functions = {{"H0", toda.h0}, {"H1", toda.h1}};
  doc.algebroids["phase"] = phase;

  AlgebroidEntry base{toda.flaschka, {}, {}, {}, {}};
  base.bivectors = {{"lambda0_bar", toda.lambda0_bar}, {"lambda1_bar", toda.lambda1_bar}};
  base.functions = {{"H0_bar", toda.h0_bar}, {"H1_bar", toda.h1_bar}};
  doc.algebroids["flaschka"] = base;

  AlgebroidEntry atiyah{toda.atiyah, {}, {}, {}, {}};
  atiyah.bivectors = {{"pi0", toda.pi0}, {"pi1", toda.pi1}};
  atiyah.endomorphisms = {{"N", toda.atiyah_recursion}};
  atiyah.functions = {{"H0_bar", toda.h0_bar}, {"H1_bar", toda.h1_bar}};
  SymbolicInverse omega = invert_poisson(toda.pi0);
  if (omega.exact) atiyah.two_forms = {{"omega0", *omega.exact}};
  doc.algebroids["atiyah"] = atiyah;

  doc.epimorphisms["flaschka"] = {"phase", "flaschka", toda.projection};

  LeafEntry leaf;
  leaf.algebroid = "atiyah";
  leaf.bivector = "pi0";
  leaf.endomorphism = "N";
  leaf.leaf.full_rank = true;
  leaf.leaf.sample_points = default_atiyah_points(toda.n);
  doc.leaves["atiyah_full"] = leaf;
  return doc;
}

SpecDocument export_semidirect(const SemidirectFixture& fx) {
  SpecDocument doc;
  AlgebroidEntry entry{fx.algebroid, {}, {}, {}, {}};
  entry.bivectors = {{"poisson", fx.poisson}, {"lambda_h1", fx.lambda_h1}};
  entry.two_forms = {{"omega", fx.omega}};
  entry.endomorphisms = {{"N", fx.nijenhuis}};
  doc.algebroids["aff1"] = entry;
  LeafEntry leaf;
  leaf.algebroid = "aff1";
  leaf.bivector = "poisson";
  leaf.endomorphism = "N";
  leaf.leaf.full_rank = true;
  leaf.leaf.sample_points = {{0.3, 0.7}, {-1.2, 0.4}};
  doc.leaves["full"] = leaf;
  return doc;
}

SpecDocument builtin_spec(const std::string& name) {
  if (name == "aff1") return export_semidirect(build_semidirect(aff1_data()));
  if (name.rfind("toda", 0) == 0) {
    int n = 2;
    if (name.size() > 4) {
      if (name[4] != ':') throw SpecError("", "unknown builtin " + name);
      try {
        std::size_t used = 0;
        n = std::stoi(name.substr(5), &used);
        if (used != name.size() - 5) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw SpecError("", "bad particle count in " + name);
      }
    }
    if (n < 2) throw SpecError("", "toda needs at least two particles");
    return export_toda(build_toda(n));
  }
  throw SpecError("", "unknown builtin " + name);
}

}  // namespace pnred
