// Command-line front end: load a spec file or builtin fixture, run one family
// of checks, print a report. Exit codes are listed in report.hpp.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pnred/acceptance.hpp"
#include "pnred/fixtures.hpp"
#include "pnred/report.hpp"
#include "pnred/sampling.hpp"
#include "pnred/specfile.hpp"

using namespace pnred;
using nlohmann::json;

namespace {

// Usage problems that should exit with the parse code.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string spec;
  std::string algebroid;
  std::string format = "text";
  double tolerance = default_tolerance();
  std::vector<std::string> box;
  std::uint64_t seed = 1;
  int points = 20;
};

void add_common(CLI::App* cmd, Common& c, bool sampling) {
  cmd->add_option("spec", c.spec, "spec file, or builtin toda[:N] / aff1")->required();
  cmd->add_option("--algebroid", c.algebroid, "algebroid name inside the spec");
  cmd->add_option("--format", c.format, "report format")->check(CLI::IsMember({"json", "text"}));
  cmd->add_option("--tolerance", c.tolerance, "relative singular-value cut for numeric ranks");
  if (sampling) {
    cmd->add_option("--points", c.points, "number of random base points")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", c.seed, "sampling seed");
    cmd->add_option("--box", c.box, "sampling range override var=lo:hi");
  }
}

SpecDocument load(const std::string& spec) {
  if (spec == "aff1" || spec.rfind("toda", 0) == 0) {
    std::ifstream probe(spec);
    if (!probe) return builtin_spec(spec);
  }
  return load_spec_file(spec);
}

template <class Map>
std::string pick_name(const Map& m, const std::string& requested, const std::string& what) {
  if (!requested.empty()) {
    if (!m.count(requested)) throw UsageError("no " + what + " named '" + requested + "'");
    return requested;
  }
  if (m.size() == 1) return m.begin()->first;
  std::string names;
  for (const auto& [k, v] : m) names += " " + k;
  throw UsageError(m.empty() ? "spec has no " + what
                             : "several " + what + "s in the spec, choose one with --" + what + ":" + names);
}

Box parse_box(const LieAlgebroid& A, const std::vector<std::string>& specs) {
  std::map<std::string, std::pair<double, double>> overrides;
  for (const auto& s : specs) {
    auto eq = s.find('='), colon = s.find(':', eq == std::string::npos ? 0 : eq);
    if (eq == std::string::npos || colon == std::string::npos) throw UsageError("bad --box '" + s + "'");
    std::string name = s.substr(0, eq);
    if (std::find(A.base_vars.begin(), A.base_vars.end(), name) == A.base_vars.end()) {
      throw UsageError("--box names unknown coordinate " + name);
    }
    try {
      double lo = std::stod(s.substr(eq + 1, colon - eq - 1)), hi = std::stod(s.substr(colon + 1));
      if (!(lo <= hi)) throw UsageError("empty range in --box '" + s + "'");
      overrides[name] = {lo, hi};
    } catch (const std::logic_error&) {
      throw UsageError("bad number in --box '" + s + "'");
    }
  }
  return default_box(A.base_vars, overrides);
}

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

json matrix_json(const Matrix<Expr>& m) {
  json out = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j).str());
    out.push_back(row);
  }
  return out;
}

Verdict all_of(bool ok, const std::string& witness) { return ok ? Verdict::pass() : Verdict::fail(witness); }

std::string point_text(const std::vector<double>& x) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < x.size(); ++i) out << (i ? ", " : "") << x[i];
  out << ")";
  return out.str();
}

struct Context {
  SpecDocument doc;
  std::string name;
  const AlgebroidEntry* entry = nullptr;
  Report report;
};

Context open(const Common& c, const std::string& command, const std::string& args, bool pick_algebroid = true) {
  Context ctx;
  ctx.doc = load(c.spec);
  ctx.report.command = command;
  ctx.report.tolerance = c.tolerance;
  ctx.report.inputs_digest = fnv1a_digest(serialize(ctx.doc) + "\n" + command + " " + args);
  if (pick_algebroid && !ctx.doc.algebroids.empty()) {
    ctx.name = pick_name(ctx.doc.algebroids, c.algebroid, "algebroid");
    ctx.entry = &ctx.doc.algebroids.at(ctx.name);
    ctx.report.data["algebroid"] = ctx.name;
  }
  return ctx;
}

const AlgebroidEntry& require_entry(const Context& ctx) {
  if (!ctx.entry) throw UsageError("spec has no algebroid");
  return *ctx.entry;
}

std::vector<std::vector<double>> sample(const Common& c, Context& ctx, const LieAlgebroid& A) {
  Box box = parse_box(A, c.box);
  ctx.report.seed = c.seed;
  json jbox = json::object();
  for (std::size_t i = 0; i < box.size(); ++i) jbox[A.base_vars[i]] = {box[i].first, box[i].second};
  ctx.report.data["box"] = jbox;
  return sample_box(box, c.points, c.seed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Checks for Poisson-Nijenhuis Lie algebroids and their reductions"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common c;
  std::string bivector, second, endomorphism, epi, leaf_name, expect, output;
  std::string compatible_with;
  int depth = 2, particles = 2, expect_index = 1;

  auto* check_algebroid_cmd = app.add_subcommand("check-algebroid", "antisymmetry, Jacobi and anchor morphism");
  add_common(check_algebroid_cmd, c, false);

  auto* check_poisson_cmd = app.add_subcommand("check-poisson", "[P, P] = 0, optionally compatibility");
  add_common(check_poisson_cmd, c, false);
  check_poisson_cmd->add_option("--bivector", bivector);
  check_poisson_cmd->add_option("--compatible-with", compatible_with);

  auto* check_pn_cmd = app.add_subcommand("check-pn", "Poisson-Nijenhuis compatibility of (P, N)");
  auto* check_sn_cmd = app.add_subcommand("check-sn", "PN compatibility with P nondegenerate");
  for (auto* cmd : {check_pn_cmd, check_sn_cmd}) {
    add_common(cmd, c, false);
    cmd->add_option("--bivector", bivector);
    cmd->add_option("--endomorphism", endomorphism);
  }

  auto* hierarchy_cmd = app.add_subcommand("hierarchy", "N^l P for l = 0..depth");
  add_common(hierarchy_cmd, c, false);
  hierarchy_cmd->add_option("--bivector", bivector);
  hierarchy_cmd->add_option("--endomorphism", endomorphism);
  hierarchy_cmd->add_option("--depth", depth)->check(CLI::Range(1, 8));

  auto* recursion_cmd = app.add_subcommand("recursion", "N = P1 P0^{-1}");
  add_common(recursion_cmd, c, false);
  recursion_cmd->add_option("--bivector", bivector, "P0")->required();
  recursion_cmd->add_option("--second", second, "P1")->required();
  recursion_cmd->add_option("--expect", expect, "endomorphism the result should equal");

  auto* project_cmd = app.add_subcommand("project", "push structures through an epimorphism");
  add_common(project_cmd, c, false);
  project_cmd->add_option("--epi", epi);

  auto* leaf_cmd = app.add_subcommand("restrict-leaf", "restriction to a leaf of the characteristic foliation");
  add_common(leaf_cmd, c, false);
  leaf_cmd->add_option("--leaf", leaf_name);

  auto* riesz_cmd = app.add_subcommand("riesz", "pointwise Riesz index and splitting");
  add_common(riesz_cmd, c, true);
  riesz_cmd->add_option("--endomorphism", endomorphism);
  riesz_cmd->add_option("--expect-index", expect_index, "required Riesz index at every point");

  auto* fiberwise_cmd = app.add_subcommand("reduce-fiberwise", "quotient by ker N^k at sample points");
  add_common(fiberwise_cmd, c, true);
  fiberwise_cmd->add_option("--bivector", bivector);
  fiberwise_cmd->add_option("--endomorphism", endomorphism);

  auto* fixture_cmd = app.add_subcommand("fixture", "export a builtin fixture as a spec file");
  fixture_cmd->require_subcommand(1);
  auto* fixture_toda = fixture_cmd->add_subcommand("toda", "non-periodic Toda lattice");
  fixture_toda->add_option("--n", particles, "number of particles")->check(CLI::Range(2, 12));
  auto* fixture_aff1 = fixture_cmd->add_subcommand("aff1", "semidirect product over aff(1)");
  for (auto* cmd : {fixture_toda, fixture_aff1}) cmd->add_option("--output", output, "write here instead of stdout");

  auto* selftest_cmd = app.add_subcommand("selftest", "run the acceptance suite");
  selftest_cmd->add_option("--format", c.format)->check(CLI::IsMember({"json", "text"}));
  selftest_cmd->add_option("--seed", c.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  const std::string args = [&] {
    std::string out;
    for (int i = 1; i < argc; ++i) out += std::string(argv[i]) + " ";
    return out;
  }();

  Report report;
  try {
    if (fixture_cmd->parsed()) {
      SpecDocument doc = fixture_toda->parsed() ? builtin_spec("toda:" + std::to_string(particles)) : builtin_spec("aff1");
      std::string text = serialize(doc);
      if (output.empty()) {
        std::cout << text;
        return kExitPass;
      }
      std::ofstream out(output);
      if (!out) throw UsageError("cannot write " + output);
      out << text;
      report.command = fixture_toda->parsed() ? "fixture toda" : "fixture aff1";
      report.inputs_digest = fnv1a_digest(text);
      report.tolerance = c.tolerance;
      report.data["output"] = output;
      report.data["algebroids"] = json::array();
      for (const auto& [name, entry] : doc.algebroids) report.data["algebroids"].push_back(name);
    } else if (selftest_cmd->parsed()) {
      report.command = "selftest";
      report.tolerance = default_tolerance();
      report.seed = c.seed;
      report.inputs_digest = fnv1a_digest("selftest " + std::to_string(c.seed));
      AcceptanceOptions options;
      options.seed = c.seed;
      for (const auto& r : run_acceptance(options)) {
        std::string witness;
        for (const auto& f : r.failures) witness += (witness.empty() ? "" : "; ") + f;
        CheckRecord rec{"criterion " + std::to_string(r.id) + ": " + r.title, r.ok, witness, r.seconds,
                        r.ill_conditioned};
        report.checks.push_back(rec);
      }
    } else if (check_algebroid_cmd->parsed()) {
      Context ctx = open(c, "check-algebroid", args);
      const LieAlgebroid& A = require_entry(ctx).algebroid;
      AlgebroidCheck check;
      timed_check(ctx.report, "structure functions", [&] {
        check = check_algebroid(A);
        return check.antisymmetry;
      });
      ctx.report.add("Jacobi identity", check.jacobi);
      ctx.report.add("anchor is a morphism of brackets", check.anchor_morphism);
      report = std::move(ctx.report);
    } else if (check_poisson_cmd->parsed()) {
      Context ctx = open(c, "check-poisson", args);
      const AlgebroidEntry& e = require_entry(ctx);
      std::string name = pick_name(e.bivectors, bivector, "bivector");
      ctx.report.data["bivector"] = name;
      timed_check(ctx.report, "antisymmetric " + name, [&] { return is_antisymmetric(e.bivectors.at(name), name); });
      timed_check(ctx.report, "[" + name + ", " + name + "] = 0", [&] { return is_poisson(e.algebroid, e.bivectors.at(name)); });
      if (!compatible_with.empty()) {
        std::string other = pick_name(e.bivectors, compatible_with, "bivector");
        timed_check(ctx.report, "[" + name + ", " + other + "] = 0", [&] {
          return are_compatible(e.algebroid, e.bivectors.at(name), e.bivectors.at(other));
        });
      }
      report = std::move(ctx.report);
    } else if (check_pn_cmd->parsed() || check_sn_cmd->parsed()) {
      bool sn = check_sn_cmd->parsed();
      Context ctx = open(c, sn ? "check-sn" : "check-pn", args);
      const AlgebroidEntry& e = require_entry(ctx);
      std::string p = pick_name(e.bivectors, bivector, "bivector");
      std::string n = pick_name(e.endomorphisms, endomorphism, "endomorphism");
      ctx.report.data["bivector"] = p;
      ctx.report.data["endomorphism"] = n;
      const Bivector& P = e.bivectors.at(p);
      const Endomorphism& N = e.endomorphisms.at(n);
      timed_check(ctx.report, p + " Poisson", [&] { return is_poisson(e.algebroid, P); });
      PNVerdict pn;
      timed_check(ctx.report, "torsion of " + n + " vanishes", [&] {
        pn = pn_check(e.algebroid, P, N);
        return pn.torsion_zero;
      });
      ctx.report.add(n + " " + p + "# = " + p + "# " + n + "*", pn.sharp_commutes);
      ctx.report.add("concomitant C(" + p + ", " + n + ") vanishes", pn.concomitant_zero);
      if (sn) {
        Expr det = determinant(P);
        ctx.report.data["determinant"] = det.str();
        ctx.report.add(p + " nondegenerate", all_of(pn.nondegenerate, "det " + p + " = " + det.str()));
      }
      report = std::move(ctx.report);
    } else if (hierarchy_cmd->parsed()) {
      Context ctx = open(c, "hierarchy", args);
      const AlgebroidEntry& e = require_entry(ctx);
      std::string p = pick_name(e.bivectors, bivector, "bivector");
      std::string n = pick_name(e.endomorphisms, endomorphism, "endomorphism");
      Hierarchy h;
      timed_check(ctx.report, p + " Poisson", [&] {
        h = hierarchy(e.algebroid, e.bivectors.at(p), e.endomorphisms.at(n), depth);
        return h.poisson[0];
      });
      if (!h.bivectors.empty()) {
        json levels = json::array();
        for (std::size_t l = 0; l < h.bivectors.size(); ++l) {
          std::string level = n + "^" + std::to_string(l) + " " + p;
          if (l > 0) {
            ctx.report.add(level + " Poisson", h.poisson[l]);
            const PNVerdict& pn = h.pn_powers[l];
            ctx.report.add("(" + p + ", " + n + "^" + std::to_string(l) + ") PN",
                           both(pn.torsion_zero, both(pn.sharp_commutes, pn.concomitant_zero)));
          }
          for (std::size_t j = l + 1; j < h.bivectors.size(); ++j) {
            ctx.report.add(level + " compatible with " + n + "^" + std::to_string(j) + " " + p, h.compatible[l][j]);
          }
          levels.push_back(matrix_json(h.bivectors[l]));
        }
        ctx.report.data["bivectors"] = levels;
      }
      report = std::move(ctx.report);
    } else if (recursion_cmd->parsed()) {
      Context ctx = open(c, "recursion", args);
      const AlgebroidEntry& e = require_entry(ctx);
      pick_name(e.bivectors, bivector, "bivector");
      pick_name(e.bivectors, second, "bivector");
      timed_check(ctx.report, "recursion operator " + second + " " + bivector + "^{-1}", [&] {
        try {
          RecursionOperator r = recursion_operator(e.bivectors.at(bivector), e.bivectors.at(second));
          ctx.report.data["denominator"] = r.denominator.str();
          ctx.report.data["numerator"] = matrix_json(r.numerator);
          if (r.exact) ctx.report.data["operator"] = matrix_json(*r.exact);
          if (!expect.empty()) {
            std::string want = pick_name(e.endomorphisms, expect, "endomorphism");
            if (!r.exact) return Verdict::fail("operator leaves the expression class");
            if (*r.exact != e.endomorphisms.at(want)) return Verdict::fail("differs from " + want);
          }
          return Verdict::pass();
        } catch (const DegenerateBivector& err) {
          ctx.report.data["kernel_witness"] = to_string(err.witness());
          return Verdict::fail(std::string(err.what()) + "; " + bivector + "# vanishes on " + to_string(err.witness()));
        }
      });
      report = std::move(ctx.report);
    } else if (project_cmd->parsed()) {
      Context ctx = open(c, "project", args, false);
      std::string name = pick_name(ctx.doc.epimorphisms, epi, "epi");
      const EpimorphismEntry& E = ctx.doc.epimorphisms.at(name);
      const AlgebroidEntry& source = ctx.doc.algebroid(E.source);
      const AlgebroidEntry* target = ctx.doc.algebroids.count(E.target) ? &ctx.doc.algebroids.at(E.target) : nullptr;
      ctx.report.data["epimorphism"] = name;
      timed_check(ctx.report, "anchor compatibility", [&] { return anchor_compatibility(E.spec); });
      json projected = json::object();
      for (const auto& [bname, P] : source.bivectors) {
        timed_check(ctx.report, "bivector " + bname + " projectable", [&] {
          Bivector Q = project_bivector(E.spec, P);
          json j;
          j["matrix"] = matrix_json(Q);
          if (target) {
            for (const auto& [tname, T] : target->bivectors) {
              if (T == Q) j["equals"] = tname;
            }
          }
          projected[bname] = j;
          return Verdict::pass();
        });
      }
      for (const auto& [nname, N] : source.endomorphisms) {
        timed_check(ctx.report, "endomorphism " + nname + " projectable",
                    [&] { return projectable_endo_check(E.spec, N); });
      }
      ctx.report.data["projected"] = projected;
      report = std::move(ctx.report);
    } else if (leaf_cmd->parsed()) {
      Context ctx = open(c, "restrict-leaf", args, false);
      std::string name = pick_name(ctx.doc.leaves, leaf_name, "leaf");
      const LeafEntry& L = ctx.doc.leaves.at(name);
      const AlgebroidEntry& e = ctx.doc.algebroid(L.algebroid);
      if (!e.bivectors.count(L.bivector)) throw UsageError("leaf " + name + " names unknown bivector " + L.bivector);
      Endomorphism N = Endomorphism::identity(e.algebroid.rank());
      if (!L.endomorphism.empty()) {
        if (!e.endomorphisms.count(L.endomorphism)) {
          throw UsageError("leaf " + name + " names unknown endomorphism " + L.endomorphism);
        }
        N = e.endomorphisms.at(L.endomorphism);
      }
      ctx.report.data["leaf"] = name;
      std::optional<LeafRestriction> r;
      timed_check(ctx.report, "leaf hypotheses", [&] {
        r = restrict_to_leaf(e.algebroid, e.bivectors.at(L.bivector), N, L.leaf);
        return Verdict::pass();
      });
      if (r) {
        ctx.report.add("Omega_L^flat(X_L) = -I^* alpha", r->omega_flat_identity);
        ctx.report.add("P_L(I^* alpha, I^* beta) = P(alpha, beta) o iota", r->pullback_identity);
        ctx.report.add("Omega_L closed", r->symplectic.closed);
        ctx.report.add("Omega_L nondegenerate", r->symplectic.nondegenerate);
        ctx.report.add("restricted pair PN", both(r->pn.torsion_zero, both(r->pn.sharp_commutes, r->pn.concomitant_zero)));
        ctx.report.data["omega"] = matrix_json(r->omega);
        ctx.report.data["endomorphism"] = matrix_json(r->nijenhuis);
        ctx.report.data["inclusion"] = matrix_json(r->inclusion);
      }
      report = std::move(ctx.report);
    } else if (riesz_cmd->parsed()) {
      Context ctx = open(c, "riesz", args);
      const AlgebroidEntry& e = require_entry(ctx);
      std::string n = pick_name(e.endomorphisms, endomorphism, "endomorphism");
      auto points = sample(c, ctx, e.algebroid);
      std::vector<PointReport> reports;
      timed_check(ctx.report, "ker N^k + im N^k = A at every point", [&] {
        reports = riesz_report(e.algebroid, e.endomorphisms.at(n), points, c.tolerance);
        for (const auto& r : reports) {
          if (!r.direct_sum) return Verdict::fail("no direct sum at " + point_text(r.point));
        }
        return Verdict::pass();
      });
      bool ill = false;
      json list = json::array();
      std::map<int, int> histogram;
      for (const auto& r : reports) {
        ill = ill || r.ill_conditioned;
        ++histogram[r.riesz_index];
        list.push_back({{"point", r.point}, {"ranks", r.ranks}, {"riesz_index", r.riesz_index},
                        {"kernel_dim", r.kernel_dim}, {"image_dim", r.image_dim}, {"direct_sum", r.direct_sum},
                        {"ill_conditioned", r.ill_conditioned}});
      }
      if (!ctx.report.checks.empty()) ctx.report.checks.back().ill_conditioned = ill;
      if (riesz_cmd->count("--expect-index")) {
        std::string witness;
        for (const auto& r : reports) {
          if (r.riesz_index != expect_index && witness.empty()) {
            witness = "index " + std::to_string(r.riesz_index) + " at " + point_text(r.point);
          }
        }
        ctx.report.add("Riesz index " + std::to_string(expect_index) + " everywhere", all_of(witness.empty(), witness));
      }
      json counts = json::object();
      for (const auto& [k, count] : histogram) counts[std::to_string(k)] = count;
      ctx.report.data["endomorphism"] = n;
      ctx.report.data["riesz_index_counts"] = counts;
      ctx.report.data["reports"] = list;
      report = std::move(ctx.report);
    } else if (fiberwise_cmd->parsed()) {
      Context ctx = open(c, "reduce-fiberwise", args);
      const AlgebroidEntry& e = require_entry(ctx);
      std::string p = pick_name(e.bivectors, bivector, "bivector");
      std::string n = pick_name(e.endomorphisms, endomorphism, "endomorphism");
      auto points = sample(c, ctx, e.algebroid);
      std::vector<FiberwiseReduction> results;
      timed_check(ctx.report, "reduction computed", [&] {
        results = fiberwise_reduce(e.algebroid, e.bivectors.at(p), e.endomorphisms.at(n), points, c.tolerance);
        return Verdict::pass();
      });
      std::string bad_n, bad_p;
      bool ill = false;
      json list = json::array();
      for (const auto& r : results) {
        ill = ill || r.ill_conditioned;
        if (!r.reduced_n_invertible && bad_n.empty()) bad_n = point_text(r.point) + " " + r.witness;
        if (!r.reduced_p_nondegenerate && bad_p.empty()) bad_p = point_text(r.point) + " " + r.witness;
        list.push_back({{"point", r.point}, {"riesz_index", r.riesz_index}, {"quotient_dim", r.quotient_dim},
                        {"n_invertible", r.n_invertible}, {"reduced_n", matrix_json(r.reduced_n)},
                        {"reduced_p", matrix_json(r.reduced_p)}, {"ill_conditioned", r.ill_conditioned},
                        {"witness", r.witness}});
      }
      ctx.report.add("reduced " + n + " invertible", all_of(bad_n.empty(), bad_n), 0.0, ill);
      ctx.report.add("reduced " + p + " nondegenerate", all_of(bad_p.empty(), bad_p), 0.0, ill);
      ctx.report.data["reductions"] = list;
      report = std::move(ctx.report);
    }
  } catch (const SpecError& err) {
    if (err.path().empty()) {
      std::cerr << "spec error: " << err.what() + 2 << "\n";
    } else {
      std::cerr << "spec error at " << err.what() << "\n";
    }
    return kExitParse;
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitParse;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitFail;
  }

  if (c.format == "json") {
    std::cout << to_json(report).dump(2) << "\n";
  } else {
    std::cout << render_text(report);
  }
  return report.exit_code();
}
