#include <catch_amalgamated.hpp>

#include "pnred/report.hpp"
#include "pnred/sampling.hpp"
#include "pnred/specfile.hpp"

using namespace pnred;

namespace {

std::string error_path(const std::string& text) {
  try {
    parse_spec_text(text);
  } catch (const SpecError& err) {
    return err.path();
  }
  return "<no error>";
}

const char* kPlane = R"j({
  "name": "plane",
  "base_vars": ["x", "y"],
  "frame": ["e1", "e2"],
  "anchor": [["1", "0"], ["0", "exp(x)"]],
  "structure": {"(e1,e2)": {"e2": "1"}},
  "bivectors": {"P": {"(e2,e1)": "-exp(-x)"}},
  "functions": {"H": "x*y"},
  "endomorphisms": {"N": [["y", 0], [0, "1/2"]]}
})j";

}  // namespace

TEST_CASE("single algebroid document", "[specfile]") {
  SpecDocument doc = parse_spec_text(kPlane);
  REQUIRE(doc.algebroids.count("plane"));
  const AlgebroidEntry& e = doc.algebroid("plane");
  const LieAlgebroid& A = e.algebroid;
  CHECK(A.C(0, 1, 1) == Expr(1));
  CHECK(A.C(1, 0, 1) == Expr(-1));
  CHECK(A.anchor(1, 1) == exp(Expr::variable("x")));
  CHECK(e.bivectors.at("P")(0, 1) == exp(-Expr::variable("x")));
  CHECK(e.endomorphisms.at("N")(1, 1) == Expr(Rational(1, 2)));
  CHECK(check_algebroid(A).valid());
}

TEST_CASE("builtin documents round-trip bit-exactly", "[specfile]") {
  for (const char* name : {"toda:2", "toda:3", "aff1"}) {
    SpecDocument doc = builtin_spec(name);
    std::string once = serialize(doc);
    SpecDocument again = parse_spec_text(once);
    CHECK(serialize(again) == once);
  }
  TodaFixture toda = build_toda(2);
  SpecDocument doc = parse_spec_text(serialize(export_toda(toda)));
  CHECK(doc.algebroid("atiyah").bivectors.at("pi1") == toda.pi1);
  CHECK(doc.algebroid("phase").endomorphisms.at("N") == toda.recursion);
  CHECK(doc.algebroid("atiyah").algebroid.anchor == toda.atiyah.anchor);
  const EpimorphismSpec& E = doc.epimorphisms.at("flaschka").spec;
  CHECK(E.fiber_map == toda.projection.fiber_map);
  CHECK(project_bivector(E, toda.lambda1) == toda.lambda1_bar);
  CHECK(doc.leaves.at("atiyah_full").leaf.full_rank);
}

TEST_CASE("nested epimorphism and leaf generators", "[specfile]") {
  const char* text = R"j({
    "algebroids": {
      "block": {
        "base_vars": ["q", "p", "u"],
        "frame": ["dq", "dp", "du"],
        "anchor": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        "bivectors": {"P": {"(dq,dp)": 1}},
        "epimorphism": {"target": "line", "base_map": {"s": "p"}, "fiber_map": [[0, 1, 0]]}
      },
      "line": {"base_vars": ["s"], "frame": ["ds"], "anchor": [[1]]}
    },
    "leaves": {
      "plane": {"algebroid": "block", "bivector": "P", "leaf_vars": ["q", "p"],
                "embedding": {"q": "q", "p": "p", "u": "1/3"},
                "generators": [{"dp": -1}, [1, 0, 0]], "sample_points": [[0.1, 0.2]]}
    }
  })j";
  SpecDocument doc = parse_spec_text(text);
  REQUIRE(doc.epimorphisms.count("block_to_line"));
  CHECK(doc.epimorphisms.at("block_to_line").source == "block");
  const LeafSpec& L = doc.leaves.at("plane").leaf;
  REQUIRE(L.generators.size() == 2);
  CHECK(L.generators[0][1] == Expr(-1));
  CHECK(L.embedding[2] == Expr(Rational(1, 3)));
  LeafRestriction R = restrict_to_leaf(doc.algebroid("block").algebroid, doc.algebroid("block").bivectors.at("P"),
                                       Endomorphism::identity(3), L);
  CHECK(R.symplectic.ok());
  CHECK(parse_spec_text(serialize(doc)).leaves.size() == 1);
}

TEST_CASE("errors carry the offending path", "[specfile]") {
  CHECK(error_path("{") == "");
  CHECK(error_path(R"j({"base_vars": ["x"]})j") == "");
  CHECK(error_path(R"j({"base_vars": ["x"], "frame": ["e"], "anchor": [["z"]]})j") == "/anchor/0/0");
  CHECK(error_path(R"j({"base_vars": ["x"], "frame": ["e"], "anchor": [["x +"]]})j") == "/anchor/0/0");
  CHECK(error_path(R"j({"base_vars": ["x"], "frame": ["e"], "anchor": [["1", "2"]]})j") == "/anchor/0");
  CHECK(error_path(R"j({"base_vars": ["x"], "frame": ["e", "f"], "structure": {"(e,g)": {"e": "1"}}})j") ==
        "/structure/(e,g)");
  CHECK(error_path(R"j({"base_vars": ["x"], "frame": ["e", "f"],
                       "structure": {"(e,f)": {"e": "1"}, "(f,e)": {"e": "1"}}})j")
            .rfind("/structure/", 0) == 0);
  CHECK(error_path(R"j({"base_vars": ["x"], "frame": ["e", "f"], "bivectors": {"P": {"(e,e)": "1"}}})j") ==
        "/bivectors/P/(e,e)");
  CHECK(error_path(R"j({"algebroids": {}, "extra": 1})j") == "/extra");
  CHECK(error_path(R"j({"algebroids": {"a": {"base_vars": ["x"], "frame": ["e"]}},
                       "epimorphisms": {"m": {"source": "a", "target": "zz", "base_map": {}, "fiber_map": []}}})j") ==
        "/epimorphisms/m/target");
  CHECK(error_path(R"j({"algebroids": {"a": {"base_vars": ["x"], "frame": ["e"]}},
                       "epimorphisms": {"m": {"source": "a", "target": "a", "base_map": {"x": "x"},
                                              "fiber_map": [[1]], "basic_substitutions": {"x": "y"}}}})j") ==
        "/epimorphisms/m/basic_substitutions/x");
  CHECK_THROWS_AS(builtin_spec("toda:1"), SpecError);
  CHECK_THROWS_AS(builtin_spec("toda:x"), SpecError);
  CHECK_THROWS_AS(builtin_spec("nope"), SpecError);
}

TEST_CASE("report digests and exit codes", "[report]") {
  CHECK(fnv1a_digest("") == "cbf29ce484222325");
  CHECK(fnv1a_digest("a") == "af63dc4c8601ec8c");
  Report r;
  r.add("first", Verdict::pass());
  CHECK(r.exit_code() == kExitPass);
  r.add("second", Verdict::fail("witness"));
  CHECK(r.exit_code() == kExitFail);
  r.add("third", Verdict::pass(), 0.0, true);
  CHECK(r.exit_code() == kExitIllConditioned);
  timed_check(r, "throws", []() -> Verdict { throw std::runtime_error("boom"); });
  CHECK_FALSE(r.checks.back().ok);
  CHECK(r.checks.back().witness == "boom");
  CHECK(render_text(r).find("FAIL second") != std::string::npos);
  CHECK(to_json(r)["checks"].size() == 4);
}

TEST_CASE("sampling is reproducible and respects boxes", "[sampling]") {
  Box box = default_box({"a1", "b1", "mu2", "q1"}, {{"q1", {3.0, 4.0}}});
  CHECK(box[0] == std::pair<double, double>{0.5, 2.0});
  CHECK(box[1] == std::pair<double, double>{-1.0, 1.0});
  CHECK(box[2] == std::pair<double, double>{-2.0, 2.0});
  CHECK(box[3] == std::pair<double, double>{3.0, 4.0});
  auto first = sample_box(box, 50, 7), second = sample_box(box, 50, 7);
  CHECK(first == second);
  CHECK(first != sample_box(box, 50, 8));
  for (const auto& x : first) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(x[i] >= box[i].first);
      CHECK(x[i] <= box[i].second);
    }
  }
}
