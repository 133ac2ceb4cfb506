#include "catch_amalgamated.hpp"

#include <filesystem>

#include "blaschke_lab/corpus.hpp"
#include "blaschke_lab/io.hpp"

using namespace blaschke_lab;
using Catch::Approx;

namespace {

template <class E, class F>
E catch_as(F&& f) {
  try {
    f();
  } catch (const E& e) {
    return e;
  }
  FAIL("expected exception not thrown");
  throw;
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

} // namespace

TEST_CASE("indicator spec", "[io]") {
  SpecObject s = parse_spec_text(R"({"kind": "indicator", "polygon": [[-1,-1],[1,-1],[1,1],[-1,1]]})");
  const auto& f = std::get<PolyhedralLogConcave>(s);
  REQUIRE(mass(f) == Approx(4.0).epsilon(1e-14));
  REQUIRE(f.max_value() == Approx(1.0));

  SpecObject h = parse_spec_text(R"({"kind": "indicator", "height": 2.5,
    "polygon": {"vertices": [[0,0],[2,0],[0,2]], "tolerance": 1e-9}})");
  REQUIRE(mass(std::get<PolyhedralLogConcave>(h)) == Approx(5.0).epsilon(1e-14));

  // A bare vertex list is a body; as a function it is its indicator.
  SpecObject b = parse_spec_text("[[0,0],[1,0],[0,1]]");
  REQUIRE(std::holds_alternative<Polygon>(b));
  REQUIRE(mass(as_function(b)) == Approx(0.5));
}

TEST_CASE("polyhedral and radial specs", "[io]") {
  SpecObject p = parse_spec_text(R"({"kind": "polyhedral",
    "pieces": [[1,0,0],[-1,0,0],[0,1,0],[0,-1,0]], "domain": "unbounded"})");
  REQUIRE(mass(std::get<PolyhedralLogConcave>(p)) == Approx(mass(linf_function())).epsilon(1e-12));

  SpecObject hp = parse_spec_text(R"({"kind": "polyhedral", "pieces": [[0,0,0]],
    "domain": [[2,0,2],[-1,0,1],[0,1,1],[0,-3,3]]})");
  REQUIRE(mass(std::get<PolyhedralLogConcave>(hp)) == Approx(4.0).epsilon(1e-12));

  SpecObject r = parse_spec_text(R"({"kind": "radial", "dim": 2, "knots": [[0,0],[1,0]]})");
  REQUIRE(mass(std::get<RadialLogConcave>(r)) == Approx(pi).epsilon(1e-14));
  SpecObject t = parse_spec_text(R"({"kind": "radial", "dim": 3, "knots": [[0,0],[1,0.5]], "tail_slope": 1.0})");
  REQUIRE(std::get<RadialLogConcave>(t).tail_slope() == Approx(1.0));
}

TEST_CASE("pair specs", "[io]") {
  SpecObject p = parse_spec_text(R"({"mu": [[0,0,4]], "nu": [[1,0,2],[-1,0,2],[0,1,2],[0,-1,2]]})");
  const auto& q = std::get<SurfaceAreaPair>(p);
  REQUIRE(q.mu_total() == Approx(4.0));
  REQUIRE(quermassintegral_W1(q) == Approx(8.0));
  REQUIRE_THROWS_AS(as_function(p), ValidationError);

  SpecObject r = parse_spec_text(R"({"kind": "radial_pair", "dim": 2, "grad": [[0,3.14159]], "boundary": 6.28318})");
  REQUIRE(std::get<RadialPair>(r).boundary == Approx(6.28318));
}

TEST_CASE("malformed JSON reports the line", "[io]") {
  auto e = catch_as<ParseError>([] { parse_spec_text("{\n  \"kind\": \"radial\",\n  \"dim\": 2,\n  \"knots\": [[0,0] [1,0]]\n}"); });
  REQUIRE(e.line == 4);
  REQUIRE(std::string(e.what()).find("line 4") != std::string::npos);
}

TEST_CASE("validation errors name the field", "[io]") {
  auto conv = catch_as<ValidationError>(
      [] { parse_spec_text(R"({"kind": "radial", "dim": 2, "knots": [[0,0],[1,2],[2,2.5]]})"); });
  REQUIRE(conv.field == "knots");
  REQUIRE(std::string(conv.what()).find("convexity") != std::string::npos);

  auto cent = catch_as<ValidationError>([] { parse_spec_text(R"({"mu": [[0,0,4]], "nu": [[1,0,2],[-1,0,1],[0,1,2],[0,-1,2]]})"); });
  REQUIRE(cent.field == "centering");
  // Moment Σb θ = (2 − 1, 0).
  REQUIRE(std::string(cent.what()).find("defect (1.000000, 0.000000)") != std::string::npos);

  REQUIRE(catch_as<ValidationError>([] { parse_spec_text(R"({"kind": "indicator", "polygon": [[0,0],[1,0],[2,0]]})"); }).field ==
          "polygon");
  REQUIRE(catch_as<ValidationError>([] { parse_spec_text(R"({"kind": "indicator"})"); }).field == "polygon");
  REQUIRE(catch_as<ValidationError>([] { parse_spec_text(R"({"kind": "blob"})"); }).field == "kind");
  REQUIRE(catch_as<ValidationError>([] { parse_spec_text(R"({"kind": "polyhedral", "pieces": [[1,0,0]]})"); }).field ==
          "pieces");
  REQUIRE(catch_as<ValidationError>([] { parse_spec_text(R"({"mu": [[0,0,-1]]})"); }).field == "mu");
  REQUIRE(catch_as<ValidationError>([] { parse_spec_text(R"({"kind": "indicator", "height": 0,
    "polygon": [[0,0],[1,0],[0,1]]})"); }).field == "height");
  REQUIRE_THROWS_AS(parse_spec("/nonexistent/spec.json"), IoError);
}

TEST_CASE("JSON round trip", "[io]") {
  Corpus c = make_corpus(61, 5, 3);
  for (const auto& nf : c.polyhedral) {
    SpecObject back = parse_spec_text(to_json(nf.f).dump());
    const auto& g = std::get<PolyhedralLogConcave>(back);
    REQUIRE(g.pieces().size() == nf.f.pieces().size());
    REQUIRE(mass(g) == Approx(mass(nf.f)).epsilon(1e-14));
    REQUIRE(digest_of(back) == digest_of(SpecObject(nf.f)));
    SpecObject pb = parse_spec_text(to_json(extract_pair(nf.f)).dump());
    REQUIRE(quermassintegral_W1(std::get<SurfaceAreaPair>(pb)) == Approx(quermassintegral_W1(extract_pair(nf.f))).epsilon(1e-14));
  }
  for (const auto& nf : c.radial) {
    SpecObject back = parse_spec_text(to_json(nf.f).dump());
    REQUIRE(digest_of(back) == digest_of(SpecObject(nf.f)));
    SpecObject pb = parse_spec_text(to_json(extract_radial_pair(nf.f)).dump());
    REQUIRE(quermassintegral_W1(std::get<RadialPair>(pb)) ==
            Approx(quermassintegral_W1(extract_radial_pair(nf.f))).epsilon(1e-14));
  }
  // No "-0" in the output.
  std::string sq = to_json(PolyhedralLogConcave::indicator(box(-1, -1, 1, 1))).dump();
  REQUIRE(sq.find("-0.0") == std::string::npos);
}

TEST_CASE("CSV output", "[io]") {
  SymmetrizationConfig cfg;
  cfg.track_omega = false;
  auto tr = iterate_symmetrization(square_indicator(), SymmetrizationSchedule::golden(3), 3, cfg);
  std::string a = symmetrization_csv(tr), b = symmetrization_csv(
      iterate_symmetrization(square_indicator(), SymmetrizationSchedule::golden(3), 3, cfg));
  REQUIRE(a == b);
  REQUIRE(a.rfind("step,angle,W1,J,entropy,omega,cosmic,status\n", 0) == 0);
  REQUIRE(count(a, "\n") == 5);
  REQUIRE(a.find("nan") == std::string::npos);
  REQUIRE(a.find("inf") == std::string::npos);

  SymmetrizationTrace broken = tr;
  broken.complete = false;
  broken.failure = "NoConvergence: residual 1e-3, stalled";
  REQUIRE(symmetrization_csv(broken).find(",\"error: NoConvergence: residual 1e-3, stalled\"\n") != std::string::npos);

  InequalityReport r;
  r.name = "petty", r.instance = "a,b", r.lhs = 1.0, r.rhs = 0.5, r.margin = 0.5, r.tolerance = 1e-8, r.seconds = 0.25;
  std::string rc = report_csv({r});
  REQUIRE(rc == "name,instance,lhs,rhs,margin,equality,seconds,status\npetty,\"a,b\",1,0.5,0.5,0,0,pass\n");
  REQUIRE(report_csv({r}, true).find(",0.25,pass") != std::string::npos);
  r.margin = std::nan("");
  REQUIRE_THROWS_AS(report_csv({r}), IoError);

  SolveTrace st;
  st.iterates.push_back({0, 0.1, 1.0});
  REQUIRE(solve_trace_csv(st) == "iteration,residual,step\n0,0.10000000000000001,1\n");
}

TEST_CASE("SVG output", "[io]") {
  std::string e = SvgCanvas().str();
  REQUIRE(e.rfind("<?xml", 0) == 0);
  REQUIRE(count(e, "<svg ") == 1);
  REQUIRE(e.find("/>\n") != std::string::npos);
  REQUIRE(e.find(tool_version()) != std::string::npos);

  SvgCanvas c;
  c.add_polygon(box(-1, -1, 1, 1));
  c.add_polygon(projection_body(square_indicator()), "#aa0000");
  c.add_level_sets(LogConcave(linf_function()));
  std::string s = c.str();
  REQUIRE(count(s, "<polygon ") == 11);
  REQUIRE(s == c.str());
  REQUIRE(count(s, "</svg>") == 1);

  SymmetrizationConfig cfg;
  cfg.track_omega = false;
  auto tr = iterate_symmetrization(square_indicator(), SymmetrizationSchedule::golden(2), 2, cfg);
  std::string chart = trace_chart_svg(tr);
  REQUIRE(count(chart, "<polyline ") == 3);  // ω column is zero when untracked
  REQUIRE(chart.find(">W1<") != std::string::npos);
}

TEST_CASE("manifest and files", "[io]") {
  RunManifest m;
  m.command = "sum";
  m.inputs = {{"a.json", "abc"}};
  m.outputs = {"out.json"};
  json j = m.to_json();
  REQUIRE(j["command"] == "sum");
  REQUIRE(j["inputs"][0]["digest"] == "abc");
  REQUIRE(j["version"] == tool_version());
  REQUIRE(!j.contains("error"));
  m.error = "x";
  REQUIRE(m.to_json()["error"] == "x");

  auto dir = std::filesystem::temp_directory_path() / "blaschke_lab_io_test";
  std::filesystem::create_directories(dir);
  std::string path = (dir / "t.json").string();
  write_text(path, to_json(square_indicator()).dump(2));
  REQUIRE(mass(as_function(parse_spec(path))) == Approx(4.0));
  std::filesystem::remove_all(dir);
  REQUIRE_THROWS_AS(write_text("/nonexistent/dir/x.csv", "x"), IoError);
}
