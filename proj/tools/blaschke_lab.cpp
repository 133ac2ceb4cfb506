// blaschke_lab command line front end. Every run prints a JSON manifest on stdout; failures
// print a JSON error object on stderr and exit with 2 (validation), 3 (solver) or 4 (optimizer
// stall, best-so-far still written). A verify run with failing rows exits with 1.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <blaschke_lab/io.hpp>

namespace bl = blaschke_lab;
using bl::json;

namespace {

struct Options {
  // solver
  double tol = 1e-8;
  int max_iter = 200;
  std::string jacobian = "analytic";
  // optimizer
  int grid = 180;
  // experiments
  std::string schedule = "golden";
  int steps = 24;
  std::string t_grid = "0.1..0.9";
  std::uint64_t seed = 20240611;
  int jobs = 1;
  // outputs
  std::string out;
  std::string svg;
  // operation parameters
  double lambda = 1.0;
  double angle = 0.0;
  std::string suite = "all";
  std::string corpus;
  std::string report;
  bool timings = false;
  bool no_omega = false;
  std::vector<std::string> inputs;
};

class StallExit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class VerifyFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bl::SolverConfig solver_config(const Options& o) {
  bl::SolverConfig c;
  c.residual_tol = o.tol;
  c.max_iterations = o.max_iter;
  if (o.jacobian == "fd") c.jacobian = bl::SolverConfig::Jacobian::finite_difference;
  else if (o.jacobian != "analytic") throw bl::ValidationError("--jacobian", "expected analytic or fd");
  c.validate();
  return c;
}

bl::OmegaConfig omega_config(const Options& o) {
  if (o.grid < 8) throw bl::ValidationError("--grid", "needs at least 8 directions");
  bl::OmegaConfig c;
  c.grid = o.grid;
  return c;
}

/// "a..b" (step 0.1), "a..b:h", or a comma list; every t must lie in (0, 1).
std::vector<double> parse_t_grid(const std::string& s) {
  std::vector<double> ts;
  try {
    auto dots = s.find("..");
    if (dots != std::string::npos) {
      double a = std::stod(s.substr(0, dots)), h = 0.1, b;
      std::string rest = s.substr(dots + 2);
      auto colon = rest.find(':');
      if (colon != std::string::npos) {
        h = std::stod(rest.substr(colon + 1));
        rest = rest.substr(0, colon);
      }
      b = std::stod(rest);
      if (!(h > 0.0)) throw bl::ValidationError("--t-grid", "step must be positive");
      int n = static_cast<int>(std::floor((b - a) / h + 1e-9));
      for (int k = 0; k <= n; ++k) ts.push_back(a + k * h);
    } else {
      std::stringstream ss(s);
      std::string item;
      while (std::getline(ss, item, ',')) ts.push_back(std::stod(item));
    }
  } catch (const std::logic_error&) {
    throw bl::ValidationError("--t-grid", "cannot parse '" + s + "'");
  }
  if (ts.empty()) throw bl::ValidationError("--t-grid", "empty grid");
  for (double t : ts)
    if (!(t > 0.0 && t < 1.0)) throw bl::ValidationError("--t-grid", "values must lie in (0, 1)");
  return ts;
}

bl::SymmetrizationSchedule parse_schedule(const std::string& s, int steps) {
  if (s == "golden") return bl::SymmetrizationSchedule::golden(steps);
  if (s.rfind("list:", 0) == 0) {
    std::vector<double> angles;
    std::stringstream ss(s.substr(5));
    std::string item;
    try {
      while (std::getline(ss, item, ',')) angles.push_back(std::stod(item));
    } catch (const std::logic_error&) {
      throw bl::ValidationError("--schedule", "cannot parse '" + s + "'");
    }
    if (angles.empty()) throw bl::ValidationError("--schedule", "empty list");
    return bl::SymmetrizationSchedule::from_list(angles);
  }
  throw bl::ValidationError("--schedule", "expected golden or list:a,b,...");
}

struct Run {
  bl::RunManifest manifest;
  Options opt;

  bl::SpecObject load(const std::string& path) {
    bl::SpecObject s = bl::parse_spec(path);
    manifest.inputs.push_back({path, bl::digest_of(s)});
    return s;
  }
  bl::LogConcave load_function(const std::string& path) { return bl::as_function(load(path)); }

  void write(const std::string& path, const std::string& text) {
    bl::write_text(path, text);
    manifest.outputs.push_back(path);
  }
  /// JSON result to -o, or embedded in the manifest when no path is given.
  void emit(const json& j) {
    if (opt.out.empty()) manifest.config["result"] = j;
    else write(opt.out, j.dump(2) + "\n");
  }
  void svg_of(const std::vector<bl::Polygon>& bodies, const bl::LogConcave* f) {
    if (opt.svg.empty()) return;
    bl::SvgCanvas c;
    if (f) c.add_level_sets(*f);
    const char* colors[] = {"#1f4e79", "#2e7d32", "#6a1b9a"};
    for (std::size_t i = 0; i < bodies.size(); ++i) c.add_polygon(bodies[i], colors[i % 3]);
    write(opt.svg, c.str());
  }
};

json function_summary(const bl::LogConcave& f) {
  json j;
  j["mass"] = bl::mass(f);
  j["entropy"] = bl::entropy(f);
  std::visit(
      [&](const auto& g) {
        auto p = bl::pair_of(g);
        j["W1"] = bl::quermassintegral_W1(p);
        j["W1_layercake"] = bl::quermassintegral_layercake(g);
        j["affine_isoperimetric_bound"] = bl::affine_isoperimetric_bound(p);
        j["pair"] = bl::to_json(p);
        try {
          auto e = bl::entropy_identity_check(g);
          j["delta_ff"] = e.delta;
          j["delta_ff_identity_rhs"] = e.rhs;
        } catch (const bl::UnboundedSupportTerm&) {
          j["delta_ff"] = nullptr;
        }
      },
      f);
  return j;
}

void check_omega(const bl::OmegaResult& r, const char* what) {
  if (r.stalled) throw StallExit(std::string(what) + ": optimizer did not converge; best value emitted");
}

void run_command(const std::string& cmd, Run& run) {
  Options& o = run.opt;
  bl::SolverConfig scfg = solver_config(o);
  auto need = [&](std::size_t n) {
    if (o.inputs.size() != n)
      throw bl::ValidationError("inputs", cmd + " takes " + std::to_string(n) + " spec file(s)");
  };

  if (cmd == "compute") {
    need(1);
    bl::SpecObject s = run.load(o.inputs[0]);
    json j;
    if (const auto* p = std::get_if<bl::SurfaceAreaPair>(&s)) {
      auto sol = bl::solve(*p, scfg);
      j = function_summary(sol.function);
      j["function"] = bl::to_json(sol.function);
      if (!o.out.empty()) run.write(o.out + ".trace.csv", bl::solve_trace_csv(sol.trace));
      run.svg_of({}, nullptr);
    } else if (const auto* p = std::get_if<bl::RadialPair>(&s)) {
      auto sol = bl::solve(*p, scfg);
      j = function_summary(sol.function);
      j["function"] = bl::to_json(sol.function);
    } else {
      bl::LogConcave f = bl::as_function(s);
      j = function_summary(f);
      run.svg_of({}, &f);
    }
    run.emit(j);
  } else if (cmd == "sum") {
    need(2);
    bl::LogConcave f = bl::blaschke_sum(run.load_function(o.inputs[0]), run.load_function(o.inputs[1]), scfg);
    run.emit(bl::to_json(f));
    run.svg_of({}, &f);
  } else if (cmd == "homothety") {
    need(1);
    if (!(o.lambda > 0.0)) throw bl::ValidationError("--lambda", "must be positive");
    bl::LogConcave f = bl::blaschke_homothety(o.lambda, run.load_function(o.inputs[0]), scfg);
    run.emit(bl::to_json(f));
    run.svg_of({}, &f);
  } else if (cmd == "symmetral") {
    need(1);
    bl::LogConcave f = bl::blaschke_symmetral(bl::unit(o.angle), run.load_function(o.inputs[0]), scfg);
    run.emit(bl::to_json(f));
    run.svg_of({}, &f);
  } else if (cmd == "mean-symmetral") {
    need(1);
    bl::LogConcave f = bl::mean_blaschke_symmetral(run.load_function(o.inputs[0]), scfg).function;
    run.emit(bl::to_json(f));
    run.svg_of({}, &f);
  } else if (cmd == "iterate") {
    need(1);
    bl::LogConcave f = run.load_function(o.inputs[0]);
    const auto* poly = std::get_if<bl::PolyhedralLogConcave>(&f);
    if (!poly) throw bl::ValidationError("kind", "iterate needs a polyhedral function (radial ones are fixed points)");
    if (o.steps < 0) throw bl::ValidationError("--steps", "must be nonnegative");
    bl::SymmetrizationConfig cfg;
    cfg.solver = scfg;
    cfg.omega = omega_config(o);
    cfg.track_omega = !o.no_omega;
    auto tr = bl::iterate_symmetrization(*poly, parse_schedule(o.schedule, o.steps), o.steps, cfg);
    std::string csv = bl::symmetrization_csv(tr);
    if (o.out.empty()) run.manifest.config["result"] = csv;
    else run.write(o.out, csv);
    if (!o.svg.empty()) run.write(o.svg, bl::trace_chart_svg(tr));
    if (!tr.complete) throw bl::NoConvergence(tr.failure, {});
  } else if (cmd == "projbody" || cmd == "lyz") {
    need(1);
    bl::LogConcave f = run.load_function(o.inputs[0]);
    bl::Polygon K = std::visit(
        [&](const auto& g) { return cmd == "projbody" ? bl::projection_body(g) : bl::lyz_body(g); }, f);
    json j = bl::to_json(K);
    j["area"] = bl::area(K);
    if (cmd == "projbody") j["polar_projection_mass"] = bl::polar_projection_mass(K);
    run.emit(j);
    run.svg_of({K}, &f);
  } else if (cmd == "asa" || cmd == "geominimal") {
    need(1);
    bl::LogConcave f = run.load_function(o.inputs[0]);
    bl::OmegaConfig ocfg = omega_config(o);
    bl::OmegaResult r = std::visit(
        [&](const auto& g) {
          return cmd == "asa" ? bl::affine_surface_area(g, ocfg) : bl::geominimal_surface_area(g, ocfg);
        },
        f);
    double bound = std::visit([](const auto& g) { return bl::affine_isoperimetric_bound(bl::pair_of(g)); }, f);
    json j = {{cmd == "asa" ? "omega_sharp_upper_bound" : "geominimal_upper_bound", r.value},
              {"inf_omega_Q", r.inf_omega},
              {"affine_isoperimetric_bound", bound},
              {"iterations", r.iterations},
              {"stalled", r.stalled}};
    run.emit(j);
    check_omega(r, cmd.c_str());
  } else if (cmd == "verify") {
    bl::SuiteConfig cfg;
    cfg.seed = o.seed;
    cfg.t_grid = parse_t_grid(o.t_grid);
    cfg.solver = scfg;
    cfg.omega = omega_config(o);
    if (o.suite != "all") {
      const auto& names = bl::suite_names();
      if (std::find(names.begin(), names.end(), o.suite) == names.end())
        throw bl::ValidationError("--suite", "unknown suite '" + o.suite + "'");
      cfg.only = {o.suite};
    }
    bl::Corpus corpus;
    if (o.corpus.empty()) {
      corpus = bl::make_corpus(o.seed, 12, 4);
    } else {
      std::vector<std::filesystem::path> files;
      std::error_code ec;
      for (const auto& e : std::filesystem::directory_iterator(o.corpus, ec))
        if (e.path().extension() == ".json") files.push_back(e.path());
      if (ec) throw bl::IoError("cannot list " + o.corpus);
      std::sort(files.begin(), files.end());
      for (const auto& p : files) {
        bl::LogConcave f = run.load_function(p.string());
        std::string name = p.stem().string();
        if (auto* g = std::get_if<bl::PolyhedralLogConcave>(&f)) corpus.polyhedral.push_back({name, *g});
        else corpus.radial.push_back({name, std::get<bl::RadialLogConcave>(f)});
      }
      if (corpus.polyhedral.empty() && corpus.radial.empty()) throw bl::ValidationError("--corpus", "no .json specs");
    }
    auto reports = bl::run_inequality_suite(corpus, cfg);
    std::string path = !o.report.empty() ? o.report : o.out;
    std::string csv = bl::report_csv(reports, o.timings);
    if (path.empty()) std::cout << csv;
    else run.write(path, csv);
    int failed = 0;
    for (const auto& r : reports) failed += !r.passed();
    run.manifest.config["rows"] = reports.size();
    run.manifest.config["failed"] = failed;
    if (failed) throw VerifyFailed(std::to_string(failed) + " report rows failed");
  } else {
    throw bl::ValidationError("command", "unknown command '" + cmd + "'");
  }
}

int error_exit(Run& run, int code, const std::string& kind, const std::string& what) {
  json e = {{"error", kind}, {"message", what}, {"exit_code", code}};
  std::cerr << e.dump() << "\n";
  run.manifest.exit_code = code;
  run.manifest.error = what;
  return code;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blaschke calculus on log-concave functions"};
  app.require_subcommand(1);
  Run run;
  Options& o = run.opt;

  struct Cmd {
    const char* name;
    const char* help;
  };
  const Cmd cmds[] = {{"compute", "mass, entropy, W1 and pair of a function (or solve a pair file)"},
                      {"sum", "Blaschke sum of two functions"},
                      {"homothety", "Blaschke homothety lambda.f"},
                      {"symmetral", "Blaschke symmetral in the direction of --angle"},
                      {"mean-symmetral", "mean Blaschke symmetral (rotation average)"},
                      {"iterate", "iterated symmetrals, trace CSV"},
                      {"projbody", "projection body"},
                      {"lyz", "LYZ body"},
                      {"asa", "affine surface area (upper bound)"},
                      {"geominimal", "geominimal surface area (upper bound)"},
                      {"verify", "inequality suite, report CSV"}};
  for (const auto& c : cmds) {
    CLI::App* s = app.add_subcommand(c.name, c.help);
    s->add_option("inputs", o.inputs, "spec files (JSON)");
    s->add_option("--tol", o.tol, "solver relative residual tolerance");
    s->add_option("--max-iter", o.max_iter, "solver iteration limit");
    s->add_option("--jacobian", o.jacobian, "analytic or fd");
    s->add_option("--grid", o.grid, "star-body direction grid");
    s->add_option("--schedule", o.schedule, "golden or list:a,b,...");
    s->add_option("--steps", o.steps, "symmetrization steps");
    s->add_option("--t-grid", o.t_grid, "t grid, e.g. 0.1..0.9");
    s->add_option("--seed", o.seed, "corpus / polygon seed (BLASCHKE_LAB_SEED overrides)");
    s->add_option("--jobs", o.jobs, "parallel width cap (runs are sequential)");
    s->add_option("-o,--out", o.out, "output file");
    s->add_option("--svg", o.svg, "SVG figure");
    if (std::string(c.name) == "homothety") s->add_option("--lambda", o.lambda, "factor")->required();
    if (std::string(c.name) == "symmetral") s->add_option("--angle", o.angle, "direction angle (radians)")->required();
    if (std::string(c.name) == "iterate") s->add_flag("--no-omega", o.no_omega, "skip the affine surface area column");
    if (std::string(c.name) == "verify") {
      s->add_option("--suite", o.suite, "all or one suite name");
      s->add_option("--corpus", o.corpus, "directory of JSON specs (default: seeded corpus)");
      s->add_option("--report", o.report, "report CSV (same as -o)");
      s->add_flag("--timings", o.timings, "write wall times into the report");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  if (const char* env = std::getenv("BLASCHKE_LAB_SEED")) {
    try {
      o.seed = std::stoull(env);
    } catch (const std::logic_error&) {
      return error_exit(run, 2, "ValidationError", "BLASCHKE_LAB_SEED is not an integer");
    }
  }
  run.manifest.command = cmd;
  run.manifest.config = {{"tol", o.tol},         {"max_iter", o.max_iter}, {"jacobian", o.jacobian},
                         {"grid", o.grid},       {"schedule", o.schedule}, {"steps", o.steps},
                         {"t_grid", o.t_grid},   {"seed", o.seed},         {"jobs", o.jobs}};
  if (cmd == "homothety") run.manifest.config["lambda"] = o.lambda;
  if (cmd == "symmetral") run.manifest.config["angle"] = o.angle;

  auto t0 = std::chrono::steady_clock::now();
  int rc = 0;
  try {
    run_command(cmd, run);
  } catch (const StallExit& e) {
    rc = error_exit(run, 4, "OptimizerStall", e.what());
  } catch (const VerifyFailed& e) {
    rc = error_exit(run, 1, "VerificationFailed", e.what());
  } catch (const bl::NoConvergence& e) {
    rc = error_exit(run, 3, "NoConvergence", e.what());
  } catch (const bl::IoError& e) {
    rc = error_exit(run, 2, "IoError", e.what());
  } catch (const bl::ParseError& e) {
    rc = error_exit(run, 2, "ParseError", e.what());
  } catch (const bl::Error& e) {
    rc = error_exit(run, 2, "ValidationError", e.what());
  }
  run.manifest.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << run.manifest.to_json().dump(2) << "\n";
  return rc;
}
