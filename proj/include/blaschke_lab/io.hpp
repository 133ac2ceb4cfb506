#ifndef BLASCHKE_LAB_IO_HPP
#define BLASCHKE_LAB_IO_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "blaschke.hpp"
#include "digest.hpp"
#include "inequalities.hpp"

#ifndef BLASCHKE_LAB_VERSION
#define BLASCHKE_LAB_VERSION "0.1.0"
#endif

namespace blaschke_lab {

using json = nlohmann::json;

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line) : Error("ParseError: line " + std::to_string(line) + ": " + what), line(line) {}
  int line;
};

class ValidationError : public Error {
 public:
  ValidationError(const std::string& field, const std::string& what)
      : Error("ValidationError: " + field + ": " + what), field(field) {}
  std::string field;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("IoError: " + what) {}
};

inline std::string tool_version() { return BLASCHKE_LAB_VERSION; }

// ---------------------------------------------------------------------------
// Files

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(end), '\n'));
    throw ParseError(e.what(), line);
  }
}

// ---------------------------------------------------------------------------
// JSON readers

namespace detail {

inline const json& field(const json& j, const std::string& key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(key, "missing");
  return j.at(key);
}

inline double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ValidationError(what, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw ValidationError(what, "not finite");
  return v;
}

/// List of fixed-length numeric rows.
inline std::vector<std::vector<double>> rows(const json& j, const std::string& what, std::size_t width) {
  if (!j.is_array()) throw ValidationError(what, "expected a list");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string at = what + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != width)
      throw ValidationError(at, "expected " + std::to_string(width) + " numbers");
    std::vector<double> r;
    for (std::size_t k = 0; k < width; ++k) r.push_back(number(j[i][k], at));
    out.push_back(std::move(r));
  }
  return out;
}

/// Library errors from a constructor become ValidationError on the offending field.
template <class F>
auto validated(const std::string& what, F&& make) {
  try {
    return make();
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(what, e.what());
  }
}

inline Polygon polygon_from(const json& j, const std::string& what) {
  double tol = 1e-10;
  const json* verts = &j;
  if (j.is_object()) {
    verts = &field(j, "vertices");
    if (j.contains("tolerance")) tol = number(j.at("tolerance"), "tolerance");
  }
  std::vector<Vec2> v;
  for (const auto& r : rows(*verts, what, 2)) v.push_back({r[0], r[1]});
  return validated(what, [&] { return Polygon(v, tol); });
}

inline std::vector<Halfplane> domain_from(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "unbounded") throw ValidationError("domain", "expected \"unbounded\" or a list");
    return {};
  }
  if (!j.is_array()) throw ValidationError("domain", "expected \"unbounded\" or a list");
  // [[x, y], ...] is a polygon; [[nx, ny, d], ...] are halfplanes ⟨n, x⟩ ≤ d.
  if (!j.empty() && j[0].is_array() && j[0].size() == 2) {
    Polygon K = polygon_from(j, "domain");
    std::vector<Halfplane> hs;
    for (std::size_t i = 0; i < K.size(); ++i) hs.push_back({K.normal(i), dot(K.normal(i), K.vertex(i))});
    return hs;
  }
  std::vector<Halfplane> hs;
  for (const auto& r : rows(j, "domain", 3)) {
    Vec2 n{r[0], r[1]};
    double len = norm(n);
    if (!(len > 0.0)) throw ValidationError("domain", "zero normal");
    hs.push_back({n / len, r[2] / len});
  }
  return hs;
}

} // namespace detail

/// A parsed document: a function, a body or a pair.
using SpecObject = std::variant<PolyhedralLogConcave, RadialLogConcave, Polygon, SurfaceAreaPair, RadialPair>;

inline SurfaceAreaPair pair_from_json(const json& j) {
  SurfaceAreaPair p;
  p.dim = j.contains("dim") ? static_cast<int>(detail::number(j.at("dim"), "dim")) : 2;
  if (p.dim != 2) throw ValidationError("dim", "atomic pairs are planar");
  for (const auto& r : detail::rows(detail::field(j, "mu"), "mu", 3)) p.mu.push_back({{r[0], r[1]}, r[2]});
  if (j.contains("nu"))
    for (const auto& r : detail::rows(j.at("nu"), "nu", 3)) p.nu.push_back({{r[0], r[1]}, r[2]});
  for (const auto& a : p.mu)
    if (!(a.a > 0.0)) throw ValidationError("mu", "masses must be positive");
  for (const auto& b : p.nu) {
    if (!(b.b > 0.0)) throw ValidationError("nu", "masses must be positive");
    if (!(norm(b.theta) > 0.0)) throw ValidationError("nu", "zero direction");
  }
  for (auto& b : p.nu) b.theta = normalized(b.theta);
  AdmissibilityReport rep = admissible(p);
  if (!rep.ok()) throw ValidationError(rep.centered ? "mu" : "centering", rep.describe());
  return p;
}

inline RadialPair radial_pair_from_json(const json& j) {
  RadialPair p;
  p.dim = static_cast<int>(detail::number(detail::field(j, "dim"), "dim"));
  if (p.dim < 1) throw ValidationError("dim", "must be at least 1");
  for (const auto& r : detail::rows(detail::field(j, "grad"), "grad", 2)) {
    if (!(r[0] >= 0.0)) throw ValidationError("grad", "radii must be nonnegative");
    if (!(r[1] > 0.0)) throw ValidationError("grad", "masses must be positive");
    p.grad.push_back({r[0], r[1]});
  }
  p.boundary = j.contains("boundary") ? detail::number(j.at("boundary"), "boundary") : 0.0;
  if (p.boundary < 0.0) throw ValidationError("boundary", "must be nonnegative");
  if (p.grad.empty()) throw ValidationError("grad", "mu is zero");
  return p;
}

inline SpecObject spec_from_json(const json& j) {
  if (j.is_array()) return detail::polygon_from(j, "vertices");
  if (!j.is_object()) throw ValidationError("document", "expected an object or a vertex list");
  if (!j.contains("kind")) {
    if (j.contains("mu")) return pair_from_json(j);
    if (j.contains("grad")) return radial_pair_from_json(j);
    if (j.contains("vertices")) return detail::polygon_from(j, "vertices");
    throw ValidationError("kind", "missing");
  }
  std::string kind = detail::field(j, "kind").is_string() ? j.at("kind").get<std::string>() : "";
  if (kind == "indicator") {
    Polygon K = detail::polygon_from(detail::field(j, "polygon"), "polygon");
    double height = j.contains("height") ? detail::number(j.at("height"), "height") : 1.0;
    if (!(height > 0.0)) throw ValidationError("height", "must be positive");
    return PolyhedralLogConcave::indicator(K, height);
  }
  if (kind == "polyhedral") {
    std::vector<Piece> pieces;
    for (const auto& r : detail::rows(detail::field(j, "pieces"), "pieces", 3)) pieces.push_back({{r[0], r[1]}, r[2]});
    auto hs = detail::domain_from(j.contains("domain") ? j.at("domain") : json("unbounded"));
    return detail::validated("pieces", [&] { return PolyhedralLogConcave(pieces, hs); });
  }
  if (kind == "radial") {
    int dim = static_cast<int>(detail::number(detail::field(j, "dim"), "dim"));
    std::vector<std::pair<double, double>> knots;
    for (const auto& r : detail::rows(detail::field(j, "knots"), "knots", 2)) knots.push_back({r[0], r[1]});
    std::optional<double> tail;
    if (j.contains("tail_slope") && !j.at("tail_slope").is_null()) tail = detail::number(j.at("tail_slope"), "tail_slope");
    return detail::validated("knots", [&] { return RadialLogConcave(dim, knots, tail); });
  }
  if (kind == "polygon") return detail::polygon_from(j, "vertices");
  if (kind == "pair") return pair_from_json(j);
  if (kind == "radial_pair") return radial_pair_from_json(j);
  throw ValidationError("kind", "unknown kind '" + kind + "'");
}

inline SpecObject parse_spec_text(const std::string& text) { return spec_from_json(parse_json(text)); }
inline SpecObject parse_spec(const std::string& path) { return parse_spec_text(read_text(path)); }

/// The function a spec describes; bodies read as their indicators.
inline LogConcave as_function(const SpecObject& s) {
  if (const auto* f = std::get_if<PolyhedralLogConcave>(&s)) return *f;
  if (const auto* f = std::get_if<RadialLogConcave>(&s)) return *f;
  if (const auto* K = std::get_if<Polygon>(&s)) return PolyhedralLogConcave::indicator(*K);
  throw ValidationError("kind", "expected a function or a body, got a pair");
}

// ---------------------------------------------------------------------------
// JSON writers. Signed zeros are written as 0.

namespace detail {
inline double z(double v) { return v == 0.0 ? 0.0 : v; }
} // namespace detail

inline json to_json(const Polygon& K) {
  json v = json::array();
  for (Vec2 p : K.vertices()) v.push_back({detail::z(p.x), detail::z(p.y)});
  return {{"kind", "polygon"}, {"vertices", v}};
}

inline json to_json(const PolyhedralLogConcave& f) {
  json pieces = json::array(), dom = json::array();
  for (const auto& p : f.pieces()) pieces.push_back({detail::z(p.z.x), detail::z(p.z.y), detail::z(p.c)});
  for (const auto& h : f.domain()) dom.push_back({detail::z(h.normal.x), detail::z(h.normal.y), detail::z(h.offset)});
  json j = {{"kind", "polyhedral"}, {"pieces", pieces}};
  if (f.domain().empty()) j["domain"] = "unbounded";
  else j["domain"] = dom;
  return j;
}

inline json to_json(const RadialLogConcave& f) {
  json kn = json::array();
  for (const auto& [r, w] : f.knots()) kn.push_back({detail::z(r), detail::z(w)});
  json j = {{"kind", "radial"}, {"dim", f.dim()}, {"knots", kn}};
  if (f.tail_slope()) j["tail_slope"] = *f.tail_slope();
  else j["tail_slope"] = nullptr;
  return j;
}

inline json to_json(const SurfaceAreaPair& p) {
  json mu = json::array(), nu = json::array();
  for (const auto& a : p.mu) mu.push_back({detail::z(a.z.x), detail::z(a.z.y), a.a});
  for (const auto& b : p.nu) nu.push_back({detail::z(b.theta.x), detail::z(b.theta.y), b.b});
  return {{"dim", p.dim}, {"mu", mu}, {"nu", nu}};
}

inline json to_json(const RadialPair& p) {
  json g = json::array();
  for (const auto& a : p.grad) g.push_back({a.g, a.a});
  return {{"dim", p.dim}, {"grad", g}, {"boundary", p.boundary}};
}

inline json to_json(const LogConcave& f) {
  return std::visit([](const auto& g) { return to_json(g); }, f);
}

inline json to_json(const SpecObject& s) {
  return std::visit([](const auto& g) { return to_json(g); }, s);
}

inline std::string digest_of(const SpecObject& s) {
  Digest d;
  std::visit([&](const auto& g) { d.add(g); }, s);
  return d.hex();
}

// ---------------------------------------------------------------------------
// CSV. Numbers are written with 17 significant digits; a non-finite value never reaches a cell.

namespace detail {

inline std::string csv_number(double v) {
  if (!std::isfinite(v)) throw IoError("non-finite value in CSV output");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c == '\n' || c == '\r' ? ' ' : c;
  }
  return q + "\"";
}

} // namespace detail

inline std::string solve_trace_csv(const SolveTrace& t) {
  std::string s = "iteration,residual,step\n";
  for (const auto& it : t.iterates)
    s += std::to_string(it.iteration) + "," + detail::csv_number(it.residual) + "," + detail::csv_number(it.step) + "\n";
  return s;
}

/// One row per step; an aborted run ends with a status row carrying the error.
inline std::string symmetrization_csv(const SymmetrizationTrace& t) {
  std::string s = "step,angle,W1,J,entropy,omega,cosmic,status\n";
  for (const auto& r : t.records) {
    s += std::to_string(r.step) + "," + detail::csv_number(r.angle) + "," + detail::csv_number(r.W1) + "," +
         detail::csv_number(r.J) + "," + detail::csv_number(r.entropy) + "," + detail::csv_number(r.omega) + "," +
         detail::csv_number(r.cosmic) + ",ok\n";
  }
  if (!t.complete) s += std::to_string(t.records.size()) + ",0,0,0,0,0,0," + detail::csv_text("error: " + t.failure) + "\n";
  return s;
}

/// Wall times make the file differ between runs, so they are written only on request; the
/// column stays (as 0) to keep the layout fixed.
inline std::string report_csv(const std::vector<InequalityReport>& reports, bool timings = false) {
  std::string s = "name,instance,lhs,rhs,margin,equality,seconds,status\n";
  for (const auto& r : reports) {
    std::string status = !r.error.empty() ? "error: " + r.error : r.passed() ? "pass" : "fail";
    s += detail::csv_text(r.name) + "," + detail::csv_text(r.instance) + "," + detail::csv_number(r.lhs) + "," +
         detail::csv_number(r.rhs) + "," + detail::csv_number(r.margin) + "," + (r.equality_witness ? "1" : "0") + "," +
         detail::csv_number(timings ? r.seconds : 0.0) + "," + detail::csv_text(status) + "\n";
  }
  return s;
}

// ---------------------------------------------------------------------------
// SVG

/// Accumulates planar objects in world coordinates and writes a standalone SVG fitted to them.
class SvgCanvas {
 public:
  void add_polygon(const Polygon& K, const std::string& stroke = "#1f4e79", const std::string& fill = "none") {
    std::vector<Vec2> v(K.vertices().begin(), K.vertices().end());
    shapes_.push_back({std::move(v), stroke, fill, true});
  }

  /// Superlevel sets {f ≥ t·max f} on the fixed grid t = 0.1, ..., 0.9.
  void add_level_sets(const LogConcave& f, const std::string& stroke = "#8a3b12") {
    double fmax = std::visit([](const auto& g) { return g.max_value(); }, f);
    for (int k = 1; k <= 9; ++k) {
      double t = 0.1 * k;
      try {
        add_polygon(superlevel(f, t * fmax), stroke);
      } catch (const EmptyLevel&) {
      }
    }
  }

  void add_polyline(std::vector<Vec2> pts, const std::string& stroke) {
    shapes_.push_back({std::move(pts), stroke, "none", false});
  }

  bool empty() const { return shapes_.empty(); }

  std::string str(double size = 480.0) const {
    std::string head = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<!-- blaschke_lab " + tool_version() + " -->\n";
    if (shapes_.empty())
      return head + "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1\" height=\"1\" viewBox=\"0 0 1 1\"/>\n";
    double x0 = inf, y0 = inf, x1 = -inf, y1 = -inf;
    for (const auto& s : shapes_)
      for (Vec2 p : s.pts) {
        x0 = std::min(x0, p.x), x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
      }
    double span = std::max({x1 - x0, y1 - y0, 1e-12}), pad = 0.05 * span;
    double k = size / (span + 2 * pad);
    auto X = [&](double x) { return fmt((x - x0 + pad) * k); };
    auto Y = [&](double y) { return fmt((y1 - y + pad) * k); };  // y axis up
    double w = (x1 - x0 + 2 * pad) * k, h = (y1 - y0 + 2 * pad) * k;
    std::string s = head + "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(w) + "\" height=\"" + fmt(h) +
                    "\" viewBox=\"0 0 " + fmt(w) + " " + fmt(h) + "\">\n";
    for (const auto& sh : shapes_) {
      s += sh.closed ? "  <polygon points=\"" : "  <polyline points=\"";
      for (std::size_t i = 0; i < sh.pts.size(); ++i) s += (i ? " " : "") + X(sh.pts[i].x) + "," + Y(sh.pts[i].y);
      s += "\" fill=\"" + sh.fill + "\" stroke=\"" + sh.stroke + "\" stroke-width=\"1\"/>\n";
    }
    return s + "</svg>\n";
  }

 private:
  struct Shape {
    std::vector<Vec2> pts;
    std::string stroke, fill;
    bool closed;
  };
  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
  }
  std::vector<Shape> shapes_;
};

/// Line chart of the trace columns, each divided by its first value (flat lines for W₁ and J).
inline std::string trace_chart_svg(const SymmetrizationTrace& t) {
  if (t.records.empty()) return SvgCanvas().str();
  const double W = 640, H = 360, m = 40;
  struct Column {
    const char* name;
    const char* color;
    double (*get)(const SymmetrizationRecord&);
  };
  const Column cols[] = {{"W1", "#1f4e79", [](const SymmetrizationRecord& r) { return r.W1; }},
                         {"J", "#2e7d32", [](const SymmetrizationRecord& r) { return r.J; }},
                         {"omega", "#8a3b12", [](const SymmetrizationRecord& r) { return r.omega; }},
                         {"cosmic", "#6a1b9a", [](const SymmetrizationRecord& r) { return r.cosmic; }}};
  double ymax = 1.0;
  for (const auto& c : cols)
    for (const auto& r : t.records) {
      double v0 = c.get(t.records.front());
      if (v0 != 0.0) ymax = std::max(ymax, c.get(r) / v0);
    }
  std::size_t n = t.records.size();
  auto px = [&](std::size_t i) { return m + (W - 2 * m) * (n > 1 ? static_cast<double>(i) / (n - 1) : 0.0); };
  auto py = [&](double v) { return H - m - (H - 2 * m) * v / ymax; };
  char buf[160];
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<!-- blaschke_lab " + tool_version() + " -->\n";
  std::snprintf(buf, sizeof buf, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n", W, H, W, H);
  s += buf;
  std::snprintf(buf, sizeof buf, "  <line x1=\"%.0f\" y1=\"%.0f\" x2=\"%.0f\" y2=\"%.0f\" stroke=\"#444\"/>\n", m, H - m, W - m, H - m);
  s += buf;
  std::snprintf(buf, sizeof buf, "  <line x1=\"%.0f\" y1=\"%.0f\" x2=\"%.0f\" y2=\"%.0f\" stroke=\"#444\"/>\n", m, m, m, H - m);
  s += buf;
  int row = 0;
  for (const auto& c : cols) {
    double v0 = c.get(t.records.front());
    if (v0 == 0.0) continue;
    s += std::string("  <polyline fill=\"none\" stroke=\"") + c.color + "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", i ? " " : "", px(i), py(c.get(t.records[i]) / v0));
      s += buf;
    }
    s += "\"/>\n";
    std::snprintf(buf, sizeof buf, "  <text x=\"%.0f\" y=\"%.0f\" font-size=\"12\" fill=\"%s\">%s</text>\n", W - m - 60,
                  m + 14.0 * row++, c.color, c.name);
    s += buf;
  }
  return s + "</svg>\n";
}

// ---------------------------------------------------------------------------
// Manifest

struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> inputs;  // (path, digest)
  json config = json::object();
  std::string version = tool_version();
  double seconds = 0.0;
  std::vector<std::string> outputs;
  int exit_code = 0;
  std::string error;

  json to_json() const {
    json in = json::array();
    for (const auto& [p, d] : inputs) in.push_back({{"path", p}, {"digest", d}});
    json j = {{"command", command}, {"inputs", in},   {"config", config},   {"version", version},
              {"seconds", seconds}, {"outputs", outputs}, {"exit_code", exit_code}};
    if (!error.empty()) j["error"] = error;
    return j;
  }
};

} // namespace blaschke_lab

#endif
