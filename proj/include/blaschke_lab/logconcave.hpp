#ifndef BLASCHKE_LAB_LOGCONCAVE_HPP
#define BLASCHKE_LAB_LOGCONCAVE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "convex2d.hpp"
#include "error.hpp"
#include "numeric.hpp"

namespace blaschke_lab {

/// Affine piece x ↦ ⟨z, x⟩ − c of φ.
struct Piece {
  Vec2 z;
  double c = 0.0;
};

inline constexpr int kClipLabel = std::numeric_limits<int>::min();
inline int facet_label(std::size_t j) { return -1 - static_cast<int>(j); }
inline bool is_facet_label(int label) { return label < 0 && label != kClipLabel; }
inline std::size_t facet_index(int label) { return static_cast<std::size_t>(-1 - label); }

struct Cell {
  std::size_t piece = 0;
  Region region;
};

/// Laguerre-type decomposition of the domain. Edge labels: k ≥ 0 borders the cell
/// of piece k, facet_label(j) lies on domain halfplane j, kClipLabel on the clip box.
struct CellComplex {
  std::vector<Cell> cells;
  Region domain;
  double clip_radius = 0.0;
  double tail_bound = 0.0;
  double min_phi = inf;
  Vec2 argmin;
  std::vector<std::size_t> dropped;

  bool clipped() const { return clip_radius > 0.0; }
};

inline double piece_value(const Piece& p, Vec2 x) { return dot(p.z, x) - p.c; }

/// ∫_P e^{−(⟨a,x⟩−c)} dx by fan triangulation from the vertex mean.
inline double integrate_exp_affine(Vec2 a, double c, const Region& P) {
  if (P.size() < 3) return 0.0;
  Vec2 m = vertex_mean(P);
  double lm = c - dot(a, m);
  double s = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    Vec2 p = P.vertex(i), q = P.vertex(i + 1);
    double t = 0.5 * cross(p - m, q - m);
    s += triangle_exp_integral(t, lm, c - dot(a, p), c - dot(a, q));
  }
  return s;
}

inline double integrate_exp_affine(Vec2 a, double c, const Polygon& P) {
  return integrate_exp_affine(a, c, region_of(P, 0));
}

/// ∫_P l e^{l} dx with l = c − ⟨a,x⟩.
inline double integrate_xexp_affine(Vec2 a, double c, const Region& P) {
  if (P.size() < 3) return 0.0;
  Vec2 m = vertex_mean(P);
  double lm = c - dot(a, m);
  double s = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    Vec2 p = P.vertex(i), q = P.vertex(i + 1);
    double t = 0.5 * cross(p - m, q - m);
    s += triangle_xexp_integral(t, lm, c - dot(a, p), c - dot(a, q));
  }
  return s;
}

/// ∫ over edge i of P of e^{−(⟨a,x⟩−c)} dH¹.
inline double integrate_exp_affine_edge(Vec2 a, double c, const Region& P, std::size_t i) {
  Vec2 p = P.vertex(i), q = P.vertex(i + 1);
  return norm(q - p) * exp_dd(c - dot(a, p), c - dot(a, q));
}

inline Region intersect_halfplanes(const Region& start, const std::vector<Halfplane>& hs) {
  Region r = start;
  for (std::size_t j = 0; j < hs.size() && r.size() >= 3; ++j) r = clip(r, hs[j], facet_label(j));
  return r;
}

inline bool touches_clip(const Region& r) {
  return std::any_of(r.labels.begin(), r.labels.end(), [](int l) { return l == kClipLabel; });
}

/// Domain region; the clip box is chosen tight around bounded domains so that
/// vertex coordinates are computed at the domain's own scale.
inline Region domain_region(const std::vector<Halfplane>& hs, double clip_radius) {
  if (clip_radius > 0.0) return intersect_halfplanes(square_region(clip_radius, kClipLabel), hs);
  Region coarse = intersect_halfplanes(square_region(1e9, kClipLabel), hs);
  if (coarse.size() < 3) return Region{};
  double extent = 0.0;
  for (Vec2 p : coarse.vertices) extent = std::max({extent, std::abs(p.x), std::abs(p.y)});
  return intersect_halfplanes(square_region(2.0 * extent + 1.0, kClipLabel), hs);
}

/// Per-piece cells of φ = max(⟨z_i,x⟩ − c_i) over a domain region; empty cells keep an empty region.
inline std::vector<Cell> laguerre_regions(const std::vector<Piece>& pieces, const Region& domain) {
  std::vector<Cell> cells(pieces.size());
  double dom_area = std::abs(area(domain));
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    cells[i].piece = i;
    Region r = domain;
    for (std::size_t k = 0; k < pieces.size() && r.size() >= 3; ++k) {
      if (k == i) continue;
      Vec2 dz = pieces[k].z - pieces[i].z;
      double dc = pieces[k].c - pieces[i].c;
      if (dz.x == 0.0 && dz.y == 0.0) {
        if (dc < 0.0 || (dc == 0.0 && k < i)) r = Region{};
        continue;
      }
      r = clip(r, Halfplane{dz, dc}, static_cast<int>(k));
    }
    if (r.size() >= 3 && area(r) > 1e-14 * dom_area) cells[i].region = std::move(r);
  }
  return cells;
}

/// Positive spanning test: nonzero vectors are not contained in a closed halfplane.
inline bool positively_spanning(const std::vector<Vec2>& vs) {
  std::vector<double> angles;
  double scale = 0.0;
  for (Vec2 v : vs) scale = std::max(scale, norm(v));
  for (Vec2 v : vs)
    if (norm(v) > 1e-14 * scale) angles.push_back(angle_of(v));
  if (angles.size() < 3) return false;
  std::sort(angles.begin(), angles.end());
  double gap = angles.front() + 2.0 * pi - angles.back();
  for (std::size_t i = 0; i + 1 < angles.size(); ++i) gap = std::max(gap, angles[i + 1] - angles[i]);
  return gap < pi - 1e-12;
}

namespace detail {

inline void scan_extrema(CellComplex& cx, const std::vector<Piece>& pieces) {
  cx.min_phi = inf;
  for (const auto& cell : cx.cells)
    for (Vec2 v : cell.region.vertices) {
      double p = piece_value(pieces[cell.piece], v);
      if (p < cx.min_phi) { cx.min_phi = p; cx.argmin = v; }
    }
}

/// Smallest φ on the clip box boundary, or +∞ when no cell reaches it.
inline double clip_boundary_min(const CellComplex& cx, const std::vector<Piece>& pieces) {
  double m = inf;
  for (const auto& cell : cx.cells) {
    const Region& r = cell.region;
    for (std::size_t i = 0; i < r.size(); ++i)
      if (r.labels[i] == kClipLabel)
        m = std::min({m, piece_value(pieces[cell.piece], r.vertex(i)), piece_value(pieces[cell.piece], r.vertex(i + 1))});
  }
  return m;
}

} // namespace detail

/// Builds the cell complex, growing the clip box for unbounded domains until
/// φ − min φ ≥ 40 on the box boundary and the convexity tail bound is negligible.
inline CellComplex build_cells(const std::vector<Piece>& pieces, const std::vector<Halfplane>& hs,
                               double clip_hint = 1.0) {
  CellComplex cx;
  cx.domain = domain_region(hs, 0.0);
  if (cx.domain.size() < 3) throw InvalidFunction("empty domain");
  if (!touches_clip(cx.domain)) {
    cx.cells = laguerre_regions(pieces, cx.domain);
    detail::scan_extrema(cx, pieces);
    return cx;
  }
  double gmax = 0.0;
  for (const auto& p : pieces) gmax = std::max(gmax, norm(p.z));
  double R = std::max(clip_hint, 1e-3);
  for (int iter = 0; iter < 80; ++iter, R *= 1.6) {
    cx.domain = domain_region(hs, R);
    if (cx.domain.size() < 3) continue;
    cx.clip_radius = R;
    cx.cells = laguerre_regions(pieces, cx.domain);
    detail::scan_extrema(cx, pieces);
    double drop = detail::clip_boundary_min(cx, pieces) - cx.min_phi;
    if (drop < 40.0) continue;
    double D = 2.0 * std::sqrt(2.0) * R;
    double r0 = std::max(R - std::max(std::abs(cx.argmin.x), std::abs(cx.argmin.y)), drop / std::max(gmax, 1e-300));
    double k = drop / D;
    double tail = std::exp(-cx.min_phi) * 2.0 * pi * (1.0 + k * r0) * std::exp(-k * r0) / (k * k);
    double body = 0.0;
    for (const auto& cell : cx.cells)
      body += integrate_exp_affine(pieces[cell.piece].z, pieces[cell.piece].c, cell.region);
    if (tail <= 1e-15 * body) {
      cx.tail_bound = tail;
      return cx;
    }
  }
  throw CoercivityViolation("clip radius search did not terminate");
}

/// f = e^{−φ}, φ(x) = max_i(⟨z_i,x⟩ − c_i) on an intersection of halfplanes (empty list: ℝ²).
class PolyhedralLogConcave {
 public:
  PolyhedralLogConcave(std::vector<Piece> pieces, std::vector<Halfplane> domain) {
    init(std::move(pieces), std::move(domain));
  }

  PolyhedralLogConcave(std::vector<Piece> pieces, const Polygon& domain) {
    std::vector<Halfplane> hs;
    for (std::size_t i = 0; i < domain.size(); ++i)
      hs.push_back({domain.normal(i), dot(domain.normal(i), domain.vertex(i))});
    init(std::move(pieces), std::move(hs));
  }

  static PolyhedralLogConcave indicator(const Polygon& K, double height = 1.0) {
    return PolyhedralLogConcave({Piece{{0.0, 0.0}, std::log(height)}}, K);
  }

  const std::vector<Piece>& pieces() const { return pieces_; }
  const std::vector<Halfplane>& domain() const { return domain_; }
  const std::vector<Piece>& dropped_pieces() const { return dropped_; }
  const CellComplex& cells() const { return *cells_; }
  bool bounded() const { return !cells_->clipped(); }

  double phi(Vec2 x) const {
    for (const auto& h : domain_)
      if (dot(h.normal, x) > h.offset) return inf;
    double m = -inf;
    for (const auto& p : pieces_) m = std::max(m, piece_value(p, x));
    return m;
  }

  double operator()(Vec2 x) const { return std::exp(-phi(x)); }
  double min_phi() const { return cells_->min_phi; }
  double max_value() const { return std::exp(-cells_->min_phi); }
  Vec2 argmax() const { return cells_->argmin; }

 private:
  void init(std::vector<Piece> pieces, std::vector<Halfplane> hs) {
    if (pieces.empty()) throw InvalidFunction("no pieces");
    for (auto& h : hs) {
      double n = norm(h.normal);
      if (!(n > 0.0) || !std::isfinite(h.offset)) throw InvalidFunction("degenerate halfplane");
      h.normal = h.normal / n;
      h.offset /= n;
    }
    std::vector<Vec2> spans;
    for (const auto& p : pieces) {
      if (!std::isfinite(p.z.x) || !std::isfinite(p.z.y) || !std::isfinite(p.c)) throw InvalidFunction("non-finite piece");
      spans.push_back(p.z);
    }
    for (const auto& h : hs) spans.push_back(h.normal);
    if (!positively_spanning(spans))
      throw CoercivityViolation("gradients and domain normals do not positively span the plane");

    CellComplex cx = build_cells(pieces, hs);
    std::vector<Piece> kept;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      if (cx.cells[i].region.size() >= 3) kept.push_back(pieces[i]);
      else dropped_.push_back(pieces[i]);
    }
    std::vector<bool> used(hs.size(), false);
    for (int l : cx.domain.labels)
      if (is_facet_label(l)) used[facet_index(l)] = true;
    std::vector<Halfplane> live;
    for (std::size_t j = 0; j < hs.size(); ++j)
      if (used[j]) live.push_back(hs[j]);
    if (!dropped_.empty() || live.size() != hs.size()) cx = build_cells(kept, live);
    pieces_ = std::move(kept);
    domain_ = std::move(live);
    cells_ = std::make_shared<const CellComplex>(std::move(cx));
  }

  std::vector<Piece> pieces_;
  std::vector<Halfplane> domain_;
  std::vector<Piece> dropped_;
  std::shared_ptr<const CellComplex> cells_;
};

/// f = e^{−w(|x|)} on ℝⁿ with w convex, nondecreasing and piecewise linear.
class RadialLogConcave {
 public:
  RadialLogConcave(int dim, std::vector<std::pair<double, double>> knots, std::optional<double> tail_slope = std::nullopt)
      : dim_(dim), knots_(std::move(knots)), tail_(tail_slope) {
    if (dim_ < 1) throw InvalidFunction("dimension must be at least 1");
    if (knots_.empty() || knots_[0].first != 0.0) throw InvalidFunction("first knot must be at r = 0");
    double prev = 0.0;
    for (std::size_t k = 0; k < knots_.size(); ++k) {
      if (!std::isfinite(knots_[k].first) || !std::isfinite(knots_[k].second)) throw InvalidFunction("non-finite knot");
      if (k == 0) continue;
      double dr = knots_[k].first - knots_[k - 1].first;
      if (!(dr > 0.0)) throw InvalidFunction("knot radii must increase");
      double s = (knots_[k].second - knots_[k - 1].second) / dr;
      double tol = 1e-9 * std::max(1.0, std::abs(s));
      if (s < -tol) throw InvalidFunction("monotonicity: profile decreases");
      if (k > 1 && s < prev - tol) throw InvalidFunction("convexity: slopes decrease");
      prev = std::max(s, 0.0);
    }
    if (tail_) {
      if (!(*tail_ > 0.0) || !std::isfinite(*tail_)) throw InvalidFunction("tail slope must be positive");
      if (*tail_ < prev - 1e-9 * std::max(1.0, prev)) throw InvalidFunction("convexity: tail slope below last slope");
    } else if (knots_.size() < 2) {
      throw InvalidFunction("bounded profile needs a positive support radius");
    }
  }

  int dim() const { return dim_; }
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }
  std::optional<double> tail_slope() const { return tail_; }
  double support_radius() const { return tail_ ? inf : knots_.back().first; }
  std::size_t segments() const { return knots_.size() - 1; }

  /// Slope of segment k (between knots k and k+1).
  double slope(std::size_t k) const {
    return (knots_[k + 1].second - knots_[k].second) / (knots_[k + 1].first - knots_[k].first);
  }

  double w(double r) const {
    if (r < 0.0) r = -r;
    const auto& last = knots_.back();
    if (r >= last.first) {
      if (r == last.first) return last.second;
      return tail_ ? last.second + *tail_ * (r - last.first) : inf;
    }
    auto it = std::upper_bound(knots_.begin(), knots_.end(), r, [](double v, const auto& k) { return v < k.first; });
    std::size_t k = static_cast<std::size_t>(it - knots_.begin()) - 1;
    double t = (r - knots_[k].first) / (knots_[k + 1].first - knots_[k].first);
    return knots_[k].second + t * (knots_[k + 1].second - knots_[k].second);
  }

  double operator()(double r) const { return std::exp(-w(r)); }
  double operator()(Vec2 x) const { return std::exp(-w(norm(x))); }
  double min_phi() const { return knots_.front().second; }
  double max_value() const { return std::exp(-knots_.front().second); }

 private:
  int dim_;
  std::vector<std::pair<double, double>> knots_;
  std::optional<double> tail_;
};

using LogConcave = std::variant<PolyhedralLogConcave, RadialLogConcave>;

inline const CellComplex& laguerre_cells(const PolyhedralLogConcave& f) { return f.cells(); }

// ---------------------------------------------------------------------------
// Mass and entropy

inline double cell_mass(const PolyhedralLogConcave& f, const Cell& cell) {
  const Piece& p = f.pieces()[cell.piece];
  return integrate_exp_affine(p.z, p.c, cell.region);
}

inline double mass(const PolyhedralLogConcave& f) {
  double s = 0.0;
  for (const auto& cell : f.cells().cells) s += cell_mass(f, cell);
  return s;
}

/// ∫ f log f dx.
inline double integral_f_log_f(const PolyhedralLogConcave& f) {
  double s = 0.0;
  for (const auto& cell : f.cells().cells) {
    const Piece& p = f.pieces()[cell.piece];
    s += integrate_xexp_affine(p.z, p.c, cell.region);
  }
  return s;
}

namespace detail {

/// Calls fn(a, L, w_a, alpha) for every segment of the profile, including the tail.
template <class Fn>
void for_each_segment(const RadialLogConcave& f, Fn&& fn) {
  const auto& kn = f.knots();
  for (std::size_t k = 0; k + 1 < kn.size(); ++k)
    fn(kn[k].first, kn[k + 1].first - kn[k].first, kn[k].second, f.slope(k));
  if (f.tail_slope()) fn(kn.back().first, inf, kn.back().second, *f.tail_slope());
}

} // namespace detail

inline double mass(const RadialLogConcave& f) {
  int m = f.dim() - 1;
  double s = 0.0;
  detail::for_each_segment(f, [&](double a, double L, double wa, double alpha) {
    s += std::exp(-wa) * shifted_moment(m, 0, a, L, alpha);
  });
  return sphere_area(f.dim()) * s;
}

inline double integral_f_log_f(const RadialLogConcave& f) {
  int m = f.dim() - 1;
  double s = 0.0;
  detail::for_each_segment(f, [&](double a, double L, double wa, double alpha) {
    double i0 = shifted_moment(m, 0, a, L, alpha);
    double i1 = alpha == 0.0 ? 0.0 : shifted_moment(m, 1, a, L, alpha);
    s -= std::exp(-wa) * (wa * i0 + alpha * i1);
  });
  return sphere_area(f.dim()) * s;
}

inline double mass(const LogConcave& f) {
  return std::visit([](const auto& g) { return mass(g); }, f);
}

template <class F>
double entropy(const F& f) {
  double J = mass(f);
  return integral_f_log_f(f) - J * std::log(J);
}

inline double entropy(const LogConcave& f) {
  return std::visit([](const auto& g) { return entropy(g); }, f);
}

// ---------------------------------------------------------------------------
// Support functions h_f = Lφ

namespace detail {

/// True when some recession direction v of the domain has ⟨y,v⟩ > max_i⟨z_i,v⟩.
inline bool escapes_to_infinity(const PolyhedralLogConcave& f, Vec2 y) {
  std::vector<Vec2> cons;
  double scale = norm(y);
  for (const auto& p : f.pieces()) scale = std::max(scale, norm(p.z));
  std::vector<double> cand;
  for (const auto& h : f.domain()) {
    cand.push_back(angle_of(rot90(h.normal)));
    cand.push_back(angle_of(-rot90(h.normal)));
  }
  for (const auto& p : f.pieces()) {
    Vec2 w = p.z - y;
    if (norm(w) <= 1e-13 * scale) return false;
    cand.push_back(angle_of(rot90(w)));
    cand.push_back(angle_of(-rot90(w)));
  }
  std::sort(cand.begin(), cand.end());
  std::vector<double> tests = cand;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    double b = i + 1 < cand.size() ? cand[i + 1] : cand[0] + 2.0 * pi;
    tests.push_back(0.5 * (cand[i] + b));
  }
  for (double t : tests) {
    Vec2 v = unit(t);
    bool ok = true;
    for (const auto& h : f.domain())
      if (dot(h.normal, v) > 1e-13) { ok = false; break; }
    if (!ok) continue;
    for (const auto& p : f.pieces())
      if (dot(p.z - y, v) >= -1e-12 * scale) { ok = false; break; }
    if (ok) return true;
  }
  return false;
}

inline bool on_clip_edge(const Region& r, std::size_t i) {
  std::size_t n = r.size();
  return r.labels[i] == kClipLabel || r.labels[(i + n - 1) % n] == kClipLabel;
}

} // namespace detail

inline double support_function(const PolyhedralLogConcave& f, Vec2 y) {
  const CellComplex& cx = f.cells();
  if (cx.clipped() && detail::escapes_to_infinity(f, y)) return inf;
  double h = -inf;
  for (const auto& cell : cx.cells) {
    const Region& r = cell.region;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (cx.clipped() && detail::on_clip_edge(r, i)) continue;
      h = std::max(h, dot(y, r.vertex(i)) - piece_value(f.pieces()[cell.piece], r.vertex(i)));
    }
  }
  return h;
}

/// Legendre transform of the profile evaluated at s = |y|.
inline double radial_legendre(const RadialLogConcave& f, double s) {
  s = std::abs(s);
  if (f.tail_slope()) {
    double g = *f.tail_slope();
    if (s > g * (1.0 + 1e-12)) return inf;
    // At s = g the sup is attained along the whole tail; rounding above g is absorbed here.
    s = std::min(s, g);
  }
  // s·r_k − w_k increases while the segment slope is below s; the sup sits at the first knot
  // whose outgoing slope reaches s.
  std::size_t lo = 0, hi = f.segments();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (f.slope(mid) < s) lo = mid + 1; else hi = mid;
  }
  const auto& kn = f.knots();
  double h = -inf;
  for (std::size_t k = lo > 0 ? lo - 1 : 0; k <= std::min(lo + 1, kn.size() - 1); ++k)
    h = std::max(h, s * kn[k].first - kn[k].second);
  return h;
}

inline double support_function(const RadialLogConcave& f, Vec2 y) { return radial_legendre(f, norm(y)); }

inline double support_function(const LogConcave& f, Vec2 y) {
  return std::visit([&](const auto& g) { return support_function(g, y); }, f);
}

/// h_{supp f}(θ); +∞ in directions where the domain is unbounded.
inline double support_of_domain(const PolyhedralLogConcave& f, Vec2 theta) {
  const CellComplex& cx = f.cells();
  const Region& r = cx.domain;
  double h = -inf;
  for (std::size_t i = 0; i < r.size(); ++i) {
    double v = dot(theta, r.vertex(i));
    if (v > h) h = v;
  }
  if (cx.clipped()) {
    for (std::size_t i = 0; i < r.size(); ++i)
      if (detail::on_clip_edge(r, i) && dot(theta, r.vertex(i)) >= h - 1e-12 * (1.0 + std::abs(h))) return inf;
  }
  return h;
}

inline double support_of_domain(const RadialLogConcave& f, Vec2 theta) {
  (void)theta;
  return f.support_radius();
}

// ---------------------------------------------------------------------------
// Evaluation, transforms and level sets

inline double eval(const PolyhedralLogConcave& f, Vec2 x) { return f(x); }
inline double eval(const RadialLogConcave& f, Vec2 x) { return f(x); }
inline double eval(const LogConcave& f, Vec2 x) {
  return std::visit([&](const auto& g) { return g(x); }, f);
}

/// g(x) = f(x + v).
inline PolyhedralLogConcave translate(const PolyhedralLogConcave& f, Vec2 v) {
  std::vector<Piece> ps = f.pieces();
  for (auto& p : ps) p.c -= dot(p.z, v);
  std::vector<Halfplane> hs = f.domain();
  for (auto& h : hs) h.offset -= dot(h.normal, v);
  return PolyhedralLogConcave(std::move(ps), std::move(hs));
}

/// R_u f(x) = f(R_u x).
inline PolyhedralLogConcave reflect(const PolyhedralLogConcave& f, Vec2 u) {
  u = normalized(u);
  std::vector<Piece> ps = f.pieces();
  for (auto& p : ps) p.z = reflect(p.z, u);
  std::vector<Halfplane> hs = f.domain();
  for (auto& h : hs) h.normal = reflect(h.normal, u);
  return PolyhedralLogConcave(std::move(ps), std::move(hs));
}

inline RadialLogConcave reflect(const RadialLogConcave& f, Vec2) { return f; }

/// f∘T for invertible linear T.
inline PolyhedralLogConcave affine_image(const PolyhedralLogConcave& f, const Mat2& T) {
  if (T.det() == 0.0 || !std::isfinite(T.det())) throw SingularTransform("det T = 0");
  Mat2 Tt = T.transpose();
  std::vector<Piece> ps = f.pieces();
  for (auto& p : ps) p.z = Tt * p.z;
  std::vector<Halfplane> hs = f.domain();
  for (auto& h : hs) h.normal = Tt * h.normal;
  return PolyhedralLogConcave(std::move(ps), std::move(hs));
}

/// f∘T∘(x ↦ x + b), i.e. x ↦ f(T x + b) as translate then linear map.
inline PolyhedralLogConcave affine_image(const PolyhedralLogConcave& f, const Mat2& T, Vec2 b) {
  return affine_image(translate(f, b), T);
}

/// λ·f (vertical scaling).
inline PolyhedralLogConcave scale_height(const PolyhedralLogConcave& f, double lambda) {
  std::vector<Piece> ps = f.pieces();
  for (auto& p : ps) p.c += std::log(lambda);
  return PolyhedralLogConcave(std::move(ps), f.domain());
}

inline RadialLogConcave scale_height(const RadialLogConcave& f, double lambda) {
  auto kn = f.knots();
  for (auto& k : kn) k.second -= std::log(lambda);
  return RadialLogConcave(f.dim(), std::move(kn), f.tail_slope());
}

/// {φ ≤ L} as a labeled region (labels: facet_label(j) for domain halfplanes, k ≥ 0 for pieces).
inline Region level_region(const PolyhedralLogConcave& f, double L) {
  std::vector<Halfplane> hs;
  std::vector<int> labels;
  for (std::size_t j = 0; j < f.domain().size(); ++j) {
    hs.push_back(f.domain()[j]);
    labels.push_back(facet_label(j));
  }
  for (std::size_t i = 0; i < f.pieces().size(); ++i) {
    const Piece& p = f.pieces()[i];
    if (p.z.x == 0.0 && p.z.y == 0.0) {
      if (p.c + L < 0.0) return Region{};
      continue;
    }
    hs.push_back({p.z, p.c + L});
    labels.push_back(static_cast<int>(i));
  }
  double R = std::max(1.0, f.cells().clip_radius);
  if (f.bounded()) {
    double e = 0.0;
    for (Vec2 v : f.cells().domain.vertices) e = std::max({e, std::abs(v.x), std::abs(v.y)});
    R = 2.0 * e + 1.0;
  }
  for (int iter = 0; iter < 200; ++iter, R *= 2.0) {
    Region r = square_region(R, kClipLabel);
    for (std::size_t j = 0; j < hs.size() && r.size() >= 3; ++j) r = clip(r, hs[j], labels[j]);
    if (r.size() < 3 || !touches_clip(r)) return r;
  }
  throw CoercivityViolation("level set unbounded");
}

/// {f ≥ t} as a polygon.
inline Polygon superlevel(const PolyhedralLogConcave& f, double t) {
  if (!(t > 0.0) || t > f.max_value() * (1.0 + 1e-14)) throw EmptyLevel("t exceeds max f");
  Region r = level_region(f, -std::log(t));
  try {
    if (r.size() < 3) throw InvalidPolygon("empty");
    return Polygon(r.vertices);
  } catch (const InvalidPolygon&) {
    throw EmptyLevel("level set has empty interior");
  }
}

/// Radius of {w ≤ L}.
inline double level_radius(const RadialLogConcave& f, double L) {
  const auto& kn = f.knots();
  if (L < kn[0].second) return -1.0;
  for (std::size_t k = 0; k + 1 < kn.size(); ++k) {
    if (kn[k + 1].second > L) {
      double s = f.slope(k);
      return s == 0.0 ? kn[k + 1].first : kn[k].first + (L - kn[k].second) / s;
    }
  }
  if (f.tail_slope()) return kn.back().first + (L - kn.back().second) / *f.tail_slope();
  return kn.back().first;
}

inline Polygon superlevel(const RadialLogConcave& f, double t, int edges = 1024) {
  if (f.dim() != 2) throw InvalidFunction("superlevel polygons need dimension 2");
  if (!(t > 0.0) || t > f.max_value() * (1.0 + 1e-14)) throw EmptyLevel("t exceeds max f");
  double r = level_radius(f, -std::log(t));
  if (!(r > 0.0)) throw EmptyLevel("level set has empty interior");
  return disk_polygon(r, edges);
}

inline Polygon superlevel(const LogConcave& f, double t) {
  return std::visit([&](const auto& g) { return superlevel(g, t); }, f);
}

// ---------------------------------------------------------------------------
// Sup-convolution oracle

namespace detail {

struct Box {
  double x0, y0, x1, y1;
};

inline Box bounding_box(const std::vector<Vec2>& pts) {
  Box b{inf, inf, -inf, -inf};
  for (Vec2 p : pts) {
    b.x0 = std::min(b.x0, p.x); b.y0 = std::min(b.y0, p.y);
    b.x1 = std::max(b.x1, p.x); b.y1 = std::max(b.y1, p.y);
  }
  return b;
}

/// Region outside which f < floor·max f.
inline std::vector<Vec2> effective_support(const LogConcave& f, double floor = 1e-14) {
  double lift = -std::log(floor);
  if (auto p = std::get_if<PolyhedralLogConcave>(&f)) {
    if (p->bounded()) return p->cells().domain.vertices;
    return level_region(*p, p->min_phi() + lift).vertices;
  }
  const auto& r = std::get<RadialLogConcave>(f);
  double R = std::isinf(r.support_radius()) ? level_radius(r, r.min_phi() + lift) : r.support_radius();
  return {{-R, -R}, {R, -R}, {R, R}, {-R, R}};
}

/// Vertices of the argmax set of f (one point for strictly peaked f).
inline std::vector<Vec2> argmax_set(const LogConcave& f) {
  if (auto p = std::get_if<PolyhedralLogConcave>(&f)) {
    Region r = level_region(*p, p->min_phi() + 1e-12 * (1.0 + std::abs(p->min_phi())));
    if (r.size() >= 3) return r.vertices;
    return {p->argmax()};
  }
  const auto& r = std::get<RadialLogConcave>(f);
  double R = level_radius(r, r.min_phi());
  if (R > 0.0) return disk_polygon(R, 64).vertices();
  return {{0.0, 0.0}};
}

} // namespace detail

/// Grid approximation of J(f ⋆ t·1_K) = ∫ sup_{y ∈ tK} f(x − y) dx on cell centres of spacing h,
/// ignoring the region where f < floor·max f.
///
/// Pointwise value: for polyhedral f, when x − tK lies inside the domain and inside one cell
/// (piece i wins at x by more than t·r_K·|z_i − z_k| against every k), the sup is exactly
/// exp(−φ_i(x) + t h_K(z_i)). Elsewhere it is either max f (x − tK meets the argmax set) or
/// attained on the boundary of x − tK, which is sampled at spacing h/4.
inline double sup_convolution_mass(const LogConcave& f, const Polygon& K, double t, double h, double floor = 1e-10) {
  std::vector<Vec2> boundary;
  double rK = 0.0;
  for (Vec2 v : K.vertices()) rK = std::max(rK, norm(v));
  if (t > 0.0) {
    for (std::size_t i = 0; i < K.size(); ++i) {
      Vec2 p = t * K.vertex(i), q = t * K.vertex(i + 1);
      int n = std::max(1, static_cast<int>(std::ceil(norm(q - p) / (0.25 * h))));
      for (int k = 0; k < n; ++k) boundary.push_back(p + (static_cast<double>(k) / n) * (q - p));
    }
  }
  const bool origin_in_K = contains(K, {0.0, 0.0});
  std::vector<Vec2> top = detail::argmax_set(f);
  double fmax = std::visit([](const auto& g) { return g.max_value(); }, f);
  const auto* poly = std::get_if<PolyhedralLogConcave>(&f);
  std::vector<double> hK;
  if (poly)
    for (const auto& pc : poly->pieces()) hK.push_back(support(K, pc.z));

  auto sampled = [&](Vec2 x) {
    double v = origin_in_K ? eval(f, x) : 0.0;
    for (Vec2 y : boundary) v = std::max(v, eval(f, x - y));
    if (v < fmax)
      for (Vec2 a : top)
        if (contains(K, (x - a) / t)) return fmax;
    return v;
  };
  auto value = [&](Vec2 x) -> double {
    if (t == 0.0) return eval(f, x);
    double reach = t * rK;
    if (poly) {
      double slack = inf;
      for (const auto& hp : poly->domain()) slack = std::min(slack, hp.offset - dot(hp.normal, x));
      if (slack < -reach) return 0.0;
      if (slack >= reach) {
        const auto& P = poly->pieces();
        std::size_t best = 0;
        double vb = -inf;
        for (std::size_t i = 0; i < P.size(); ++i) {
          double v = piece_value(P[i], x);
          if (v > vb) { vb = v; best = i; }
        }
        bool single = true;
        for (std::size_t k = 0; k < P.size() && single; ++k)
          if (k != best && vb - piece_value(P[k], x) < reach * norm(P[best].z - P[k].z)) single = false;
        if (single) return std::exp(-(vb - t * hK[best]));
      }
      return sampled(x);
    }
    const auto& r = std::get<RadialLogConcave>(f);
    if (norm(x) - r.support_radius() > reach) return 0.0;
    return sampled(x);
  };

  detail::Box b = detail::bounding_box(detail::effective_support(f, floor));
  if (t > 0.0) {
    detail::Box k = detail::bounding_box(K.vertices());
    b = {b.x0 + t * k.x0, b.y0 + t * k.y0, b.x1 + t * k.x1, b.y1 + t * k.y1};
  }
  const double off = 0.5 * h * (std::sqrt(5.0) - 1.0);
  long nx = static_cast<long>(std::ceil((b.x1 - b.x0) / h)) + 2;
  long ny = static_cast<long>(std::ceil((b.y1 - b.y0) / h)) + 2;
  double sum = 0.0;
  for (long i = 0; i < nx; ++i)
    for (long j = 0; j < ny; ++j)
      sum += value({b.x0 - h + off + h * static_cast<double>(i), b.y0 - h + off * 0.7 + h * static_cast<double>(j)});
  return sum * h * h;
}

} // namespace blaschke_lab

#endif
