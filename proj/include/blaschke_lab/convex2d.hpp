#ifndef BLASCHKE_LAB_CONVEX2D_HPP
#define BLASCHKE_LAB_CONVEX2D_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "numeric.hpp"
#include "vec2.hpp"

namespace blaschke_lab {

/// {x : ⟨normal, x⟩ ≤ offset}
struct Halfplane {
  Vec2 normal;
  double offset = 0.0;
};

/// Convex polygon with counterclockwise, strictly convex vertex sequence.
class Polygon {
 public:
  Polygon() = default;

  explicit Polygon(std::vector<Vec2> vertices, double tolerance = 1e-10) : tol_(tolerance) {
    if (!(tolerance >= 0.0)) throw InvalidPolygon("negative tolerance");
    normalize(std::move(vertices));
  }

  const std::vector<Vec2>& vertices() const { return v_; }
  double tolerance() const { return tol_; }
  std::size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }
  Vec2 vertex(std::size_t i) const { return v_[i % v_.size()]; }
  Vec2 edge(std::size_t i) const { return vertex(i + 1) - vertex(i); }

  /// Outer unit normal of edge i.
  Vec2 normal(std::size_t i) const {
    Vec2 e = edge(i);
    return normalized(Vec2{e.y, -e.x});
  }

 private:
  void normalize(std::vector<Vec2> pts) {
    if (pts.size() < 3) throw InvalidPolygon("fewer than 3 vertices");
    double signed_area = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) signed_area += cross(pts[i], pts[(i + 1) % pts.size()]);
    if (signed_area < 0.0) std::reverse(pts.begin(), pts.end());

    double xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
    for (Vec2 p : pts) {
      xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
    }
    double scale = std::hypot(xmax - xmin, ymax - ymin);
    if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidPolygon("degenerate vertex set");
    double len_tol = std::max(tol_, 1e-15) * scale;

    bool changed = true;
    while (changed && pts.size() >= 3) {
      changed = false;
      for (std::size_t i = 0; i < pts.size() && pts.size() >= 3; ++i) {
        std::size_t n = pts.size();
        Vec2 prev = pts[(i + n - 1) % n], cur = pts[i], next = pts[(i + 1) % n];
        Vec2 a = cur - prev, b = next - cur;
        double la = norm(a), lb = norm(b);
        if (la <= len_tol) {
          pts.erase(pts.begin() + static_cast<long>(i));
          changed = true;
          break;
        }
        double c = cross(a, b);
        if (std::abs(c) <= tol_ * la * lb) {
          if (dot(a, b) < 0.0) throw InvalidPolygon("vertex sequence folds back");
          pts.erase(pts.begin() + static_cast<long>(i));
          changed = true;
          break;
        }
        if (c < 0.0) throw InvalidPolygon("vertex sequence is not convex");
      }
    }
    if (pts.size() < 3) throw InvalidPolygon("collapsed to fewer than 3 vertices");
    double area = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) area += cross(pts[i], pts[(i + 1) % pts.size()]);
    if (0.5 * area <= tol_ * tol_ * scale * scale) throw InvalidPolygon("empty interior");
    v_ = std::move(pts);
  }

  std::vector<Vec2> v_;
  double tol_ = 1e-10;
};

struct SphereAtom {
  Vec2 direction;
  double mass = 0.0;
};

/// Atomic measure on S¹; atoms sorted by angle in [0, 2π).
struct SphereMeasure2 {
  std::vector<SphereAtom> atoms;

  double total() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.mass;
    return s;
  }
  Vec2 moment() const {
    Vec2 s;
    for (const auto& a : atoms) s += a.mass * a.direction;
    return s;
  }
};

/// Sorts by angle, drops non-positive masses and merges directions closer than tol radians.
inline SphereMeasure2 canonical(std::vector<SphereAtom> atoms, double tol = 1e-10) {
  std::vector<std::pair<double, SphereAtom>> sorted;
  for (auto a : atoms) {
    if (!(a.mass > 0.0)) continue;
    a.direction = normalized(a.direction);
    sorted.push_back({angle_of(a.direction), a});
  }
  std::sort(sorted.begin(), sorted.end(), [](const auto& p, const auto& q) { return p.first < q.first; });
  std::vector<std::pair<double, SphereAtom>> merged;
  std::vector<Vec2> sums;
  for (const auto& [t, a] : sorted) {
    if (!merged.empty() && t - merged.back().first <= tol) {
      merged.back().second.mass += a.mass;
      sums.back() += a.mass * a.direction;
    } else {
      merged.push_back({t, a});
      sums.push_back(a.mass * a.direction);
    }
  }
  if (merged.size() > 1 && merged.front().first + 2.0 * pi - merged.back().first <= tol) {
    merged.front().second.mass += merged.back().second.mass;
    sums.front() += sums.back();
    merged.pop_back();
    sums.pop_back();
  }
  SphereMeasure2 out;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    SphereAtom a = merged[i].second;
    a.direction = normalized(sums[i]);
    out.atoms.push_back(a);
  }
  return out;
}

inline SphereMeasure2 operator+(const SphereMeasure2& s, const SphereMeasure2& t) {
  std::vector<SphereAtom> atoms = s.atoms;
  atoms.insert(atoms.end(), t.atoms.begin(), t.atoms.end());
  return canonical(std::move(atoms));
}

inline SphereMeasure2 operator*(double lambda, const SphereMeasure2& s) {
  SphereMeasure2 out = s;
  for (auto& a : out.atoms) a.mass *= lambda;
  return canonical(std::move(out.atoms));
}

// ---------------------------------------------------------------------------
// Basic measurements

inline double support(const Polygon& K, Vec2 u) {
  double h = -inf;
  for (Vec2 v : K.vertices()) h = std::max(h, dot(u, v));
  return h;
}

inline Vec2 support_vertex(const Polygon& K, Vec2 u) {
  Vec2 best = K.vertex(0);
  double h = dot(u, best);
  for (Vec2 v : K.vertices())
    if (dot(u, v) > h) { h = dot(u, v); best = v; }
  return best;
}

inline double area(const Polygon& K) {
  double s = 0.0;
  for (std::size_t i = 0; i < K.size(); ++i) s += cross(K.vertex(i), K.vertex(i + 1));
  return 0.5 * s;
}

inline double perimeter(const Polygon& K) {
  double s = 0.0;
  for (std::size_t i = 0; i < K.size(); ++i) s += norm(K.edge(i));
  return s;
}

inline Vec2 centroid(const Polygon& K) {
  Vec2 c;
  double a = 0.0;
  Vec2 o = K.vertex(0);
  for (std::size_t i = 1; i + 1 < K.size(); ++i) {
    Vec2 p = K.vertex(i) - o, q = K.vertex(i + 1) - o;
    double t = 0.5 * cross(p, q);
    c += t * (p + q) / 3.0;
    a += t;
  }
  return o + c / a;
}

inline double diameter(const Polygon& K) {
  double d = 0.0;
  for (Vec2 p : K.vertices())
    for (Vec2 q : K.vertices()) d = std::max(d, norm(p - q));
  return d;
}

inline bool contains(const Polygon& K, Vec2 x, double slack = 0.0) {
  for (std::size_t i = 0; i < K.size(); ++i)
    if (dot(K.normal(i), x - K.vertex(i)) > slack) return false;
  return true;
}

/// Steiner point s(K) = (1/π)∫ h_K(u) u dσ, integrated exactly over each vertex's normal arc.
inline Vec2 steiner_point(const Polygon& K) {
  Vec2 s;
  std::size_t n = K.size();
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 n0 = K.normal(i + n - 1), n1 = K.normal(i);
    double a = angle_of(n0);
    double b = a + std::atan2(cross(n0, n1), dot(n0, n1));
    double d = 0.5 * (b - a);
    double s2 = 0.25 * (std::sin(2.0 * b) - std::sin(2.0 * a));
    double off = 0.5 * (std::sin(b) * std::sin(b) - std::sin(a) * std::sin(a));
    Vec2 v = K.vertex(i);
    s += Vec2{(d + s2) * v.x + off * v.y, off * v.x + (d - s2) * v.y};
  }
  return s / pi;
}

// ---------------------------------------------------------------------------
// Constructors and transforms

inline Polygon convex_hull(std::vector<Vec2> pts, double tolerance = 1e-10) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) throw InvalidPolygon("hull of fewer than 3 points");
  std::vector<Vec2> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return Polygon(std::move(h), tolerance);
}

/// Regular polygon inscribed in the circle of radius r; used as a disk approximation.
inline Polygon disk_polygon(double r, int edges = 256, Vec2 center = {}, double phase = 0.0) {
  std::vector<Vec2> v;
  for (int k = 0; k < edges; ++k) v.push_back(center + r * unit(phase + 2.0 * pi * k / edges));
  return Polygon(std::move(v));
}

inline Polygon box(double xmin, double ymin, double xmax, double ymax) {
  return Polygon({{xmin, ymin}, {xmax, ymin}, {xmax, ymax}, {xmin, ymax}});
}

inline Polygon translate(const Polygon& K, Vec2 t) {
  std::vector<Vec2> v = K.vertices();
  for (auto& p : v) p += t;
  return Polygon(std::move(v), K.tolerance());
}

inline Polygon scale(const Polygon& K, double lambda) {
  std::vector<Vec2> v = K.vertices();
  for (auto& p : v) p = lambda * p;
  return Polygon(std::move(v), K.tolerance());
}

inline Polygon linear_image(const Polygon& K, const Mat2& T) {
  if (T.det() == 0.0) throw SingularTransform("linear image of polygon");
  std::vector<Vec2> v = K.vertices();
  for (auto& p : v) p = T * p;
  return Polygon(std::move(v), K.tolerance());
}

/// Reflection about the line u⊥.
inline Polygon reflect(const Polygon& K, Vec2 u) {
  u = normalized(u);
  std::vector<Vec2> v = K.vertices();
  for (auto& p : v) p = reflect(p, u);
  std::reverse(v.begin(), v.end());
  return Polygon(std::move(v), K.tolerance());
}

inline std::size_t lowest_vertex(const Polygon& K) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < K.size(); ++i) {
    Vec2 p = K.vertex(i), b = K.vertex(best);
    if (p.y < b.y || (p.y == b.y && p.x < b.x)) best = i;
  }
  return best;
}

/// Minkowski sum by merging edge sequences in angular order.
inline Polygon minkowski_sum(const Polygon& K, const Polygon& L) {
  std::size_t i0 = lowest_vertex(K), j0 = lowest_vertex(L);
  std::size_t n = K.size(), m = L.size();
  auto edge_angle = [](Vec2 e) {
    double t = angle_of(e);
    return t >= 2.0 * pi ? 0.0 : t;
  };
  std::vector<Vec2> out;
  Vec2 p = K.vertex(i0) + L.vertex(j0);
  out.push_back(p);
  std::size_t ci = 0, cj = 0;
  while (ci < n || cj < m) {
    Vec2 e;
    if (cj == m) {
      e = K.edge(i0 + ci++);
    } else if (ci == n) {
      e = L.edge(j0 + cj++);
    } else {
      Vec2 e1 = K.edge(i0 + ci), e2 = L.edge(j0 + cj);
      double a1 = edge_angle(e1), a2 = edge_angle(e2);
      if (ci == 0 && a1 > 1.5 * pi) a1 -= 2.0 * pi;
      if (cj == 0 && a2 > 1.5 * pi) a2 -= 2.0 * pi;
      if (a1 <= a2) { e = e1; ++ci; } else { e = e2; ++cj; }
    }
    p += e;
    out.push_back(p);
  }
  out.pop_back();
  return Polygon(std::move(out), std::max(K.tolerance(), L.tolerance()));
}

/// τ_u K = ½K + ½R_u K.
inline Polygon minkowski_symmetral(const Polygon& K, Vec2 u) {
  return minkowski_sum(scale(K, 0.5), scale(reflect(K, u), 0.5));
}

// ---------------------------------------------------------------------------
// Surface area measures and the planar Minkowski problem

inline SphereMeasure2 surface_area_measure(const Polygon& K) {
  std::vector<SphereAtom> atoms;
  for (std::size_t i = 0; i < K.size(); ++i) atoms.push_back({K.normal(i), norm(K.edge(i))});
  return canonical(std::move(atoms));
}

/// Largest angular gap between consecutive atoms (2π for a single atom).
inline double max_angular_gap(const SphereMeasure2& S) {
  if (S.atoms.empty()) return 2.0 * pi;
  double gap = 0.0;
  for (std::size_t i = 0; i < S.atoms.size(); ++i) {
    double a = angle_of(S.atoms[i].direction);
    double b = angle_of(S.atoms[(i + 1) % S.atoms.size()].direction);
    double d = b - a;
    if (d <= 0.0) d += 2.0 * pi;
    gap = std::max(gap, d);
  }
  return gap;
}

inline Polygon minkowski_problem_2d(const SphereMeasure2& measure, double centering_tol = 1e-9) {
  SphereMeasure2 S = canonical(measure.atoms);
  if (S.atoms.size() < 3 || max_angular_gap(S) >= pi - 1e-12)
    throw DegenerateSpan("directions lie in a closed halfplane");
  double total = S.total();
  Vec2 m = S.moment();
  if (norm(m) > centering_tol * total)
    throw NotCentered("defect (" + std::to_string(m.x) + ", " + std::to_string(m.y) + ")");
  std::vector<Vec2> edges;
  Vec2 closure;
  for (const auto& a : S.atoms) {
    edges.push_back(a.mass * rot90(a.direction));
    closure += edges.back();
  }
  std::vector<Vec2> v;
  Vec2 p;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    v.push_back(p);
    p += edges[k] - (S.atoms[k].mass / total) * closure;
  }
  Polygon K(std::move(v));
  return translate(K, -steiner_point(K));
}

inline Polygon blaschke_sum_2d(const Polygon& K, const Polygon& L) {
  return minkowski_problem_2d(surface_area_measure(K) + surface_area_measure(L));
}

/// λ·K = λ^{1/(n−1)}K, which for n = 2 is λK.
inline Polygon blaschke_scale_2d(const Polygon& K, double lambda) { return scale(K, lambda); }

/// Zonotope with support function ½Σ m|⟨θ,u⟩|.
inline Polygon projection_body_2d(const SphereMeasure2& S) {
  std::vector<std::pair<double, Vec2>> gens;
  for (const auto& a : S.atoms) {
    Vec2 g = 0.5 * a.mass * a.direction;
    double t = angle_of(g);
    if (t >= pi) { g = -g; t -= pi; }
    if (t >= pi) t = 0.0;
    gens.push_back({t, g});
  }
  std::sort(gens.begin(), gens.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  Vec2 p;
  for (const auto& g : gens) p -= g.second;
  std::vector<Vec2> v;
  for (const auto& g : gens) { v.push_back(p); p += 2.0 * g.second; }
  for (const auto& g : gens) { v.push_back(p); p -= 2.0 * g.second; }
  return Polygon(std::move(v));
}

inline Polygon polar(const Polygon& K) {
  double scale_ref = diameter(K);
  std::vector<Vec2> v;
  for (std::size_t i = 0; i < K.size(); ++i) {
    Vec2 u = K.normal(i);
    double h = dot(u, K.vertex(i));
    if (!(h > 1e-12 * scale_ref)) throw OriginOutside("origin not interior");
    v.push_back(u / h);
  }
  return Polygon(std::move(v), K.tolerance());
}

/// Exact Hausdorff distance via the common refinement of both normal fans.
inline double hausdorff_distance(const Polygon& K, const Polygon& L) {
  std::vector<double> angles;
  for (std::size_t i = 0; i < K.size(); ++i) angles.push_back(angle_of(K.normal(i)));
  for (std::size_t i = 0; i < L.size(); ++i) angles.push_back(angle_of(L.normal(i)));
  std::sort(angles.begin(), angles.end());
  auto in_arc = [](double t, double a, double b) {
    while (t < a) t += 2.0 * pi;
    return t <= b;
  };
  double d = 0.0;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    double a = angles[i];
    double b = i + 1 < angles.size() ? angles[i + 1] : angles[0] + 2.0 * pi;
    Vec2 mid = unit(0.5 * (a + b));
    Vec2 w = support_vertex(K, mid) - support_vertex(L, mid);
    d = std::max({d, std::abs(dot(w, unit(a))), std::abs(dot(w, unit(b)))});
    double nw = norm(w);
    if (nw > 0.0 && (in_arc(angle_of(w), a, b) || in_arc(angle_of(-w), a, b))) d = std::max(d, nw);
  }
  return d;
}

/// vol(λ·K # (1−λ)·L)^{1/2} − λ vol(K)^{1/2} − (1−λ) vol(L)^{1/2}.
inline double classical_ks_margin(const Polygon& K, const Polygon& L, double lambda) {
  double rhs = lambda * std::sqrt(area(K)) + (1.0 - lambda) * std::sqrt(area(L));
  SphereMeasure2 S = lambda * surface_area_measure(K) + (1.0 - lambda) * surface_area_measure(L);
  return std::sqrt(area(minkowski_problem_2d(S))) - rhs;
}

// ---------------------------------------------------------------------------
// Convex regions with edge labels, used for cell complexes and level sets.

/// Convex vertex list where labels[i] tags the edge from vertices[i] to vertices[i+1].
struct Region {
  std::vector<Vec2> vertices;
  std::vector<int> labels;

  std::size_t size() const { return vertices.size(); }
  Vec2 vertex(std::size_t i) const { return vertices[i % vertices.size()]; }
};

inline double area(const Region& r) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += cross(r.vertex(i), r.vertex(i + 1));
  return 0.5 * s;
}

inline Vec2 vertex_mean(const Region& r) {
  Vec2 c;
  for (Vec2 p : r.vertices) c += p;
  return c / static_cast<double>(r.size());
}

inline Region clip(const Region& r, const Halfplane& h, int label) {
  Region out;
  std::size_t n = r.size();
  if (n == 0) return out;
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 p = r.vertices[i], q = r.vertices[(i + 1) % n];
    double sp = dot(h.normal, p) - h.offset, sq = dot(h.normal, q) - h.offset;
    if (sp <= 0.0) {
      out.vertices.push_back(p);
      out.labels.push_back(r.labels[i]);
      if (sq > 0.0) {
        out.vertices.push_back(p + (sp / (sp - sq)) * (q - p));
        out.labels.push_back(label);
      }
    } else if (sq <= 0.0) {
      out.vertices.push_back(p + (sp / (sp - sq)) * (q - p));
      out.labels.push_back(r.labels[i]);
    }
  }
  if (out.size() < 3) return Region{};
  return out;
}

inline Region square_region(double R, int label) {
  return Region{{{-R, -R}, {R, -R}, {R, R}, {-R, R}}, {label, label, label, label}};
}

inline Region region_of(const Polygon& K, int label) {
  Region r{K.vertices(), std::vector<int>(K.size(), label)};
  return r;
}

/// Polygon from a region, or empty optional-like Polygon when degenerate.
inline Polygon to_polygon(const Region& r) { return Polygon(r.vertices); }

} // namespace blaschke_lab

#endif
