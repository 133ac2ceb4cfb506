#ifndef BLASCHKE_LAB_MEASURES_HPP
#define BLASCHKE_LAB_MEASURES_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "convex2d.hpp"
#include "logconcave.hpp"

namespace blaschke_lab {

struct MuAtom {
  Vec2 z;
  double a = 0.0;
};

struct NuAtom {
  Vec2 theta;
  double b = 0.0;
};

/// Atomic pair (μ, ν): μ on ℝ² (points z, masses a), ν on S¹ (directions θ, masses b).
struct SurfaceAreaPair {
  int dim = 2;
  std::vector<MuAtom> mu;
  std::vector<NuAtom> nu;

  double mu_total() const {
    double s = 0.0;
    for (const auto& m : mu) s += m.a;
    return s;
  }
  double nu_total() const {
    double s = 0.0;
    for (const auto& n : nu) s += n.b;
    return s;
  }
  /// Σ a z + Σ b θ.
  Vec2 moment() const {
    Vec2 s;
    for (const auto& m : mu) s += m.a * m.z;
    for (const auto& n : nu) s += n.b * n.theta;
    return s;
  }
};

struct GradAtom {
  double g = 0.0;
  double a = 0.0;
};

/// Rotation-invariant pair in dimension n: μ spread uniformly on spheres of radius g, ν uniform of total b.
struct RadialPair {
  int dim = 2;
  std::vector<GradAtom> grad;
  double boundary = 0.0;

  double mu_total() const {
    double s = 0.0;
    for (const auto& m : grad) s += m.a;
    return s;
  }
};

inline constexpr double kMergeRadius = 1e-9;

/// Merges μ atoms closer than `radius` (mass-weighted position) and ν atoms within `radius`
/// radians; μ sorted lexicographically, ν by angle.
inline SurfaceAreaPair canonical(SurfaceAreaPair p, double radius = kMergeRadius) {
  std::sort(p.mu.begin(), p.mu.end(), [](const MuAtom& a, const MuAtom& b) {
    return a.z.x < b.z.x || (a.z.x == b.z.x && a.z.y < b.z.y);
  });
  std::vector<MuAtom> mu;
  std::vector<Vec2> first;
  for (const auto& m : p.mu) {
    if (!(m.a > 0.0)) continue;
    bool merged = false;
    for (std::size_t k = mu.size(); k-- > 0;) {
      if (m.z.x - first[k].x > radius) break;
      if (norm(m.z - first[k]) <= radius) {
        double a = mu[k].a + m.a;
        mu[k].z = (mu[k].a / a) * mu[k].z + (m.a / a) * m.z;
        mu[k].a = a;
        merged = true;
        break;
      }
    }
    if (!merged) {
      mu.push_back(m);
      first.push_back(m.z);
    }
  }
  std::vector<SphereAtom> sa;
  for (const auto& n : p.nu) sa.push_back({n.theta, n.b});
  SphereMeasure2 S = canonical(std::move(sa), radius);
  p.mu = std::move(mu);
  p.nu.clear();
  for (const auto& a : S.atoms) p.nu.push_back({a.direction, a.mass});
  return p;
}

inline SurfaceAreaPair operator+(const SurfaceAreaPair& p, const SurfaceAreaPair& q) {
  if (p.dim != q.dim) throw LayoutMismatch("pair dimensions differ");
  SurfaceAreaPair r = p;
  r.mu.insert(r.mu.end(), q.mu.begin(), q.mu.end());
  r.nu.insert(r.nu.end(), q.nu.begin(), q.nu.end());
  return canonical(std::move(r));
}

inline SurfaceAreaPair operator*(double lambda, const SurfaceAreaPair& p) {
  SurfaceAreaPair r = p;
  for (auto& m : r.mu) m.a *= lambda;
  for (auto& n : r.nu) n.b *= lambda;
  return r;
}

inline SphereMeasure2 nu_measure(const SurfaceAreaPair& p) {
  SphereMeasure2 S;
  for (const auto& n : p.nu) S.atoms.push_back({n.theta, n.b});
  return S;
}

/// Pushforward under the reflection x ↦ R_u x.
inline SurfaceAreaPair reflect(const SurfaceAreaPair& p, Vec2 u) {
  u = normalized(u);
  SurfaceAreaPair r = p;
  for (auto& m : r.mu) m.z = reflect(m.z, u);
  for (auto& n : r.nu) n.theta = reflect(n.theta, u);
  return canonical(std::move(r));
}

// ---------------------------------------------------------------------------
// Extraction

inline SurfaceAreaPair extract_pair(const PolyhedralLogConcave& f) {
  SurfaceAreaPair p;
  std::vector<double> facet_mass(f.domain().size(), 0.0);
  for (const auto& cell : f.cells().cells) {
    const Piece& pc = f.pieces()[cell.piece];
    p.mu.push_back({pc.z, integrate_exp_affine(pc.z, pc.c, cell.region)});
    for (std::size_t e = 0; e < cell.region.size(); ++e) {
      int l = cell.region.labels[e];
      if (is_facet_label(l)) facet_mass[facet_index(l)] += integrate_exp_affine_edge(pc.z, pc.c, cell.region, e);
    }
  }
  for (std::size_t j = 0; j < facet_mass.size(); ++j)
    if (facet_mass[j] > 0.0) p.nu.push_back({f.domain()[j].normal, facet_mass[j]});
  return canonical(std::move(p));
}

inline SurfaceAreaPair extract_pair(const Polygon& K) {
  SurfaceAreaPair p;
  p.mu.push_back({{0.0, 0.0}, area(K)});
  for (const auto& a : surface_area_measure(K).atoms) p.nu.push_back({a.direction, a.mass});
  return p;
}

inline RadialPair canonical(RadialPair p, double radius = kMergeRadius) {
  std::sort(p.grad.begin(), p.grad.end(), [](const GradAtom& a, const GradAtom& b) { return a.g < b.g; });
  std::vector<GradAtom> out;
  for (const auto& a : p.grad) {
    if (!(a.a > 0.0)) continue;
    if (!out.empty() && a.g - out.back().g <= radius) {
      double m = out.back().a + a.a;
      out.back().g = (out.back().a * out.back().g + a.a * a.g) / m;
      out.back().a = m;
    } else {
      out.push_back(a);
    }
  }
  p.grad = std::move(out);
  return p;
}

inline RadialPair operator+(const RadialPair& p, const RadialPair& q) {
  if (p.dim != q.dim) throw LayoutMismatch("pair dimensions differ");
  RadialPair r = p;
  r.grad.insert(r.grad.end(), q.grad.begin(), q.grad.end());
  r.boundary += q.boundary;
  return canonical(std::move(r));
}

inline RadialPair operator*(double lambda, const RadialPair& p) {
  RadialPair r = p;
  for (auto& a : r.grad) a.a *= lambda;
  r.boundary *= lambda;
  return r;
}

inline RadialPair extract_radial_pair(const RadialLogConcave& f) {
  RadialPair p;
  p.dim = f.dim();
  int m = f.dim() - 1;
  double w = sphere_area(f.dim());
  const auto& kn = f.knots();
  for (std::size_t k = 0; k + 1 < kn.size(); ++k) {
    double s = f.slope(k);
    double a = kn[k].first, L = kn[k + 1].first - a;
    p.grad.push_back({std::max(s, 0.0), w * std::exp(-kn[k].second) * shifted_moment(m, 0, a, L, s)});
  }
  if (f.tail_slope()) {
    double s = *f.tail_slope();
    p.grad.push_back({s, w * std::exp(-kn.back().second) * shifted_moment(m, 0, kn.back().first, inf, s)});
  } else {
    double R = kn.back().first;
    p.boundary = std::exp(-kn.back().second) * w * std::pow(R, m);
  }
  return canonical(std::move(p));
}

// ---------------------------------------------------------------------------
// Admissibility

struct AdmissibilityReport {
  bool nonzero_mu = false;
  bool centered = false;
  Vec2 defect;
  double relative_defect = 0.0;
  bool spanning = false;
  Vec2 offending_normal;

  bool ok() const { return nonzero_mu && centered && spanning; }
  std::string describe() const {
    std::string s;
    if (!nonzero_mu) s += "mu is zero; ";
    if (!centered)
      s += "not centered, defect (" + std::to_string(defect.x) + ", " + std::to_string(defect.y) + "); ";
    if (!spanning)
      s += "atoms on a common line, normal (" + std::to_string(offending_normal.x) + ", " +
           std::to_string(offending_normal.y) + "); ";
    return s.empty() ? "admissible" : s;
  }
};

inline double first_moment_scale(const SurfaceAreaPair& p) {
  double s = 0.0;
  for (const auto& m : p.mu) s += m.a * norm(m.z);
  return s + p.nu_total();
}

inline AdmissibilityReport admissible(const SurfaceAreaPair& p, double tol = 1e-9) {
  AdmissibilityReport r;
  r.nonzero_mu = p.mu_total() > 0.0;
  r.defect = p.moment();
  double scale = first_moment_scale(p);
  r.relative_defect = scale > 0.0 ? norm(r.defect) / scale : 0.0;
  r.centered = r.relative_defect <= tol;
  // Scatter matrix of unit directions; a zero eigenvalue means all lie on one line.
  double sxx = 0, sxy = 0, syy = 0;
  double zscale = 0.0;
  for (const auto& m : p.mu) zscale = std::max(zscale, norm(m.z));
  auto add = [&](Vec2 v) {
    sxx += v.x * v.x; sxy += v.x * v.y; syy += v.y * v.y;
  };
  for (const auto& m : p.mu)
    if (norm(m.z) > 1e-12 * zscale && m.a > 0.0) add(normalized(m.z));
  for (const auto& n : p.nu)
    if (n.b > 0.0) add(normalized(n.theta));
  double tr = sxx + syy, det = sxx * syy - sxy * sxy;
  double lmin = 0.5 * tr - std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  r.spanning = tr > 0.0 && lmin > 1e-12 * tr;
  if (!r.spanning) {
    double t = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    r.offending_normal = tr > 0.0 ? rot90(unit(t)) : Vec2{1.0, 0.0};
  }
  return r;
}

// ---------------------------------------------------------------------------
// First variation and W₁

/// δ(f, g) = Σ a h_g(z) + Σ b h_{supp g}(θ); a single callable pair for h_g and h_{supp g}.
template <class HG, class HS>
double first_variation_with(const SurfaceAreaPair& p, HG&& hg, HS&& hs) {
  double s = 0.0;
  for (const auto& m : p.mu) {
    double h = hg(m.z);
    if (std::isinf(h) && h > 0) return inf;
    s += m.a * h;
  }
  for (const auto& n : p.nu) {
    double h = hs(n.theta);
    if (std::isinf(h)) throw UnboundedSupportTerm("h_{supp g} is infinite on the support of nu");
    s += n.b * h;
  }
  return s;
}

/// δ(f, 1_K).
inline double first_variation(const SurfaceAreaPair& p, const Polygon& K) {
  auto h = [&](Vec2 y) { return support(K, y); };
  return first_variation_with(p, h, h);
}

inline double first_variation(const SurfaceAreaPair& p, const PolyhedralLogConcave& g) {
  return first_variation_with(
      p, [&](Vec2 y) { return support_function(g, y); }, [&](Vec2 t) { return support_of_domain(g, t); });
}

inline double first_variation(const SurfaceAreaPair& p, const RadialLogConcave& g) {
  return first_variation_with(
      p, [&](Vec2 y) { return support_function(g, y); }, [&](Vec2 t) { return support_of_domain(g, t); });
}

inline double first_variation(const SurfaceAreaPair& p, const LogConcave& g) {
  return std::visit([&](const auto& h) { return first_variation(p, h); }, g);
}

/// δ(f, g) for rotation-invariant f and g: h_g and h_{supp g} are radial, so spherical averaging is exact.
inline double first_variation(const RadialPair& p, const RadialLogConcave& g) {
  if (p.dim != g.dim()) throw LayoutMismatch("pair dimensions differ");
  double s = 0.0;
  for (const auto& a : p.grad) {
    double h = support_function(g, Vec2{a.g, 0.0});
    if (std::isinf(h) && h > 0) return inf;
    s += a.a * h;
  }
  if (p.boundary > 0.0) {
    double R = g.support_radius();
    if (std::isinf(R)) throw UnboundedSupportTerm("h_{supp g} is infinite on the support of nu");
    s += p.boundary * R;
  }
  return s;
}

/// W₁ = Σ a|z| + Σ b.
inline double quermassintegral_W1(const SurfaceAreaPair& p) { return first_moment_scale(p); }

inline double quermassintegral_W1(const RadialPair& p) {
  double s = p.boundary;
  for (const auto& a : p.grad) s += a.g * a.a;
  return s;
}

namespace detail {

inline double region_perimeter(const Region& r) {
  if (r.size() < 3) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += norm(r.vertex(i + 1) - r.vertex(i));
  return s;
}

/// ∫_{L0}^{L0+Δ} p(L) e^{−L} dL for p affine with p(L0) = p0, p(L0+Δ) = p1.
inline double affine_exp_integral(double L0, double delta, double p0, double p1) {
  double A = -std::expm1(-delta);
  double B = delta < 1e-4 ? delta * (0.5 - delta / 3.0 + delta * delta / 8.0)
                          : (A - delta * std::exp(-delta)) / delta;
  return std::exp(-L0) * (p0 * A + (p1 - p0) * B);
}

} // namespace detail

/// W₁ by the level-set route: ∫_{min φ}^∞ per({φ ≤ L}) e^{−L} dL. The perimeter is affine in L
/// between consecutive vertex values of φ, so each interval is integrated in closed form from
/// two interior evaluations.
inline double quermassintegral_layercake(const PolyhedralLogConcave& f) {
  const CellComplex& cx = f.cells();
  std::vector<double> bps{f.min_phi()};
  for (const auto& cell : cx.cells) {
    const Region& r = cell.region;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (cx.clipped() && detail::on_clip_edge(r, i)) continue;
      bps.push_back(piece_value(f.pieces()[cell.piece], r.vertex(i)));
    }
  }
  std::sort(bps.begin(), bps.end());
  std::vector<double> knots;
  for (double b : bps)
    if (knots.empty() || b - knots.back() > 1e-12 * (1.0 + std::abs(b))) knots.push_back(b);
  auto per = [&](double L) { return detail::region_perimeter(level_region(f, L)); };
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    double L0 = knots[k], d = knots[k + 1] - L0;
    double q1 = per(L0 + d / 3.0), q2 = per(L0 + 2.0 * d / 3.0);
    double p0 = 2.0 * q1 - q2, p1 = 2.0 * q2 - q1;
    total += detail::affine_exp_integral(L0, d, p0, p1);
  }
  double Lk = knots.back();
  double q1 = per(Lk + 1.0), q2 = per(Lk + 2.0);
  double slope = q2 - q1, p0 = q1 - slope;
  total += std::exp(-Lk) * (p0 + slope);
  return total;
}

/// Level-set route for radial f: ∫ nωₙ r(L)^{n−1} e^{−L} dL with r(L) piecewise linear in L.
inline double quermassintegral_layercake(const RadialLogConcave& f) {
  int m = f.dim() - 1;
  double w = sphere_area(f.dim());
  double total = 0.0;
  // On a segment of slope α, L = w_a + α(r − a) and dL = α dr.
  detail::for_each_segment(f, [&](double a, double L, double wa, double alpha) {
    if (alpha > 0.0) total += alpha * std::exp(-wa) * shifted_moment(m, 0, a, L, alpha);
  });
  if (!f.tail_slope()) {
    double R = f.knots().back().first;
    total += std::exp(-f.knots().back().second) * std::pow(R, m);
  }
  return w * total;
}

inline double quermassintegral_layercake(const LogConcave& f) {
  return std::visit([](const auto& g) { return quermassintegral_layercake(g); }, f);
}

// ---------------------------------------------------------------------------
// Haar averaging and the cosmic test metric

inline RadialPair haar_average(const SurfaceAreaPair& p) {
  RadialPair r;
  r.dim = p.dim;
  for (const auto& m : p.mu) r.grad.push_back({norm(m.z), m.a});
  r.boundary = p.nu_total();
  return canonical(std::move(r));
}

/// Planar pair spreading each radial atom over `directions` equally spaced directions.
inline SurfaceAreaPair embed_radial(const RadialPair& r, int directions = 256) {
  if (r.dim != 2) throw LayoutMismatch("radial embedding needs dimension 2");
  SurfaceAreaPair p;
  for (const auto& a : r.grad) {
    if (a.g == 0.0) {
      p.mu.push_back({{0.0, 0.0}, a.a});
      continue;
    }
    for (int k = 0; k < directions; ++k) p.mu.push_back({a.g * unit(2.0 * pi * k / directions), a.a / directions});
  }
  if (r.boundary > 0.0)
    for (int k = 0; k < directions; ++k) p.nu.push_back({unit(2.0 * pi * k / directions), r.boundary / directions});
  return p;
}

/// Cosmically continuous test function ξ with its horizon ξ̄(θ) = lim ξ(λθ)/λ.
struct CosmicTest {
  std::string name;
  std::function<double(Vec2)> xi;
  std::function<double(Vec2)> horizon;
};

inline double cosmic_pairing(const SurfaceAreaPair& p, const CosmicTest& t) {
  double s = 0.0;
  for (const auto& m : p.mu) s += m.a * t.xi(m.z);
  for (const auto& n : p.nu) s += n.b * t.horizon(n.theta);
  return s;
}

/// Fixed test family, version "cosmic-v1".
inline const std::vector<CosmicTest>& default_cosmic_family() {
  static const std::vector<CosmicTest> family = [] {
    std::vector<CosmicTest> f;
    f.push_back({"norm", [](Vec2 x) { return norm(x); }, [](Vec2) { return 1.0; }});
    f.push_back({"soft_abs_x", [](Vec2 x) { return std::sqrt(x.x * x.x + 1.0); }, [](Vec2 t) { return std::abs(t.x); }});
    f.push_back({"soft_abs_y", [](Vec2 x) { return std::sqrt(x.y * x.y + 1.0); }, [](Vec2 t) { return std::abs(t.y); }});
    std::vector<Polygon> polys{
        Polygon({{1.0, 0.0}, {-0.5, 0.8}, {-0.5, -0.8}}),
        Polygon({{-0.2, -0.6}, {1.1, -0.6}, {1.1, 0.4}, {-0.2, 0.4}}),
        Polygon({{0.9, 0.1}, {0.3, 0.9}, {-0.7, 0.6}, {-0.8, -0.4}, {0.2, -0.9}})};
    for (std::size_t i = 0; i < polys.size(); ++i) {
      Polygon P = polys[i];
      auto h = [P](Vec2 x) { return support(P, x); };
      f.push_back({"support_" + std::to_string(i + 1), h, h});
    }
    f.push_back({"bump", [](Vec2 x) { return std::exp(-norm2(x)); }, [](Vec2) { return 0.0; }});
    return f;
  }();
  return family;
}

inline double cosmic_distance(const SurfaceAreaPair& p, const SurfaceAreaPair& q,
                              const std::vector<CosmicTest>& family = default_cosmic_family()) {
  if (p.dim != q.dim) throw LayoutMismatch("pair dimensions differ");
  double d = 0.0;
  for (const auto& t : family) d = std::max(d, std::abs(cosmic_pairing(p, t) - cosmic_pairing(q, t)));
  return d;
}

inline double cosmic_distance(const SurfaceAreaPair& p, const RadialPair& q,
                              const std::vector<CosmicTest>& family = default_cosmic_family()) {
  return cosmic_distance(p, embed_radial(q), family);
}

} // namespace blaschke_lab

#endif
