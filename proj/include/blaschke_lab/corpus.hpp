#ifndef BLASCHKE_LAB_CORPUS_HPP
#define BLASCHKE_LAB_CORPUS_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "logconcave.hpp"
#include "measures.hpp"

namespace blaschke_lab {

/// Platform-independent uniform draws on top of mt19937_64 (whose raw output is fixed by the standard;
/// the std distributions are not).
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 eng_;
};

namespace detail {

inline Polygon random_convex_domain(PortableRng& rng) {
  for (;;) {
    int n = rng.integer(4, 8);
    double rot = rng.uniform(0.0, 2.0 * pi);
    std::vector<Vec2> pts;
    for (int k = 0; k < n; ++k) {
      double t = rot + 2.0 * pi * (k + rng.uniform(-0.3, 0.3)) / n;
      pts.push_back(rng.uniform(0.8, 1.6) * unit(t) + Vec2{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)});
    }
    try {
      Polygon P = convex_hull(pts);
      bool short_edge = false;
      for (std::size_t i = 0; i < P.size(); ++i) short_edge = short_edge || norm(P.edge(i)) < 0.15;
      if (P.size() >= 3 && !short_edge && area(P) > 0.5) return P;
    } catch (const InvalidPolygon&) {
    }
  }
}

/// Every cell and facet carries at least `frac` of the total, and no two gradients are close.
inline bool well_spread(const PolyhedralLogConcave& f, double frac) {
  if (!f.dropped_pieces().empty()) return false;
  SurfaceAreaPair p = extract_pair(f);
  if (p.mu.size() != f.pieces().size() || p.nu.size() != f.domain().size()) return false;
  double J = p.mu_total();
  for (const auto& m : p.mu)
    if (m.a < frac * J) return false;
  for (const auto& n : p.nu)
    if (n.b < frac * (J + p.nu_total())) return false;
  for (std::size_t i = 0; i < p.mu.size(); ++i)
    for (std::size_t k = i + 1; k < p.mu.size(); ++k)
      if (norm(p.mu[i].z - p.mu[k].z) < 0.05) return false;
  return true;
}

} // namespace detail

/// Random polyhedral function; roughly 70% have a bounded polygonal domain, the rest are coercive on ℝ².
inline PolyhedralLogConcave random_polyhedral(PortableRng& rng) {
  for (;;) {
    try {
      std::vector<Piece> pieces;
      if (rng.bernoulli(0.7)) {
        Polygon D = detail::random_convex_domain(rng);
        int m = rng.integer(1, 5);
        for (int i = 0; i < m; ++i)
          pieces.push_back({{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)}, rng.uniform(-0.5, 0.5)});
        PolyhedralLogConcave f(pieces, D);
        if (detail::well_spread(f, 1e-3)) return f;
      } else {
        int m = rng.integer(3, 6);
        double rot = rng.uniform(0.0, 2.0 * pi);
        for (int i = 0; i < m; ++i) {
          double t = rot + 2.0 * pi * (i + rng.uniform(-0.25, 0.25)) / m;
          pieces.push_back({rng.uniform(0.6, 2.0) * unit(t), rng.uniform(-0.5, 0.5)});
        }
        if (rng.bernoulli(0.5))
          pieces.push_back({{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)}, rng.uniform(0.0, 0.8)});
        PolyhedralLogConcave f(pieces, std::vector<Halfplane>{});
        if (detail::well_spread(f, 1e-3)) return f;
      }
    } catch (const Error&) {
    }
  }
}

/// Random radial profile in dimension 1–5, bounded or with an exponential tail.
inline RadialLogConcave random_radial(PortableRng& rng) {
  int n = rng.integer(1, 5);
  int segs = rng.integer(1, 5);
  std::vector<std::pair<double, double>> kn{{0.0, rng.uniform(-1.0, 1.0)}};
  double slope = rng.bernoulli(0.5) ? 0.0 : rng.uniform(0.1, 1.0);
  for (int k = 0; k < segs; ++k) {
    double L = rng.uniform(0.2, 1.0);
    kn.push_back({kn.back().first + L, kn.back().second + slope * L});
    slope += rng.uniform(0.2, 1.5);
  }
  if (rng.bernoulli(0.5)) return RadialLogConcave(n, kn, slope);
  return RadialLogConcave(n, kn);
}

/// Piecewise-linear interpolation of |x|²/2 at spacing h up to rmax, continued linearly.
inline RadialLogConcave gaussian_profile(int dim, double h, double rmax) {
  std::vector<std::pair<double, double>> kn;
  int n = static_cast<int>(std::ceil(rmax / h));
  for (int k = 0; k <= n; ++k) kn.push_back({k * h, 0.5 * (k * h) * (k * h)});
  return RadialLogConcave(dim, kn, n * h);
}

struct NamedPolyhedral {
  std::string name;
  PolyhedralLogConcave f;
};

struct NamedRadial {
  std::string name;
  RadialLogConcave f;
};

struct Corpus {
  std::vector<NamedPolyhedral> polyhedral;
  std::vector<NamedRadial> radial;
};

inline PolyhedralLogConcave square_indicator() { return PolyhedralLogConcave::indicator(box(-1, -1, 1, 1)); }

inline PolyhedralLogConcave linf_function() {
  return PolyhedralLogConcave({{{1, 0}, 0}, {{-1, 0}, 0}, {{0, 1}, 0}, {{0, -1}, 0}}, std::vector<Halfplane>{});
}

/// Witnesses first, then seeded random members.
inline Corpus make_corpus(std::uint64_t seed, int polyhedral_count, int radial_count) {
  Corpus c;
  c.polyhedral.push_back({"square", square_indicator()});
  c.polyhedral.push_back({"linf", linf_function()});
  c.polyhedral.push_back({"disk64", PolyhedralLogConcave::indicator(disk_polygon(1.0, 64))});
  c.radial.push_back({"gaussian2", gaussian_profile(2, 0.05, 8.0)});
  c.radial.push_back({"disk2", RadialLogConcave(2, {{0.0, 0.0}, {1.0, 0.0}})});
  PortableRng rng(seed);
  for (int k = 0; k < polyhedral_count; ++k) c.polyhedral.push_back({"poly" + std::to_string(k), random_polyhedral(rng)});
  for (int k = 0; k < radial_count; ++k) c.radial.push_back({"radial" + std::to_string(k), random_radial(rng)});
  return c;
}

} // namespace blaschke_lab

#endif
