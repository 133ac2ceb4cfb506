#include "catch_amalgamated.hpp"

#include "blaschke_lab/corpus.hpp"
#include "blaschke_lab/measures.hpp"
#include "test_util.hpp"

using namespace blaschke_lab;
using Catch::Approx;

namespace {

/// Midpoint rule for ∫₀^R nωₙ r^{n−1} e^{−w(r)} dr, refined until stable.
double radial_mass_quadrature(const RadialLogConcave& f, double R, int n = 400000) {
  double s = 0.0, h = R / n;
  for (int k = 0; k < n; ++k) {
    double r = (k + 0.5) * h;
    s += std::pow(r, f.dim() - 1) * f(r);
  }
  return sphere_area(f.dim()) * s * h;
}

/// Nearest-atom comparison so that the test does not depend on canonical ordering.
double pair_gap(const SurfaceAreaPair& p, const SurfaceAreaPair& q) {
  if (p.mu.size() != q.mu.size() || p.nu.size() != q.nu.size()) return inf;
  double gap = 0.0;
  for (const auto& a : p.mu) {
    double best = inf;
    for (const auto& b : q.mu) best = std::min(best, norm(a.z - b.z) + std::abs(a.a - b.a));
    gap = std::max(gap, best);
  }
  for (const auto& a : p.nu) {
    double best = inf;
    for (const auto& b : q.nu) best = std::min(best, norm(a.theta - b.theta) + std::abs(a.b - b.b));
    gap = std::max(gap, best);
  }
  return gap;
}

RadialLogConcave unit_ball_indicator() { return RadialLogConcave(2, {{0.0, 0.0}, {1.0, 0.0}}); }

} // namespace

TEST_CASE("pair extraction examples", "[measures]") {
  Polygon sq = box(-1, -1, 1, 1);
  SurfaceAreaPair p = extract_pair(PolyhedralLogConcave::indicator(sq));
  REQUIRE(p.mu.size() == 1);
  REQUIRE(p.mu[0].a == Approx(4.0).epsilon(1e-14));
  REQUIRE(norm(p.mu[0].z) == 0.0);
  REQUIRE(p.nu.size() == 4);
  auto S = surface_area_measure(sq);
  for (std::size_t j = 0; j < 4; ++j) {
    REQUIRE(norm(p.nu[j].theta - S.atoms[j].direction) < 1e-15);
    REQUIRE(p.nu[j].b == Approx(S.atoms[j].mass).epsilon(1e-14));
  }

  SurfaceAreaPair q = extract_pair(linf_function());
  REQUIRE(q.mu.size() == 4);
  REQUIRE(q.nu.empty());
  for (const auto& m : q.mu) {
    REQUIRE(norm(m.z) == Approx(1.0));
    REQUIRE(m.a == Approx(2.0).epsilon(1e-12));
  }

  // A shifted offset scales every cell by e^c.
  PolyhedralLogConcave lc({{{1, 0}, 0.3}, {{-1, 0}, 0.3}, {{0, 1}, 0.3}, {{0, -1}, 0.3}}, std::vector<Halfplane>{});
  for (const auto& m : extract_pair(lc).mu) REQUIRE(m.a == Approx(2.0 * std::exp(0.3)).epsilon(1e-12));
}

TEST_CASE("extracted pairs are centered", "[measures]") {
  PortableRng rng(101);
  for (int k = 0; k < 50; ++k) {
    PolyhedralLogConcave f = random_polyhedral(rng);
    SurfaceAreaPair p = extract_pair(f);
    REQUIRE(admissible(p).relative_defect <= 1e-9);
    REQUIRE(p.mu_total() == Approx(mass(f)).epsilon(1e-13));
  }
}

TEST_CASE("radial pair extraction", "[measures]") {
  double r = 1.7;
  RadialPair a = extract_radial_pair(RadialLogConcave(2, {{0.0, 0.0}, {r, 0.0}}));
  REQUIRE(a.grad.size() == 1);
  REQUIRE(a.grad[0].g == 0.0);
  REQUIRE(a.grad[0].a == Approx(pi * r * r).epsilon(1e-14));
  REQUIRE(a.boundary == Approx(2 * pi * r).epsilon(1e-14));

  RadialPair b = extract_radial_pair(RadialLogConcave(2, {{0.0, 0.0}}, 1.0));
  REQUIRE(b.grad.size() == 1);
  REQUIRE(b.grad[0].g == 1.0);
  REQUIRE(b.grad[0].a == Approx(2 * pi).epsilon(1e-14));
  REQUIRE(b.boundary == 0.0);

  RadialLogConcave g = gaussian_profile(2, 0.01, 9.0);
  RadialPair c = extract_radial_pair(g);
  double total = c.mu_total();
  REQUIRE(total == Approx(mass(g)).epsilon(1e-8));
  // The profile is continued linearly past r = 9; the remainder beyond r = 12 is below 1e-30.
  REQUIRE(total == Approx(radial_mass_quadrature(g, 12.0)).epsilon(1e-8));

  PortableRng rng(5);
  for (int k = 0; k < 20; ++k) {
    RadialLogConcave f = random_radial(rng);
    RadialPair p = extract_radial_pair(f);
    REQUIRE(p.mu_total() == Approx(mass(f)).epsilon(1e-12));
    for (std::size_t i = 1; i < p.grad.size(); ++i) REQUIRE(p.grad[i].g > p.grad[i - 1].g);
  }
}

TEST_CASE("admissibility report", "[measures]") {
  SurfaceAreaPair ind = extract_pair(PolyhedralLogConcave::indicator(box(-1, -1, 1, 1)));
  REQUIRE(admissible(ind).ok());

  SurfaceAreaPair line;
  line.mu = {{{1, 0}, 1.0}, {{-1, 0}, 1.0}, {{0, 0}, 2.0}};
  line.nu = {{{1, 0}, 0.5}, {{-1, 0}, 0.5}};
  auto r = admissible(line);
  REQUIRE(r.nonzero_mu);
  REQUIRE(r.centered);
  REQUIRE_FALSE(r.spanning);
  REQUIRE(std::abs(r.offending_normal.x) < 1e-12);
  REQUIRE(std::abs(r.offending_normal.y) == Approx(1.0));

  SurfaceAreaPair single;
  single.mu = {{{1, 0}, 1.0}};
  auto s = admissible(single);
  REQUIRE_FALSE(s.centered);
  REQUIRE(s.defect.x == 1.0);
  REQUIRE_FALSE(s.ok());

  SurfaceAreaPair empty;
  REQUIRE_FALSE(admissible(empty).nonzero_mu);
}

TEST_CASE("first variation examples", "[measures]") {
  SurfaceAreaPair sq = extract_pair(PolyhedralLogConcave::indicator(box(-1, -1, 1, 1)));
  REQUIRE(first_variation(sq, unit_ball_indicator()) == Approx(8.0).epsilon(1e-14));
  REQUIRE(first_variation(sq, box(-1, -1, 1, 1)) == Approx(8.0).epsilon(1e-14));
  // δ(1_K, 1_M) = 2 V₁(K, M); V₁(K, K) = vol K.
  std::mt19937_64 rng(9);
  Polygon K = test_util::random_polygon(rng);
  SurfaceAreaPair pk = extract_pair(K);
  REQUIRE(first_variation(pk, K) == Approx(2.0 * area(K)).epsilon(1e-12));

  REQUIRE_THROWS_AS(first_variation(sq, linf_function()), UnboundedSupportTerm);
  // ν empty: unbounded support is fine.
  SurfaceAreaPair lp = extract_pair(linf_function());
  REQUIRE(std::isfinite(first_variation(lp, linf_function())));
}

TEST_CASE("first variation of f against itself", "[measures]") {
  // Fine piecewise-linear Gaussian; the exact value for the true Gaussian is 2π.
  RadialLogConcave g = gaussian_profile(2, 0.002, 12.0);
  SurfaceAreaPair p = embed_radial(extract_radial_pair(g));
  double d = first_variation(p, g);
  double J = mass(g);
  REQUIRE(d == Approx(J * (2.0 + std::log(J)) + entropy(g)).epsilon(1e-10));
  REQUIRE(d == Approx(2 * pi).epsilon(1e-5));

  PortableRng rng(77);
  for (int k = 0; k < 20; ++k) {
    PolyhedralLogConcave f = random_polyhedral(rng);
    double Jf = mass(f);
    double lhs = first_variation(extract_pair(f), f);
    REQUIRE(lhs == Approx(Jf * (2.0 + std::log(Jf)) + entropy(f)).epsilon(1e-9));
  }
}

TEST_CASE("first variation is additive and homogeneous in the pair", "[measures]") {
  PortableRng rng(3);
  std::mt19937_64 poly_rng(4);
  for (int k = 0; k < 10; ++k) {
    SurfaceAreaPair p = extract_pair(random_polyhedral(rng));
    SurfaceAreaPair q = extract_pair(random_polyhedral(rng));
    PolyhedralLogConcave g = PolyhedralLogConcave::indicator(test_util::random_polygon(poly_rng));
    double sum = first_variation(p + q, g);
    REQUIRE(sum == Approx(first_variation(p, g) + first_variation(q, g)).epsilon(1e-13));
    REQUIRE(first_variation(2.5 * p, g) == Approx(2.5 * first_variation(p, g)).epsilon(1e-14));
    REQUIRE(quermassintegral_W1(2.5 * p) == Approx(2.5 * quermassintegral_W1(p)).epsilon(1e-14));
  }
}

TEST_CASE("W1 by two routes", "[measures]") {
  SurfaceAreaPair sq = extract_pair(PolyhedralLogConcave::indicator(box(-1, -1, 1, 1)));
  REQUIRE(quermassintegral_W1(sq) == Approx(8.0).epsilon(1e-14));
  REQUIRE(quermassintegral_layercake(PolyhedralLogConcave::indicator(box(-1, -1, 1, 1))) == Approx(8.0).epsilon(1e-12));
  Polygon D = disk_polygon(1.3, 64);
  REQUIRE(quermassintegral_layercake(PolyhedralLogConcave::indicator(D, 0.7)) == Approx(0.7 * perimeter(D)).epsilon(1e-12));

  // Gaussian: W₁ = ∫ |x| e^{−|x|²/2} dx = 2π√(π/2).
  RadialLogConcave g = gaussian_profile(2, 0.002, 12.0);
  REQUIRE(quermassintegral_W1(extract_radial_pair(g)) == Approx(2 * pi * std::sqrt(pi / 2)).epsilon(1e-6));
  REQUIRE(quermassintegral_layercake(g) == Approx(2 * pi * std::sqrt(pi / 2)).epsilon(1e-4));

  REQUIRE(quermassintegral_layercake(linf_function()) == Approx(quermassintegral_W1(extract_pair(linf_function()))).epsilon(1e-4));
  PortableRng rng(21);
  for (int k = 0; k < 50; ++k) {
    PolyhedralLogConcave f = random_polyhedral(rng);
    REQUIRE(quermassintegral_layercake(f) == Approx(quermassintegral_W1(extract_pair(f))).epsilon(1e-4));
  }
  for (int k = 0; k < 20; ++k) {
    RadialLogConcave f = random_radial(rng);
    REQUIRE(quermassintegral_layercake(f) == Approx(quermassintegral_W1(extract_radial_pair(f))).epsilon(1e-4));
  }
}

TEST_CASE("reflection pushes the pair forward", "[measures]") {
  PortableRng rng(31);
  for (int k = 0; k < 20; ++k) {
    PolyhedralLogConcave f = random_polyhedral(rng);
    Vec2 u = unit(rng.uniform(0.0, 2 * pi));
    REQUIRE(pair_gap(extract_pair(reflect(f, u)), reflect(extract_pair(f), u)) <= 1e-12);
  }
}

TEST_CASE("Haar averaging", "[measures]") {
  SurfaceAreaPair sq = extract_pair(PolyhedralLogConcave::indicator(box(-1, -1, 1, 1)));
  RadialPair h = haar_average(sq);
  REQUIRE(h.grad.size() == 1);
  REQUIRE(h.grad[0].g == 0.0);
  REQUIRE(h.grad[0].a == Approx(4.0).epsilon(1e-14));
  REQUIRE(h.boundary == Approx(8.0).epsilon(1e-14));

  PortableRng rng(41);
  for (int k = 0; k < 20; ++k) {
    SurfaceAreaPair p = extract_pair(random_polyhedral(rng));
    RadialPair r = haar_average(p);
    REQUIRE(quermassintegral_W1(r) == Approx(quermassintegral_W1(p)).epsilon(1e-14));
    REQUIRE(r.mu_total() == Approx(p.mu_total()).epsilon(1e-14));
    RadialPair again = haar_average(embed_radial(r));
    REQUIRE(again.grad.size() == r.grad.size());
    for (std::size_t i = 0; i < r.grad.size(); ++i) {
      REQUIRE(again.grad[i].g == Approx(r.grad[i].g).epsilon(1e-14));
      REQUIRE(again.grad[i].a == Approx(r.grad[i].a).epsilon(1e-13));
    }
  }
}

TEST_CASE("cosmic test metric", "[measures]") {
  SurfaceAreaPair sq = extract_pair(PolyhedralLogConcave::indicator(box(-1, -1, 1, 1)));
  REQUIRE(cosmic_distance(sq, sq) == 0.0);
  SurfaceAreaPair moved = extract_pair(PolyhedralLogConcave::indicator(box(2, -3, 4, -1)));
  REQUIRE(cosmic_distance(sq, moved) < 1e-13);
  double d = cosmic_distance(sq, haar_average(sq));
  REQUIRE(d > 1e-2);
  // Hand value for the polygon tests: the square's ν integrates h_P over four axis directions.
  const auto& fam = default_cosmic_family();
  REQUIRE(fam.size() == 7);
  REQUIRE(cosmic_pairing(sq, fam[0]) == Approx(8.0));
  REQUIRE(cosmic_pairing(sq, fam[1]) == Approx(4.0 + 4.0));
  REQUIRE(cosmic_pairing(sq, fam[6]) == Approx(4.0));
  REQUIRE(cosmic_pairing(sq, fam[3]) == Approx(2.0 * (1.0 + 0.8 + 0.5 + 0.8)));
}

TEST_CASE("first variation against the sup-convolution slope", "[measures]") {
  // Second-order one-sided difference of t ↦ J(f ⋆ t·1_B) on a grid of spacing 0.01.
  const double h = 0.01, t = 0.05;
  Polygon B = disk_polygon(1.0, 256);
  auto slope = [&](const LogConcave& f) {
    double j0 = sup_convolution_mass(f, B, 0.0, h);
    double j1 = sup_convolution_mass(f, B, t, h);
    double j2 = sup_convolution_mass(f, B, 2 * t, h);
    return (4.0 * j1 - j2 - 3.0 * j0) / (2.0 * t);
  };
  PolyhedralLogConcave sq = square_indicator();
  REQUIRE(first_variation(extract_pair(sq), B) == Approx(slope(sq)).epsilon(0.02));
  PolyhedralLogConcave lf = linf_function();
  REQUIRE(first_variation(extract_pair(lf), B) == Approx(slope(lf)).epsilon(0.02));
}
