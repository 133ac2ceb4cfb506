#include "catch_amalgamated.hpp"

#include <random>

#include "blaschke_lab/logconcave.hpp"
#include "test_util.hpp"

using namespace blaschke_lab;
using Catch::Approx;

namespace {

PolyhedralLogConcave linf_unbounded() {
  return PolyhedralLogConcave({{{1, 0}, 0}, {{-1, 0}, 0}, {{0, 1}, 0}, {{0, -1}, 0}}, std::vector<Halfplane>{});
}

RadialLogConcave gaussian_pl(double h, double rmax) {
  std::vector<std::pair<double, double>> kn;
  int n = static_cast<int>(std::ceil(rmax / h));
  for (int k = 0; k <= n; ++k) kn.push_back({k * h, 0.5 * (k * h) * (k * h)});
  return RadialLogConcave(2, kn, rmax);
}

/// ∫ over [x0,x1]×[y0,y1] of e^{c − a·x}, separable closed form.
double rect_oracle(Vec2 a, double c, double x0, double x1, double y0, double y1) {
  auto one = [](double s, double lo, double hi) {
    return s == 0.0 ? hi - lo : -std::exp(-s * lo) * std::expm1(-s * (hi - lo)) / s;
  };
  return std::exp(c) * one(a.x, x0, x1) * one(a.y, y0, y1);
}

} // namespace

TEST_CASE("exponential-affine integration", "[logconcave]") {
  Polygon tri({{0, 0}, {1, 0}, {0, 1}});
  REQUIRE(integrate_exp_affine({0, 0}, 0.0, tri) == Approx(0.5).epsilon(1e-15));
  double sq = integrate_exp_affine({1, 1}, 0.0, box(0, 0, 1, 1));
  REQUIRE(sq == Approx(std::pow(1 - std::exp(-1.0), 2)).epsilon(1e-14));
  REQUIRE(sq == Approx(0.3995764).margin(1e-7));

  double prev = integrate_exp_affine({0, 0}, 0.0, box(0, 0, 1, 1));
  for (double eps : {1e-3, 1e-5, 1e-7, 1e-9}) {
    double v = integrate_exp_affine({eps, 0}, 0.0, box(0, 0, 1, 1));
    REQUIRE(std::abs(v - rect_oracle({eps, 0}, 0.0, 0, 1, 0, 1)) < 1e-14);
    REQUIRE(std::abs(v - prev) < 1e-10 + eps);
  }

  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> U(-3, 3);
  for (int k = 0; k < 200; ++k) {
    Vec2 a{U(rng), U(rng)};
    double c = U(rng);
    double x0 = U(rng), y0 = U(rng);
    double x1 = x0 + 0.1 + std::abs(U(rng)), y1 = y0 + 0.1 + std::abs(U(rng));
    double v = integrate_exp_affine(a, c, box(x0, y0, x1, y1));
    REQUIRE(v == Approx(rect_oracle(a, c, x0, x1, y0, y1)).epsilon(1e-12));
  }
}

TEST_CASE("cell complex", "[logconcave]") {
  PolyhedralLogConcave one({{{0.3, 0.1}, 0.2}}, box(-1, -1, 1, 1));
  REQUIRE(one.cells().cells.size() == 1);
  REQUIRE(area(one.cells().cells[0].region) == Approx(4.0));

  PolyhedralLogConcave linf({{{1, 0}, 0}, {{-1, 0}, 0}, {{0, 1}, 0}, {{0, -1}, 0}}, box(-2, -2, 2, 2));
  REQUIRE(linf.pieces().size() == 4);
  double total = 0;
  for (const auto& c : linf.cells().cells) {
    REQUIRE(area(c.region) == Approx(4.0).epsilon(1e-14));
    total += area(c.region);
  }
  REQUIRE(total == Approx(16.0).epsilon(1e-12));

  PolyhedralLogConcave dup({{{1, 0}, 0}, {{1, 0}, 0}, {{-1, 0}, 0}}, box(-1, -1, 1, 1));
  REQUIRE(dup.pieces().size() == 2);
  REQUIRE(dup.dropped_pieces().size() == 1);

  PolyhedralLogConcave hidden({{{0, 0}, 0}, {{0, 0}, -5}}, box(-1, -1, 1, 1));
  REQUIRE(hidden.pieces().size() == 1);

  REQUIRE_THROWS_AS(PolyhedralLogConcave({{{1, 0}, 0}, {{0, 1}, 0}}, std::vector<Halfplane>{}), CoercivityViolation);

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int k = 0; k < 20; ++k) {
    std::vector<Piece> ps;
    for (int i = 0; i < 6; ++i) ps.push_back({{2 * U(rng), 2 * U(rng)}, U(rng)});
    Polygon D = test_util::random_polygon(rng, 8, 1.5);
    PolyhedralLogConcave f(ps, D);
    double s = 0;
    for (const auto& c : f.cells().cells) s += area(c.region);
    REQUIRE(s == Approx(area(D)).epsilon(1e-9));
    for (const auto& c : f.cells().cells) {
      Vec2 m = vertex_mean(c.region);
      for (const auto& p : f.pieces())
        REQUIRE(piece_value(f.pieces()[c.piece], m) >= piece_value(p, m) - 1e-12);
    }
  }
}

TEST_CASE("mass", "[logconcave]") {
  Polygon K = test_util::random_polygon(*std::make_unique<std::mt19937_64>(37));
  REQUIRE(mass(PolyhedralLogConcave::indicator(K)) == Approx(area(K)).epsilon(1e-13));

  // ∫ e^{−‖x‖∞} = ∫₀^∞ 8r e^{−r} dr = 8, four cells of mass 2 each.
  auto f = linf_unbounded();
  REQUIRE(mass(f) == Approx(8.0).epsilon(1e-12));
  for (const auto& c : f.cells().cells) REQUIRE(cell_mass(f, c) == Approx(2.0).epsilon(1e-12));
  REQUIRE(f.cells().tail_bound < 1e-14);

  REQUIRE(mass(gaussian_pl(2e-4, 9.5)) == Approx(2 * pi).epsilon(1e-8));
  REQUIRE(mass(RadialLogConcave(2, {{0, 0}}, 1.0)) == Approx(2 * pi).epsilon(1e-12));
  // w(r) = r in dimension 3: 4π Γ(3) = 8π; dimension 1: 2.
  REQUIRE(mass(RadialLogConcave(3, {{0, 0}}, 1.0)) == Approx(8 * pi).epsilon(1e-12));
  REQUIRE(mass(RadialLogConcave(1, {{0, 0}}, 1.0)) == Approx(2.0).epsilon(1e-12));
  REQUIRE(mass(RadialLogConcave(2, {{0, 0}, {1, 0}})) == Approx(pi).epsilon(1e-13));
}

TEST_CASE("entropy", "[logconcave]") {
  REQUIRE(entropy(PolyhedralLogConcave::indicator(box(-1, -1, 1, 1))) == Approx(-4 * std::log(4.0)).epsilon(1e-13));
  REQUIRE(entropy(PolyhedralLogConcave::indicator(box(-1, -1, 1, 1))) == Approx(-5.5452).margin(1e-4));
  double c = 2.5;
  Polygon A = box(0, 0, 3, 1);
  REQUIRE(entropy(PolyhedralLogConcave::indicator(A, c)) == Approx(-c * 3 * std::log(3.0)).epsilon(1e-12));
  double g = entropy(gaussian_pl(1e-3, 9.5));
  REQUIRE(g == Approx(-2 * pi - 2 * pi * std::log(2 * pi)).margin(1e-6));

  // ∫ e^{−r}(−r) over ℝ² = −2π·Γ(3) = −4π; Ent = −4π − 2π log 2π.
  double e = entropy(RadialLogConcave(2, {{0, 0}}, 1.0));
  REQUIRE(e == Approx(-4 * pi - 2 * pi * std::log(2 * pi)).epsilon(1e-12));
  // ‖x‖∞: ∫ 8r e^{−r}(−r) dr = −16, Ent = −16 − 8 log 8.
  REQUIRE(entropy(linf_unbounded()) == Approx(-16 - 8 * std::log(8.0)).epsilon(1e-12));
}

TEST_CASE("support function", "[logconcave]") {
  std::mt19937_64 rng(41);
  Polygon K = test_util::random_polygon(rng);
  auto f = PolyhedralLogConcave::indicator(K);
  for (int k = 0; k < 36; ++k) {
    Vec2 y = 1.7 * unit(2 * pi * k / 36);
    REQUIRE(support_function(f, y) == Approx(support(K, y)).margin(1e-14));
  }
  auto gauss = gaussian_pl(2e-4, 9.5);
  for (double s : {0.0, 0.5, 1.3, 4.0})
    REQUIRE(support_function(gauss, Vec2{s, 0}) == Approx(0.5 * s * s).margin(1e-8));
  RadialLogConcave cone(2, {{0, 0}}, 1.0);
  REQUIRE(support_function(cone, Vec2{0.6, 0.2}) == 0.0);
  REQUIRE(std::isinf(support_function(cone, Vec2{1.1, 0.0})));

  auto linf = linf_unbounded();
  // Dual norm of ‖·‖∞ is ℓ¹: finite (zero) inside the cross-polytope, infinite outside.
  REQUIRE(support_function(linf, {0.5, -0.4}) == Approx(0.0).margin(1e-14));
  REQUIRE(std::isinf(support_function(linf, {0.5, -0.9})));
  REQUIRE(std::isinf(support_function(linf, {1.2, 0.0})));
  REQUIRE(support_function(linf, {0, 0}) == Approx(-linf.min_phi()));

  PolyhedralLogConcave pf({{{1, 0.5}, 0.3}, {{-1, 0.2}, 0.1}, {{0.1, -1}, -0.2}}, box(-1, -1, 2, 1));
  REQUIRE(support_function(pf, {0, 0}) == Approx(-pf.min_phi()).margin(1e-14));
  for (int k = 0; k < 20; ++k) {
    Vec2 a{std::cos(k), std::sin(2.0 * k)}, b{std::sin(3.0 * k), -std::cos(k)};
    double ha = support_function(pf, a), hb = support_function(pf, b), hm = support_function(pf, 0.5 * (a + b));
    REQUIRE(hm <= 0.5 * (ha + hb) + 1e-12);
    // Brute-force Legendre on a grid is a lower bound.
    double brute = -inf;
    for (int i = 0; i <= 300; ++i)
      for (int j = 0; j <= 200; ++j) {
        Vec2 x{-1 + 3.0 * i / 300, -1 + 2.0 * j / 200};
        brute = std::max(brute, dot(a, x) - pf.phi(x));
      }
    REQUIRE(brute <= ha + 1e-12);
    REQUIRE(ha - brute < 0.05);
  }
}

TEST_CASE("transforms", "[logconcave]") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> U(-1, 1);
  PolyhedralLogConcave f({{{1, 0.5}, 0.3}, {{-1, 0.2}, 0.1}, {{0.1, -1}, -0.2}, {{0.4, 0.9}, 0.0}}, box(-1, -1, 2, 1));
  Vec2 v{0.3, -0.2};
  auto g = translate(f, v);
  for (int k = 0; k < 100; ++k) {
    Vec2 x{1.5 * U(rng), 1.5 * U(rng)};
    REQUIRE(g(x) == Approx(f(x + v)).margin(1e-14));
  }
  REQUIRE(mass(g) == Approx(mass(f)).epsilon(1e-10));
  REQUIRE(entropy(g) == Approx(entropy(f)).epsilon(1e-10));

  Vec2 u = normalized(Vec2{0.6, 0.8});
  auto r = reflect(f, u);
  auto rr = reflect(r, u);
  for (int k = 0; k < 100; ++k) {
    Vec2 x{1.5 * U(rng), 1.5 * U(rng)};
    REQUIRE(r(x) == Approx(f(reflect(x, u))).margin(1e-14));
    REQUIRE(rr(x) == Approx(f(x)).margin(1e-14));
  }
  REQUIRE(mass(r) == Approx(mass(f)).epsilon(1e-10));
  REQUIRE(entropy(r) == Approx(entropy(f)).epsilon(1e-10));

  Mat2 T{1.3, 0.4, -0.2, 0.7};
  auto h = affine_image(f, T);
  for (int k = 0; k < 100; ++k) {
    Vec2 x{1.5 * U(rng), 1.5 * U(rng)};
    REQUIRE(h(x) == Approx(f(T * x)).margin(1e-14));
  }
  REQUIRE(mass(h) == Approx(mass(f) / std::abs(T.det())).epsilon(1e-9));
  Mat2 S{2.0, 0.5, 0.0, 0.5};
  REQUIRE(entropy(affine_image(f, S)) == Approx(entropy(f)).epsilon(1e-9));
  REQUIRE_THROWS_AS(affine_image(f, Mat2{1, 2, 2, 4}), SingularTransform);
}

TEST_CASE("superlevel sets", "[logconcave]") {
  Polygon K = box(-1, -0.5, 2, 1);
  REQUIRE(hausdorff_distance(superlevel(PolyhedralLogConcave::indicator(K), 0.5), K) < 1e-14);
  REQUIRE_THROWS_AS(superlevel(PolyhedralLogConcave::indicator(K), 1.5), EmptyLevel);

  auto gauss = gaussian_pl(1e-3, 9.5);
  Polygon L = superlevel(gauss, std::exp(-0.5));
  for (Vec2 p : L.vertices()) REQUIRE(norm(p) == Approx(1.0).epsilon(1e-9));

  auto linf = linf_unbounded();
  Polygon prev = superlevel(linf, 0.01);
  for (double t : {0.05, 0.2, 0.5, 0.9}) {
    Polygon cur = superlevel(linf, t);
    for (Vec2 p : cur.vertices()) REQUIRE(contains(prev, p, 1e-12));
    prev = cur;
  }
  REQUIRE(area(superlevel(linf, std::exp(-1.0))) == Approx(4.0).epsilon(1e-13));
}

TEST_CASE("sup-convolution oracle", "[logconcave]") {
  auto sq = LogConcave(PolyhedralLogConcave::indicator(box(-1, -1, 1, 1)));
  double h = 0.01;
  REQUIRE(sup_convolution_mass(sq, box(-1, -1, 1, 1), 0.0, h) == Approx(4.0).epsilon(0.01));
  // Two unit disks: area of the radius-2 disk.
  Polygon B = disk_polygon(1.0, 256);
  auto disk = LogConcave(PolyhedralLogConcave::indicator(B));
  REQUIRE(sup_convolution_mass(disk, B, 1.0, 2 * h) == Approx(4 * pi).epsilon(0.02));
  // Square ⊕ t·square is the square of side 2 + 2t.
  REQUIRE(sup_convolution_mass(sq, box(-1, -1, 1, 1), 0.25, h) == Approx(6.25).epsilon(0.01));
}
