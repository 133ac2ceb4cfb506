#include "catch_amalgamated.hpp"

#include "blaschke_lab/convex2d.hpp"
#include "test_util.hpp"

using namespace blaschke_lab;
using Catch::Approx;

namespace {

Polygon square2() { return box(-1, -1, 1, 1); }

Polygon rotated_square() {
  return Polygon({{std::sqrt(2.0), 0.0}, {0.0, std::sqrt(2.0)}, {-std::sqrt(2.0), 0.0}, {0.0, -std::sqrt(2.0)}});
}

} // namespace

TEST_CASE("polygon normalization", "[convex2d]") {
  Polygon cw({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  REQUIRE(area(cw) == Approx(1.0));
  Polygon collinear({{0, 0}, {0.5, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 1}});
  REQUIRE(collinear.size() == 4);
  REQUIRE_THROWS_AS(Polygon({{0, 0}, {2, 0}, {1, 0.2}, {2, 2}, {0, 2}}), InvalidPolygon);
  REQUIRE_THROWS_AS(Polygon({{0, 0}, {1, 0}, {2, 0}}), InvalidPolygon);
}

TEST_CASE("support function", "[convex2d]") {
  REQUIRE(support(square2(), {1, 0}) == 1.0);
  REQUIRE(support(square2(), {1, 1}) == 2.0);
  Polygon tri({{0, 0}, {1, 0}, {0, 1}});
  REQUIRE(support(tri, {-1, -1}) == test_util::sampled_support(tri, {-1, -1}));
  REQUIRE(support(tri, {-1, -1}) == 0.0);
  std::mt19937_64 rng(7);
  Polygon P = test_util::random_polygon(rng);
  REQUIRE(support(P, {2.0, -1.0}) == Approx(2.0 * support(P, {1.0, -0.5})));
}

TEST_CASE("surface area measure", "[convex2d]") {
  auto S = surface_area_measure(square2());
  REQUIRE(S.atoms.size() == 4);
  for (const auto& a : S.atoms) REQUIRE(a.mass == Approx(2.0));

  Polygon tri({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}});
  auto T = surface_area_measure(tri);
  REQUIRE(T.atoms.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    REQUIRE(T.atoms[i].mass == Approx(1.0));
    double gap = angle_of(T.atoms[(i + 1) % 3].direction) - angle_of(T.atoms[i].direction);
    if (gap < 0) gap += 2 * pi;
    REQUIRE(gap == Approx(2 * pi / 3));
  }

  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    Polygon P = test_util::random_polygon(rng, 6 + k % 7);
    auto M = surface_area_measure(P);
    REQUIRE(norm(M.moment()) <= 1e-12 * perimeter(P));
    REQUIRE(M.total() == Approx(perimeter(P)).epsilon(1e-14));
  }
}

TEST_CASE("planar Minkowski problem", "[convex2d]") {
  SphereMeasure2 S{{{{1, 0}, 2}, {{0, 1}, 2}, {{-1, 0}, 2}, {{0, -1}, 2}}};
  Polygon K = minkowski_problem_2d(S);
  REQUIRE(hausdorff_distance(K, square2()) < 1e-12);

  double m = 1.7;
  SphereMeasure2 T;
  for (int k = 0; k < 3; ++k) T.atoms.push_back({unit(pi / 2 + 2 * pi * k / 3), m});
  Polygon tri = minkowski_problem_2d(T);
  REQUIRE(tri.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) REQUIRE(norm(tri.edge(i)) == Approx(m));

  SphereMeasure2 half{{{{1, 0}, 1}, {{0, 1}, 1}, {{-1, 0}, 1}}};
  REQUIRE_THROWS_AS(minkowski_problem_2d(half), DegenerateSpan);
  SphereMeasure2 off{{{{1, 0}, 1}, {{0, 1}, 1}, {{-1, 0}, 1}, {{0, -1}, 2}}};
  REQUIRE_THROWS_AS(minkowski_problem_2d(off), NotCentered);

  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    Polygon P = test_util::random_polygon(rng, 5 + k % 9);
    Polygon Q = minkowski_problem_2d(surface_area_measure(P));
    Polygon Pa = translate(P, -steiner_point(P));
    REQUIRE(hausdorff_distance(Q, Pa) <= 1e-9 * diameter(P));
    REQUIRE(norm(steiner_point(Q)) < 1e-12);
  }
}

TEST_CASE("classical Blaschke sum and scale", "[convex2d]") {
  REQUIRE(hausdorff_distance(blaschke_sum_2d(square2(), square2()), box(-2, -2, 2, 2)) < 1e-12);

  Polygon D = disk_polygon(1.0, 64);
  REQUIRE(hausdorff_distance(blaschke_sum_2d(D, D), disk_polygon(2.0, 64)) < 1e-3);

  Polygon oct = blaschke_sum_2d(square2(), rotated_square());
  REQUIRE(oct.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    REQUIRE(norm(oct.edge(i)) == Approx(2.0));
    double turn = std::atan2(cross(oct.normal(i), oct.normal(i + 1)), dot(oct.normal(i), oct.normal(i + 1)));
    REQUIRE(turn == Approx(pi / 4));
  }

  std::mt19937_64 rng(5);
  Polygon P = test_util::random_polygon(rng);
  REQUIRE(hausdorff_distance(blaschke_scale_2d(P, 1.0), P) == 0.0);
  auto S1 = surface_area_measure(blaschke_scale_2d(P, 2.5));
  auto S0 = surface_area_measure(P);
  REQUIRE(S1.atoms.size() == S0.atoms.size());
  for (std::size_t i = 0; i < S0.atoms.size(); ++i) REQUIRE(std::abs(S1.atoms[i].mass - 2.5 * S0.atoms[i].mass) < 1e-12 * S0.total());

  Polygon A = test_util::random_polygon(rng), B = test_util::random_polygon(rng), C = test_util::random_polygon(rng);
  auto SA = surface_area_measure(A), SB = surface_area_measure(B), SC = surface_area_measure(C);
  auto lhs = (SA + SB) + SC, rhs = SA + (SB + SC);
  REQUIRE(lhs.atoms.size() == rhs.atoms.size());
  REQUIRE(hausdorff_distance(blaschke_sum_2d(A, B), blaschke_sum_2d(B, A)) < 1e-12);
}

TEST_CASE("Minkowski sum, reflection and symmetral", "[convex2d]") {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 20; ++k) {
    Polygon K = test_util::random_polygon(rng), L = test_util::random_polygon(rng);
    Polygon S = minkowski_sum(K, L);
    for (int j = 0; j < 90; ++j) {
      Vec2 u = unit(2 * pi * j / 90);
      REQUIRE(support(S, u) == Approx(support(K, u) + support(L, u)).margin(1e-12));
    }
    Vec2 u = normalized(Vec2{0.3, -0.8});
    REQUIRE(hausdorff_distance(reflect(reflect(K, u), u), K) < 1e-14);
  }
  Polygon sym({{-1, -0.5}, {1, -0.5}, {0.4, 1.0}, {-0.4, 1.0}});
  REQUIRE(hausdorff_distance(minkowski_symmetral(sym, {1, 0}), sym) < 1e-14);
  Polygon sq = translate(square2(), {0.7, -0.3});
  REQUIRE(hausdorff_distance(minkowski_symmetral(sq, {1, 0}), translate(square2(), {0.0, -0.3})) < 1e-14);
}

TEST_CASE("projection body", "[convex2d]") {
  REQUIRE(hausdorff_distance(projection_body_2d(surface_area_measure(square2())), box(-2, -2, 2, 2)) < 1e-14);
  Polygon D = disk_polygon(0.8, 256);
  REQUIRE(hausdorff_distance(projection_body_2d(surface_area_measure(D)), disk_polygon(1.6, 256)) < 1e-3);

  std::mt19937_64 rng(17);
  for (int k = 0; k < 10; ++k) {
    Polygon K = test_util::random_polygon(rng), L = test_util::random_polygon(rng);
    auto SK = surface_area_measure(K), SL = surface_area_measure(L);
    Polygon lhs = projection_body_2d(SK + SL);
    Polygon rhs = minkowski_sum(projection_body_2d(SK), projection_body_2d(SL));
    REQUIRE(hausdorff_distance(lhs, rhs) < 1e-12);
    Polygon P = projection_body_2d(SK);
    for (int j = 0; j < 360; ++j) {
      Vec2 u = unit(2 * pi * j / 360);
      double h = 0;
      for (const auto& a : SK.atoms) h += 0.5 * a.mass * std::abs(dot(a.direction, u));
      REQUIRE(support(P, u) == Approx(h).epsilon(1e-12));
      REQUIRE(support(P, u) == Approx(support(P, -u)).epsilon(1e-12));
    }
  }
}

TEST_CASE("polar body", "[convex2d]") {
  Polygon cross_poly({{1, 0}, {0, 1}, {-1, 0}, {0, -1}});
  REQUIRE(hausdorff_distance(polar(square2()), cross_poly) < 1e-15);
  std::mt19937_64 rng(19);
  Polygon K = translate(test_util::random_polygon(rng), {0, 0});
  K = translate(K, -centroid(K));
  REQUIRE(hausdorff_distance(polar(polar(K)), K) < 1e-12);
  Polygon D = disk_polygon(2.0, 512);
  Polygon PD = polar(D);
  for (Vec2 v : PD.vertices()) REQUIRE(norm(v) == Approx(0.5).epsilon(1e-4));
  REQUIRE_THROWS_AS(polar(box(1, 1, 2, 2)), OriginOutside);
}

TEST_CASE("Steiner point", "[convex2d]") {
  REQUIRE(norm(steiner_point(square2())) < 1e-15);
  Polygon tri({{0, 0}, {3, 0}, {0.5, 2}});
  Vec2 q = test_util::steiner_quadrature(tri);
  REQUIRE(norm(steiner_point(tri) - q) < 1e-8);
  Vec2 v{1.5, -2.25};
  REQUIRE(norm(steiner_point(translate(tri, v)) - (steiner_point(tri) + v)) < 1e-13);
  Mat2 R = Mat2::rotation(0.83);
  REQUIRE(norm(steiner_point(linear_image(tri, R)) - R * steiner_point(tri)) < 1e-12);
}

TEST_CASE("classical Kneser-Suss margin", "[convex2d]") {
  std::mt19937_64 rng(23);
  Polygon K = test_util::random_polygon(rng);
  REQUIRE(std::abs(classical_ks_margin(K, K, 0.3)) < 1e-9);
  REQUIRE(std::abs(classical_ks_margin(K, scale(K, 2.0), 0.6)) < 1e-9);
  REQUIRE(classical_ks_margin(square2(), rotated_square(), 0.5) > 1e-3);
  Polygon L = test_util::random_polygon(rng);
  REQUIRE(std::abs(classical_ks_margin(K, L, 0.0)) < 1e-12);
  REQUIRE(std::abs(classical_ks_margin(K, L, 1.0)) < 1e-12);
  for (int k = 0; k < 50; ++k) {
    Polygon A = test_util::random_polygon(rng), B = test_util::random_polygon(rng);
    REQUIRE(classical_ks_margin(A, B, 0.05 + 0.9 * (k % 10) / 9.0) >= -1e-9);
  }
}
