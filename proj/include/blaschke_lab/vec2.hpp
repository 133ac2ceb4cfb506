#ifndef BLASCHKE_LAB_VEC2_HPP
#define BLASCHKE_LAB_VEC2_HPP

#include <cmath>
#include <numbers>

namespace blaschke_lab {

inline constexpr double pi = std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
inline Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
inline Vec2& operator+=(Vec2& a, Vec2 b) { a.x += b.x; a.y += b.y; return a; }
inline Vec2& operator-=(Vec2& a, Vec2 b) { a.x -= b.x; a.y -= b.y; return a; }
inline bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline Vec2 normalized(Vec2 a) { return a / norm(a); }

/// Counterclockwise quarter turn.
inline Vec2 rot90(Vec2 a) { return {-a.y, a.x}; }

inline Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Angle of a in [0, 2π).
inline double angle_of(Vec2 a) {
  double t = std::atan2(a.y, a.x);
  return t < 0.0 ? t + 2.0 * pi : t;
}

/// Reflection about the line u⊥ (u unit): x − 2⟨x,u⟩u.
inline Vec2 reflect(Vec2 x, Vec2 u) { return x - 2.0 * dot(x, u) * u; }

/// Row-major 2×2 matrix [[a, b], [c, d]].
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  double det() const { return a * d - b * c; }
  Mat2 transpose() const { return {a, c, b, d}; }
  Mat2 inverse() const {
    double k = 1.0 / det();
    return {d * k, -b * k, -c * k, a * k};
  }
  static Mat2 rotation(double t) {
    return {std::cos(t), -std::sin(t), std::sin(t), std::cos(t)};
  }
};

inline Vec2 operator*(const Mat2& m, Vec2 v) { return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y}; }
inline Mat2 operator*(const Mat2& m, const Mat2& n) {
  return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}

} // namespace blaschke_lab

#endif
