#ifndef BLASCHKE_LAB_NUMERIC_HPP
#define BLASCHKE_LAB_NUMERIC_HPP

#include <algorithm>
#include <cmath>
#include <limits>

#include "vec2.hpp"

namespace blaschke_lab {

inline constexpr double inf = std::numeric_limits<double>::infinity();

/// Volume of the unit ball in R^n.
inline double ball_volume(int n) { return std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0); }

/// Surface area n·ω_n of the unit sphere in R^n.
inline double sphere_area(int n) { return n * ball_volume(n); }

/// Divided difference exp[x0, x1].
inline double exp_dd(double x0, double x1) {
  double m = std::max(x0, x1);
  double h = -std::abs(x1 - x0);
  if (h == 0.0) return std::exp(m);
  return std::exp(m) * (std::expm1(h) / h);
}

/// Divided difference exp[x0, x1, x2]; a series is used when the points span at most 1.
inline double exp_dd(double x0, double x1, double x2) {
  double a = x0, b = x1, c = x2;
  if (a < b) std::swap(a, b);
  if (b < c) std::swap(b, c);
  if (a < b) std::swap(a, b);
  if (a - c <= 1.0) {
    double p = b - a, q = c - a;
    double hk = 1.0, qk = 1.0, fact = 2.0, sum = 0.5;
    for (int k = 1; k < 40; ++k) {
      qk *= q;
      hk = p * hk + qk;
      fact *= (k + 2);
      double term = hk / fact;
      sum += term;
      if (std::abs(term) < 1e-18 * sum) break;
    }
    return std::exp(a) * sum;
  }
  return (exp_dd(b, a) - exp_dd(c, b)) / (a - c);
}

/// Divided difference of x·e^x at three points (Leibniz rule).
inline double xexp_dd(double x0, double x1, double x2) {
  return x0 * exp_dd(x0, x1, x2) + exp_dd(x1, x2);
}

/// ∫_T e^{l} over a triangle where l is affine with vertex values l0, l1, l2.
inline double triangle_exp_integral(double area, double l0, double l1, double l2) {
  return 2.0 * area * exp_dd(l0, l1, l2);
}

/// ∫_T l·e^{l} over a triangle; (x − 2)e^x is the second antiderivative of x e^x.
inline double triangle_xexp_integral(double area, double l0, double l1, double l2) {
  return 2.0 * area * (xexp_dd(l0, l1, l2) - 2.0 * exp_dd(l0, l1, l2));
}

/// ∫_0^1 u^p e^{−xu} du for x ≥ 0.
inline double unit_power_exp(int p, double x) {
  if (x == 0.0) return 1.0 / (p + 1);
  if (x <= 60.0 + p) {
    double term = 1.0 / (p + 1), sum = term;
    for (int k = 1; k < 400; ++k) {
      term *= x / (p + 1 + k);
      sum += term;
      if (term < 1e-18 * sum && k > x) break;
    }
    return std::exp(-x) * sum;
  }
  double e = -std::expm1(-x) / x;
  double ex = std::exp(-x);
  for (int q = 1; q <= p; ++q) e = (q * e - ex) / x;
  return e;
}

/// ∫_0^L t^q e^{−αt} dt; L may be infinite when α > 0.
inline double power_exp_integral(int q, double L, double alpha) {
  if (std::isinf(L)) return std::tgamma(q + 1.0) / std::pow(alpha, q + 1);
  return std::pow(L, q + 1) * unit_power_exp(q, alpha * L);
}

/// ∫_a^{a+L} r^m (r−a)^s e^{−α(r−a)} dr for s ∈ {0, 1}, expanded binomially around a.
inline double shifted_moment(int m, int s, double a, double L, double alpha) {
  double sum = 0.0, binom = 1.0;
  for (int p = 0; p <= m; ++p) {
    if (p > 0) binom = binom * (m - p + 1) / p;
    double coeff = binom * std::pow(a, m - p);
    if (coeff != 0.0) sum += coeff * power_exp_integral(p + s, L, alpha);
  }
  return sum;
}

} // namespace blaschke_lab

#endif
