#ifndef BLASCHKE_LAB_FUNCTIONALS_HPP
#define BLASCHKE_LAB_FUNCTIONALS_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "logconcave.hpp"
#include "measures.hpp"

namespace blaschke_lab {

/// Star body sampled at N equally spaced angles; ρ is interpolated linearly in the angle.
class StarBody {
 public:
  StarBody() = default;
  explicit StarBody(std::vector<double> rho) : rho_(std::move(rho)) {
    if (rho_.size() < 8) throw InvalidFunction("star body needs at least 8 directions");
    for (double r : rho_)
      if (!(r > 0.0) || !std::isfinite(r)) throw InvalidFunction("star body radii must be positive");
  }
  static StarBody round(int n, double r = 1.0) { return StarBody(std::vector<double>(static_cast<std::size_t>(n), r)); }

  int size() const { return static_cast<int>(rho_.size()); }
  const std::vector<double>& radii() const { return rho_; }
  double step() const { return 2.0 * pi / size(); }
  Vec2 direction(int k) const { return unit(step() * k); }

  double radius(double alpha) const {
    double x = alpha / step();
    double fl = std::floor(x);
    int l = static_cast<int>(fl) % size();
    if (l < 0) l += size();
    double t = x - fl;
    return (1.0 - t) * rho_[l] + t * rho_[(l + 1) % size()];
  }
  /// h_{Q°}(x) = |x|/ρ(x/|x|).
  double polar_support(Vec2 x) const {
    double r = norm(x);
    return r == 0.0 ? 0.0 : r / radius(angle_of(x));
  }
  /// (1/2)Σ ρ_k² Δ.
  double volume() const {
    double s = 0.0;
    for (double r : rho_) s += r * r;
    return 0.5 * s * step();
  }
  /// Centroid of the sampled body, (1/3)Σ ρ_k³ u_k Δ / volume.
  Vec2 centroid() const {
    Vec2 m;
    for (int k = 0; k < size(); ++k) m += std::pow(rho_[k], 3) * direction(k);
    return (step() / 3.0) * m / volume();
  }
  double mean_radius() const {
    double s = 0.0;
    for (double r : rho_) s += r;
    return s / size();
  }
  /// Image under a linear map: ρ_{TQ}(u) = ρ_Q(v/|v|)/|v| with v = T⁻¹u, resampled on the same grid.
  StarBody linear_image(const Mat2& T, int n = 0) const {
    if (n == 0) n = size();
    Mat2 Ti = T.inverse();
    std::vector<double> r(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      Vec2 v = Ti * unit(2.0 * pi * k / n);
      r[k] = radius(angle_of(v)) / norm(v);
    }
    return StarBody(std::move(r));
  }

 private:
  std::vector<double> rho_;
};

/// The part of a pair that Ω_Q sees: weights on directions (w = a|z| for μ, b for ν).
struct DirectionalAtom {
  double angle = 0.0;
  double w = 0.0;
};

inline std::vector<DirectionalAtom> directional_atoms(const SurfaceAreaPair& p) {
  std::vector<DirectionalAtom> out;
  for (const auto& m : p.mu) {
    double r = norm(m.z);
    if (r > 0.0 && m.a > 0.0) out.push_back({angle_of(m.z), m.a * r});
  }
  for (const auto& n : p.nu)
    if (n.b > 0.0) out.push_back({angle_of(n.theta), n.b});
  return out;
}

/// Radial pairs spread W₁ uniformly; a midpoint rule with 16 nodes per grid cell integrates 1/ρ.
inline std::vector<DirectionalAtom> directional_atoms(const RadialPair& p, int grid = 180) {
  if (p.dim != 2) throw LayoutMismatch("planar star bodies need a dimension-2 pair");
  double W = quermassintegral_W1(p);
  int m = 16 * grid;
  std::vector<DirectionalAtom> out;
  if (W > 0.0)
    for (int k = 0; k < m; ++k) out.push_back({2.0 * pi * (k + 0.5) / m, W / m});
  return out;
}

/// Atoms pushed forward by an orthogonal map M: Ω_{M⁻¹Q}(f) = Ω_Q(M f) for the moved atoms.
inline std::vector<DirectionalAtom> transformed(std::vector<DirectionalAtom> atoms, const Mat2& M) {
  for (auto& a : atoms) a.angle = angle_of(M * unit(a.angle));
  return atoms;
}

/// Atoms of f∘T from those of f: a direction θ goes to Tᵀθ/|Tᵀθ| with weight w|Tᵀθ|/|det T|
/// (gradients z ↦ Tᵀz with cell masses over |det T|; facets by Nanson's formula).
inline std::vector<DirectionalAtom> pullback(std::vector<DirectionalAtom> atoms, const Mat2& T) {
  double det = std::abs(T.det());
  if (!(det > 0.0) || !std::isfinite(det)) throw SingularTransform("det T = 0");
  Mat2 Tt = T.transpose();
  for (auto& a : atoms) {
    Vec2 v = Tt * unit(a.angle);
    a.angle = angle_of(v);
    a.w *= norm(v) / det;
  }
  return atoms;
}

/// δ(f, 1_{Q°}) from the directional weights.
inline double polar_first_variation(const std::vector<DirectionalAtom>& atoms, const StarBody& Q) {
  double s = 0.0;
  for (const auto& a : atoms) s += a.w / Q.radius(a.angle);
  return s;
}

/// Ω_Q(f) = δ(f, 1_{Q°}) vol(Q)^{1/2}.
inline double omega_Q(const std::vector<DirectionalAtom>& atoms, const StarBody& Q) {
  return polar_first_variation(atoms, Q) * std::sqrt(Q.volume());
}
inline double omega_Q(const SurfaceAreaPair& p, const StarBody& Q) { return omega_Q(directional_atoms(p), Q); }
inline double omega_Q(const RadialPair& p, const StarBody& Q) { return omega_Q(directional_atoms(p, Q.size()), Q); }
inline double omega_Q(const PolyhedralLogConcave& f, const StarBody& Q) { return omega_Q(extract_pair(f), Q); }

/// Ω_♯ of a radial function in dimension n: (nωₙ)^{1/(n+1)} W₁^{n/(n+1)}.
inline double radial_affine_surface_area(int n, double W1) {
  return std::pow(sphere_area(n), 1.0 / (n + 1)) * std::pow(W1, static_cast<double>(n) / (n + 1));
}

inline double affine_isoperimetric_bound(const SurfaceAreaPair& p) {
  return radial_affine_surface_area(p.dim, quermassintegral_W1(p));
}
inline double affine_isoperimetric_bound(const RadialPair& p) {
  return radial_affine_surface_area(p.dim, quermassintegral_W1(p));
}
inline double affine_isoperimetric_bound(const PolyhedralLogConcave& f) { return affine_isoperimetric_bound(extract_pair(f)); }
inline double affine_isoperimetric_bound(const RadialLogConcave& f) {
  return affine_isoperimetric_bound(extract_radial_pair(f));
}

/// Ω_♯ = 2^{1/3} (inf Ω_Q)^{2/3} in the plane.
inline double omega_sharp_from_inf(double inf_omega_Q) { return std::cbrt(2.0) * std::pow(inf_omega_Q, 2.0 / 3.0); }

// ---------------------------------------------------------------------------
// Optimizer over star bodies

struct OmegaConfig {
  int grid = 180;
  int max_iterations = 3000;
  double rel_tol = 1e-11;      // per-iteration decrease counted as "no progress"
  int patience = 15;           // consecutive no-progress iterations before stopping
  double floor_log = 30.0;     // ρ_k ≥ e^{−30} max ρ
  int spike_seeds = 4;
  std::vector<StarBody> extra_seeds;
};

struct OmegaResult {
  double value = 0.0;    // Ω_♯ estimate (G_♯ for the geominimal optimizer)
  double inf_omega = 0.0;  // best Ω_Q found
  StarBody Q;
  bool stalled = false;
  int iterations = 0;
};

namespace detail {

struct AtomIndex {
  int l = 0;
  double t = 0.0;
  double w = 0.0;
};

inline std::vector<AtomIndex> index_atoms(const std::vector<DirectionalAtom>& atoms, int n) {
  std::vector<AtomIndex> out;
  double d = 2.0 * pi / n;
  for (const auto& a : atoms) {
    double x = a.angle / d;
    double fl = std::floor(x);
    int l = static_cast<int>(fl) % n;
    if (l < 0) l += n;
    out.push_back({l, x - fl, a.w});
  }
  return out;
}

class OmegaProblem {
 public:
  OmegaProblem(const std::vector<DirectionalAtom>& atoms, int n, bool convex, double floor_log)
      : n_(n), convex_(convex), floor_log_(floor_log), atoms_(index_atoms(atoms, n)) {
    for (int k = 0; k < n; ++k) dirs_.push_back(unit(2.0 * pi * k / n));
  }

  /// log δ + ½ log V; invariant under s ↦ s + const.
  double objective(const std::vector<double>& s) const {
    std::vector<double> rho = exp_all(s);
    double D = 0.0;
    for (const auto& a : atoms_) D += a.w / ((1.0 - a.t) * rho[a.l] + a.t * rho[(a.l + 1) % n_]);
    return std::log(D) + 0.5 * std::log(volume(rho));
  }

  std::vector<double> gradient(const std::vector<double>& s) const {
    std::vector<double> rho = exp_all(s), g(static_cast<std::size_t>(n_), 0.0);
    double D = 0.0;
    for (const auto& a : atoms_) {
      int l1 = (a.l + 1) % n_;
      double r = (1.0 - a.t) * rho[a.l] + a.t * rho[l1];
      double q = a.w / r;
      D += q;
      g[a.l] -= q / r * (1.0 - a.t) * rho[a.l];
      g[l1] -= q / r * a.t * rho[l1];
    }
    double V = volume(rho), d = 2.0 * pi / n_;
    for (int k = 0; k < n_; ++k) g[k] = g[k] / D + rho[k] * rho[k] * d / (2.0 * V);
    return g;
  }

  /// Centroid to the origin (ρ³-weighted first mode, three passes), floor clamp, convexification
  /// when required, and the scale gauge vol = π.
  std::vector<double> project(std::vector<double> s) const {
    int rounds = convex_ ? 4 : 1;
    for (int r = 0; r < rounds; ++r) {
      for (int pass = 0; pass < 3; ++pass) center(s);
      clamp(s);
      if (convex_) convexify(s);
    }
    std::vector<double> rho = exp_all(s);
    double shift = 0.5 * std::log(volume(rho) / pi);
    for (double& v : s) v -= shift;
    return s;
  }

  int size() const { return n_; }

 private:
  std::vector<double> exp_all(const std::vector<double>& s) const {
    std::vector<double> r(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) r[k] = std::exp(s[k]);
    return r;
  }
  double volume(const std::vector<double>& rho) const {
    double v = 0.0;
    for (double r : rho) v += r * r;
    return 0.5 * v * 2.0 * pi / n_;
  }
  void center(std::vector<double>& s) const {
    double smax = *std::max_element(s.begin(), s.end());
    double mxx = 0, mxy = 0, myy = 0;
    Vec2 m;
    for (int k = 0; k < n_; ++k) {
      double w = std::exp(3.0 * (s[k] - smax));
      Vec2 u = dirs_[k];
      mxx += w * u.x * u.x; mxy += w * u.x * u.y; myy += w * u.y * u.y;
      m += w * u;
    }
    double det = mxx * myy - mxy * mxy;
    if (!(det > 0.0)) return;
    Vec2 c{(myy * m.x - mxy * m.y) / det, (mxx * m.y - mxy * m.x) / det};
    for (int k = 0; k < n_; ++k) s[k] -= dot(c, dirs_[k]) / 3.0;
  }
  void clamp(std::vector<double>& s) const {
    double lo = *std::max_element(s.begin(), s.end()) - floor_log_;
    for (double& v : s) v = std::max(v, lo);
  }
  /// h = 1/ρ replaced by the support values of ∩{⟨x,u_k⟩ ≤ h_k}.
  void convexify(std::vector<double>& s) const {
    double hmax = 0.0;
    for (double v : s) hmax = std::max(hmax, std::exp(-v));
    Region P = square_region(4.0 * hmax, 0);
    for (int k = 0; k < n_; ++k) P = clip(P, Halfplane{dirs_[k], std::exp(-s[k])}, 0);
    if (P.size() < 3) return;
    for (int k = 0; k < n_; ++k) {
      double h = -inf;
      for (Vec2 v : P.vertices) h = std::max(h, dot(v, dirs_[k]));
      s[k] = std::max(s[k], -std::log(h));
    }
  }

  int n_;
  bool convex_;
  double floor_log_;
  std::vector<AtomIndex> atoms_;
  std::vector<Vec2> dirs_;
};

struct DescentResult {
  std::vector<double> s;
  double F = inf;
  bool converged = false;
  int iterations = 0;
};

inline DescentResult projected_descent(const OmegaProblem& prob, std::vector<double> s, const OmegaConfig& cfg) {
  DescentResult r;
  s = prob.project(std::move(s));
  double F = prob.objective(s);
  double eta = 1.0;
  int quiet = 0;
  int it = 0;
  for (; it < cfg.max_iterations; ++it) {
    std::vector<double> g = prob.gradient(s);
    bool accepted = false;
    while (eta > 1e-14) {
      std::vector<double> trial(s.size());
      for (std::size_t k = 0; k < s.size(); ++k) trial[k] = s[k] - eta * g[k];
      trial = prob.project(std::move(trial));
      double pred = 0.0;
      for (std::size_t k = 0; k < s.size(); ++k) pred += g[k] * (s[k] - trial[k]);
      double Ft = prob.objective(trial);
      if (std::isfinite(Ft) && Ft < F - 1e-4 * std::max(pred, 0.0)) {
        quiet = F - Ft <= cfg.rel_tol * (1.0 + std::abs(F)) ? quiet + 1 : 0;
        s = std::move(trial);
        F = Ft;
        eta = std::min(2.0 * eta, 1e4);
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted || quiet >= cfg.patience) {
      r.converged = true;
      break;
    }
  }
  r.s = std::move(s);
  r.F = F;
  r.iterations = it;
  return r;
}

inline std::vector<double> log_radii(const StarBody& Q, int n) {
  std::vector<double> s(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) s[k] = std::log(Q.radius(2.0 * pi * k / n));
  return s;
}

/// Round seed, then spike profiles at the heaviest grid directions (log-amplitudes 1..spike_seeds),
/// then caller-supplied seeds. Returns the best star body.
inline OmegaResult minimize_omega(const std::vector<DirectionalAtom>& atoms, const OmegaConfig& cfg, bool convex) {
  int n = cfg.grid;
  OmegaProblem prob(atoms, n, convex, cfg.floor_log);
  std::vector<std::vector<double>> seeds;
  seeds.push_back(std::vector<double>(static_cast<std::size_t>(n), 0.0));
  std::vector<double> heavy(static_cast<std::size_t>(n), 0.0);
  for (const auto& a : index_atoms(atoms, n)) {
    heavy[a.l] += (1.0 - a.t) * a.w;
    heavy[(a.l + 1) % n] += a.t * a.w;
  }
  double hmax = *std::max_element(heavy.begin(), heavy.end());
  if (hmax > 0.0)
    for (int A = 1; A <= cfg.spike_seeds; ++A) {
      std::vector<double> s(static_cast<std::size_t>(n), 0.0);
      for (int k = 0; k < n; ++k)
        if (heavy[k] >= 0.25 * hmax) s[k] = A;
      seeds.push_back(std::move(s));
    }
  for (const auto& Q : cfg.extra_seeds) seeds.push_back(log_radii(Q, n));

  OmegaResult best;
  best.inf_omega = inf;
  bool any_converged = false, best_converged = false;
  for (const auto& seed : seeds) {
    DescentResult d = projected_descent(prob, seed, cfg);
    best.iterations += d.iterations;
    any_converged = any_converged || d.converged;
    double val = std::exp(d.F);  // vol normalized to π, so exp(F) = Ω_Q
    if (val < best.inf_omega) {
      best.inf_omega = val;
      std::vector<double> rho(d.s.size());
      for (std::size_t k = 0; k < rho.size(); ++k) rho[k] = std::exp(d.s[k]);
      best.Q = StarBody(std::move(rho));
      best_converged = d.converged;
    }
  }
  best.inf_omega = omega_Q(atoms, best.Q);
  best.stalled = !best_converged;
  return best;
}

} // namespace detail

/// Upper bound on Ω_♯ from projected descent over star bodies with centroid at the origin.
inline OmegaResult affine_surface_area(const std::vector<DirectionalAtom>& atoms, const OmegaConfig& cfg = {}) {
  OmegaResult r = detail::minimize_omega(atoms, cfg, false);
  r.value = omega_sharp_from_inf(r.inf_omega);
  return r;
}
inline OmegaResult affine_surface_area(const SurfaceAreaPair& p, const OmegaConfig& cfg = {}) {
  return affine_surface_area(directional_atoms(p), cfg);
}
inline OmegaResult affine_surface_area(const PolyhedralLogConcave& f, const OmegaConfig& cfg = {}) {
  return affine_surface_area(extract_pair(f), cfg);
}
/// Planar radial functions go through the optimizer like any other; other dimensions have no
/// star-body grid and return the closed form.
inline OmegaResult affine_surface_area(const RadialLogConcave& f, const OmegaConfig& cfg = {}) {
  RadialPair p = extract_radial_pair(f);
  if (p.dim == 2) return affine_surface_area(directional_atoms(p, cfg.grid), cfg);
  OmegaResult r;
  r.value = radial_affine_surface_area(p.dim, quermassintegral_W1(p));
  r.inf_omega = std::pow(r.value / std::pow(p.dim, 1.0 / (p.dim + 1)), (p.dim + 1.0) / p.dim);
  return r;
}

/// Upper bound on G_♯ = inf over convex Q of δ(f, 1_{Q°}) (vol Q / π)^{1/2}.
inline OmegaResult geominimal_surface_area(const std::vector<DirectionalAtom>& atoms, const OmegaConfig& cfg = {}) {
  OmegaResult r = detail::minimize_omega(atoms, cfg, true);
  r.value = r.inf_omega / std::sqrt(pi);
  return r;
}
inline OmegaResult geominimal_surface_area(const SurfaceAreaPair& p, const OmegaConfig& cfg = {}) {
  return geominimal_surface_area(directional_atoms(p), cfg);
}
inline OmegaResult geominimal_surface_area(const PolyhedralLogConcave& f, const OmegaConfig& cfg = {}) {
  return geominimal_surface_area(extract_pair(f), cfg);
}
inline OmegaResult geominimal_surface_area(const RadialLogConcave& f, const OmegaConfig& cfg = {}) {
  return geominimal_surface_area(directional_atoms(extract_radial_pair(f), cfg.grid), cfg);
}

// ---------------------------------------------------------------------------
// Entropy identity

struct EntropyIdentity {
  double delta = 0.0;  // δ(f, f)
  double rhs = 0.0;    // J(n + log J) + Ent
  double relative_error = 0.0;
};

namespace detail {
inline EntropyIdentity finish_identity(double d, double J, int n, double ent) {
  EntropyIdentity e;
  e.delta = d;
  e.rhs = J * (n + std::log(J)) + ent;
  e.relative_error = std::abs(e.delta - e.rhs) / std::max({std::abs(e.delta), std::abs(e.rhs), J});
  return e;
}
} // namespace detail

inline EntropyIdentity entropy_identity_check(const PolyhedralLogConcave& f) {
  double J = mass(f);
  return detail::finish_identity(first_variation(extract_pair(f), f), J, 2, entropy(f));
}

inline EntropyIdentity entropy_identity_check(const RadialLogConcave& f) {
  double J = mass(f);
  return detail::finish_identity(first_variation(extract_radial_pair(f), f), J, f.dim(), entropy(f));
}

} // namespace blaschke_lab

#endif
