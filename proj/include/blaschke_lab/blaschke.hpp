#ifndef BLASCHKE_LAB_BLASCHKE_HPP
#define BLASCHKE_LAB_BLASCHKE_HPP

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "convex2d.hpp"
#include "functionals.hpp"
#include "logconcave.hpp"
#include "measures.hpp"
#include "solver.hpp"

namespace blaschke_lab {

// ---------------------------------------------------------------------------
// Pair level

/// ½p + ½R_u p.
inline SurfaceAreaPair symmetral_pair(const SurfaceAreaPair& p, Vec2 u) { return 0.5 * p + 0.5 * reflect(p, u); }

inline SurfaceAreaPair pair_of(const PolyhedralLogConcave& f) { return extract_pair(f); }
inline RadialPair pair_of(const RadialLogConcave& f) { return extract_radial_pair(f); }

inline Solved<PolyhedralLogConcave> solve(const SurfaceAreaPair& p, const SolverConfig& cfg = {}) {
  return solve_polyhedral(p, cfg);
}
inline Solved<RadialLogConcave> solve(const RadialPair& p, const SolverConfig& cfg = {}) { return solve_radial(p, cfg); }

namespace detail {
inline void require_positive(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidFunction("homothety factor must be positive");
}
} // namespace detail

// ---------------------------------------------------------------------------
// ♯, ⊙ and B_u^♯ on functions. Outputs are Steiner-gauged (radial outputs are centered).

template <class F>
auto blaschke_sum(const F& f1, const F& f2, const SolverConfig& cfg = {}) {
  return solve(pair_of(f1) + pair_of(f2), cfg);
}

template <class F>
auto blaschke_homothety(double lambda, const F& f, const SolverConfig& cfg = {}) {
  detail::require_positive(lambda);
  return solve(lambda * pair_of(f), cfg);
}

inline Solved<PolyhedralLogConcave> blaschke_symmetral(Vec2 u, const PolyhedralLogConcave& f,
                                                       const SolverConfig& cfg = {}) {
  return solve(symmetral_pair(extract_pair(f), u), cfg);
}

/// Radial functions are reflection invariant, so the averaged pair is their own.
inline Solved<RadialLogConcave> blaschke_symmetral(Vec2, const RadialLogConcave& f, const SolverConfig& cfg = {}) {
  return solve(extract_radial_pair(f), cfg);
}

inline LogConcave blaschke_sum(const LogConcave& f1, const LogConcave& f2, const SolverConfig& cfg = {}) {
  if (f1.index() != f2.index()) throw LayoutMismatch("Blaschke sum of a polyhedral and a radial function");
  if (const auto* p = std::get_if<PolyhedralLogConcave>(&f1))
    return blaschke_sum(*p, std::get<PolyhedralLogConcave>(f2), cfg).function;
  return blaschke_sum(std::get<RadialLogConcave>(f1), std::get<RadialLogConcave>(f2), cfg).function;
}

inline LogConcave blaschke_homothety(double lambda, const LogConcave& f, const SolverConfig& cfg = {}) {
  return std::visit([&](const auto& g) -> LogConcave { return blaschke_homothety(lambda, g, cfg).function; }, f);
}

inline LogConcave blaschke_symmetral(Vec2 u, const LogConcave& f, const SolverConfig& cfg = {}) {
  return std::visit([&](const auto& g) -> LogConcave { return blaschke_symmetral(u, g, cfg).function; }, f);
}

/// f^♯: the radial function whose pair is the Haar average of (μ_f, ν_f).
inline Solved<RadialLogConcave> mean_blaschke_symmetral(const PolyhedralLogConcave& f, const SolverConfig& cfg = {}) {
  return solve_radial(haar_average(extract_pair(f)), cfg);
}
inline Solved<RadialLogConcave> mean_blaschke_symmetral(const RadialLogConcave& f, const SolverConfig& cfg = {}) {
  return solve_radial(extract_radial_pair(f), cfg);
}
inline Solved<RadialLogConcave> mean_blaschke_symmetral(const LogConcave& f, const SolverConfig& cfg = {}) {
  return std::visit([&](const auto& g) { return mean_blaschke_symmetral(g, cfg); }, f);
}

// ---------------------------------------------------------------------------
// Indicator closed form

struct IndicatorSum {
  double scale = 0.0;  // c = λ^{−1}
  Polygon body;        // λ (K # L)
};

/// 1_K ♯ 1_L = λ^{−1} 1_{λ(K#L)} with λ = (vol K + vol L)/vol(K#L).
inline IndicatorSum indicator_sum_closed_form(const Polygon& K, const Polygon& L) {
  Polygon M = blaschke_sum_2d(K, L);
  double lambda = (area(K) + area(L)) / area(M);
  return {1.0 / lambda, scale(M, lambda)};
}

// ---------------------------------------------------------------------------
// Projection body and LYZ body

/// Sphere measure {(z/|z|, a|z|)} ∪ ν: the boundary measure of ⟨f⟩.
inline SphereMeasure2 lyz_measure(const SurfaceAreaPair& p) {
  std::vector<SphereAtom> atoms;
  for (const auto& m : p.mu) {
    double r = norm(m.z);
    if (r > 0.0 && m.a > 0.0) atoms.push_back({m.z / r, m.a * r});
  }
  for (const auto& n : p.nu) atoms.push_back({n.theta, n.b});
  return canonical(std::move(atoms));
}

inline int radial_embedding_directions = 256;

inline SurfaceAreaPair planar_pair(const PolyhedralLogConcave& f) { return extract_pair(f); }
inline SurfaceAreaPair planar_pair(const RadialLogConcave& f) {
  return embed_radial(extract_radial_pair(f), radial_embedding_directions);
}

/// Π_♯^b f: zonotope with h(u) = ½Σ a|⟨z,u⟩| + ½Σ b|⟨θ,u⟩|.
inline Polygon projection_body(const SurfaceAreaPair& p) { return projection_body_2d(lyz_measure(p)); }
template <class F>
Polygon projection_body(const F& f) {
  return projection_body(planar_pair(f));
}

/// ⟨f⟩ with center of mass at the origin.
inline Polygon lyz_body(const SurfaceAreaPair& p) {
  Polygon K = minkowski_problem_2d(lyz_measure(p));
  return translate(K, -centroid(K));
}
template <class F>
Polygon lyz_body(const F& f) {
  return lyz_body(planar_pair(f));
}

/// ∫ exp(−h_Π(x)) dx summed over the normal cones of the zonotope's vertices.
inline double polar_projection_mass(const Polygon& Pi) {
  double s = 0.0;
  std::size_t n = Pi.size();
  for (std::size_t i = 0; i < n; ++i) {
    // Vertex i+1 sits between edges i and i+1.
    Vec2 v = Pi.vertex((i + 1) % n);
    Vec2 n1 = Pi.normal(i), n2 = Pi.normal((i + 1) % n);
    s += std::abs(cross(n1, n2)) / (dot(v, n1) * dot(v, n2));
  }
  return s;
}
template <class F>
double polar_projection_mass(const F& f) {
  return polar_projection_mass(projection_body(f));
}

struct IntertwiningCheck {
  double distance = 0.0;  // Hausdorff(Π(B_u^♯ f), τ_u Π f)
  double diameter = 0.0;
};

/// Left side solves for B_u^♯ f and re-extracts; right side symmetrizes the zonotope of f.
inline IntertwiningCheck symmetral_intertwining_check(const PolyhedralLogConcave& f, Vec2 u,
                                                      const SolverConfig& cfg = {}) {
  Polygon lhs = projection_body(blaschke_symmetral(u, f, cfg).function);
  Polygon Pi = projection_body(f);
  Polygon rhs = minkowski_symmetral(Pi, normalized(u));
  return {hausdorff_distance(lhs, rhs), diameter(Pi)};
}

// ---------------------------------------------------------------------------
// Iterated symmetrization

struct SymmetrizationSchedule {
  std::vector<double> angles;

  static SymmetrizationSchedule golden(int steps) {
    SymmetrizationSchedule s;
    const double g = pi * (std::sqrt(5.0) - 1.0) / 2.0;
    for (int k = 1; k <= steps; ++k) s.angles.push_back(std::fmod(k * g, pi));
    return s;
  }
  static SymmetrizationSchedule from_list(std::vector<double> angles) {
    if (angles.empty()) throw InvalidFunction("schedule needs at least one angle");
    return {std::move(angles)};
  }
  Vec2 direction(std::size_t k) const { return unit(angles[k % angles.size()]); }
};

struct SymmetrizationRecord {
  int step = 0;
  double angle = 0.0;
  double W1 = 0.0;
  double J = 0.0;
  double entropy = 0.0;
  double omega = 0.0;  // Ω_♯ optimizer estimate
  double cosmic = 0.0;  // distance to the Haar-averaged pair
};

struct SymmetrizationTrace {
  std::vector<SymmetrizationRecord> records;
  SurfaceAreaPair final_pair;
  std::optional<PolyhedralLogConcave> final_function;
  bool complete = false;
  std::string failure;
};

struct SymmetrizationConfig {
  int bins = 4096;
  SolverConfig solver;
  OmegaConfig omega;
  bool track_omega = true;
};

namespace detail {

/// Splits every directional atom between its two neighbouring bin directions (radius kept).
inline SurfaceAreaPair quantize_directions(const SurfaceAreaPair& p, int bins) {
  const double d = 2.0 * pi / bins;
  auto split = [&](double alpha, auto&& emit) {
    double x = alpha / d;
    double fl = std::floor(x);
    int l = static_cast<int>(fl) % bins;
    double t = x - fl;
    if (t < 1e-3) emit(l, 1.0);
    else if (t > 1.0 - 1e-3) emit((l + 1) % bins, 1.0);
    else { emit(l, 1.0 - t); emit((l + 1) % bins, t); }
  };
  SurfaceAreaPair q;
  q.dim = p.dim;
  for (const auto& m : p.mu) {
    double r = norm(m.z);
    if (r == 0.0) { q.mu.push_back(m); continue; }
    split(angle_of(m.z), [&](int l, double w) { q.mu.push_back({r * unit(l * d), w * m.a}); });
  }
  for (const auto& n : p.nu)
    split(angle_of(n.theta), [&](int l, double w) { q.nu.push_back({unit(l * d), w * n.b}); });
  return canonical(std::move(q));
}

/// Multiplies atom masses by 1 + ⟨c,θ⟩ + e·[μ] + e'·w with w = |z| − r̄ on μ and 1 on ν, choosing
/// (c, e, e') so that the moment vanishes and J, W₁ hit their targets.
inline SurfaceAreaPair restore_invariants(SurfaceAreaPair p, double J0, double W0) {
  double J = p.mu_total();
  double rbar = 0.0;
  for (const auto& m : p.mu) rbar += m.a * norm(m.z);
  rbar = J > 0.0 ? rbar / J : 0.0;
  Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
  Eigen::Vector4d base = Eigen::Vector4d::Zero();
  auto add = [&](Vec2 pos, double mass, Vec2 dir, double r, bool is_mu) {
    Eigen::Vector4d basis(dir.x, dir.y, is_mu ? 1.0 : 0.0, is_mu ? norm(pos) - rbar : 1.0);
    Eigen::Vector4d row(mass * pos.x, mass * pos.y, is_mu ? mass : 0.0, mass * r);
    A += row * basis.transpose();
    base += row;
  };
  for (const auto& m : p.mu) {
    double r = norm(m.z);
    add(m.z, m.a, r > 0.0 ? m.z / r : Vec2{}, r, true);
  }
  for (const auto& n : p.nu) add(n.theta, n.b, n.theta, 1.0, false);
  Eigen::Vector4d target(0.0, 0.0, J0, W0);
  Eigen::Vector4d x = A.completeOrthogonalDecomposition().solve(target - base);
  for (auto& m : p.mu) {
    double r = norm(m.z);
    Vec2 dir = r > 0.0 ? m.z / r : Vec2{};
    m.a *= 1.0 + x[0] * dir.x + x[1] * dir.y + x[2] + x[3] * (r - rbar);
  }
  for (auto& n : p.nu) n.b *= 1.0 + x[0] * n.theta.x + x[1] * n.theta.y + x[3];
  return p;
}

inline double pair_entropy(const SurfaceAreaPair& p, const SolverConfig& cfg) {
  double J = p.mu_total();
  if (is_indicator_pair(p)) {
    // c·1_K has Ent = J log c − J log J.
    PolyhedralLogConcave f = solve_indicator_pair(p);
    return J * std::log(f.max_value()) - J * std::log(J);
  }
  return entropy(solve_polyhedral(p, cfg).function);
}

} // namespace detail

/// f_k = B_{u_k}^♯ ⋯ B_{u_1}^♯ f at the pair level. Directions are binned after every step (the
/// atom count otherwise doubles) and the binning error in the moment, J and W₁ is removed
/// exactly. The Ω column is swept backwards so that step k also tries the optimum of step k+1
/// and its reflection, which makes it nondecreasing up to binning error.
inline SymmetrizationTrace iterate_symmetrization(const PolyhedralLogConcave& f, const SymmetrizationSchedule& schedule,
                                                  int steps, const SymmetrizationConfig& cfg = {}) {
  SymmetrizationTrace tr;
  SurfaceAreaPair p = extract_pair(f);
  const double J0 = p.mu_total(), W0 = quermassintegral_W1(p);
  const SurfaceAreaPair target = embed_radial(haar_average(p), cfg.bins);
  std::vector<SurfaceAreaPair> pairs;
  std::vector<OmegaResult> omegas;
  OmegaConfig ocfg = cfg.omega;
  auto record = [&](int k, double angle) {
    SymmetrizationRecord r;
    r.step = k;
    r.angle = angle;
    r.W1 = quermassintegral_W1(p);
    r.J = p.mu_total();
    r.entropy = k == 0 ? entropy(f) : detail::pair_entropy(p, cfg.solver);
    r.cosmic = cosmic_distance(p, target);
    if (cfg.track_omega) {
      omegas.push_back(affine_surface_area(p, ocfg));
      ocfg.extra_seeds = {omegas.back().Q};
      r.omega = omegas.back().value;
    }
    pairs.push_back(p);
    tr.records.push_back(r);
  };
  try {
    record(0, 0.0);
    for (int k = 0; k < steps; ++k) {
      Vec2 u = schedule.direction(static_cast<std::size_t>(k));
      p = detail::restore_invariants(detail::quantize_directions(symmetral_pair(p, u), cfg.bins), J0, W0);
      record(k + 1, schedule.angles[static_cast<std::size_t>(k) % schedule.angles.size()]);
    }
    tr.complete = true;
  } catch (const Error& e) {
    tr.failure = e.what();
  }
  if (cfg.track_omega) {
    // Candidate bodies are M·Q_k for orthogonal M; Ω_{M·Q}(g) is evaluated as Ω_Q(Mᵀg).
    std::vector<Mat2> M(omegas.size(), Mat2{});
    for (std::size_t k = omegas.size(); k-- > 1;) {
      Vec2 u = schedule.direction(k - 1);
      Mat2 R{1.0 - 2.0 * u.x * u.x, -2.0 * u.x * u.y, -2.0 * u.x * u.y, 1.0 - 2.0 * u.y * u.y};
      auto atoms = directional_atoms(pairs[k - 1]);
      for (const Mat2& cand : {M[k], R * M[k]}) {
        double v = omega_Q(transformed(atoms, cand.transpose()), omegas[k].Q);
        if (v < omegas[k - 1].inf_omega) {
          omegas[k - 1].inf_omega = v;
          omegas[k - 1].Q = omegas[k].Q;
          M[k - 1] = cand;
          tr.records[k - 1].omega = omega_sharp_from_inf(v);
        }
      }
    }
  }
  tr.final_pair = p;
  if (tr.complete) {
    try {
      tr.final_function = is_indicator_pair(p) ? detail::steiner_gauge(solve_indicator_pair(p))
                                               : solve_polyhedral(p, cfg.solver).function;
    } catch (const Error& e) {
      tr.failure = e.what();
    }
  }
  return tr;
}

} // namespace blaschke_lab

#endif
