#ifndef BLASCHKE_LAB_SOLVER_HPP
#define BLASCHKE_LAB_SOLVER_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "logconcave.hpp"
#include "measures.hpp"

namespace blaschke_lab {

struct SolverConfig {
  enum class Jacobian { analytic, finite_difference };

  int max_iterations = 200;
  double residual_tol = 1e-8;
  double damping = 0.5;
  Jacobian jacobian = Jacobian::analytic;
  double fd_step = 1e-6;
  /// Pairs of the form (aδ₀, ν) are solved by the closed form c·1_K instead of Newton.
  bool indicator_fast_path = false;
  /// Smallest accepted line-search step.
  double min_step = std::ldexp(1.0, -40);

  void validate() const {
    if (!(residual_tol > 0.0)) throw InvalidFunction("residual_tol must be positive");
    if (max_iterations < 1) throw InvalidFunction("max_iterations must be at least 1");
    if (!(damping > 0.0 && damping < 1.0)) throw InvalidFunction("damping must lie in (0, 1)");
  }
};

struct SolveStep {
  int iteration = 0;
  double residual = 0.0;
  double step = 0.0;
};

struct SolveTrace {
  std::vector<SolveStep> iterates;
  bool converged = false;
  std::vector<double> final_residual;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, SolveTrace t) : Error("NoConvergence: " + what), trace(std::move(t)) {}
  SolveTrace trace;
};

template <class F>
struct Solved {
  F function;
  SolveTrace trace;
};

inline double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Per-atom relative residual (extracted − target)/target, μ atoms first, then ν atoms.
inline std::vector<double> residual(const SurfaceAreaPair& target, const PolyhedralLogConcave& f) {
  SurfaceAreaPair got = extract_pair(f);
  SurfaceAreaPair tgt = canonical(target);
  if (got.mu.size() != tgt.mu.size() || got.nu.size() != tgt.nu.size())
    throw LayoutMismatch("atom counts differ: mu " + std::to_string(got.mu.size()) + " vs " +
                         std::to_string(tgt.mu.size()) + ", nu " + std::to_string(got.nu.size()) + " vs " +
                         std::to_string(tgt.nu.size()));
  std::vector<double> r;
  for (std::size_t i = 0; i < tgt.mu.size(); ++i) {
    if (norm(got.mu[i].z - tgt.mu[i].z) > 1e-9 * (1.0 + norm(tgt.mu[i].z))) throw LayoutMismatch("mu atom positions differ");
    r.push_back((got.mu[i].a - tgt.mu[i].a) / tgt.mu[i].a);
  }
  for (std::size_t j = 0; j < tgt.nu.size(); ++j) {
    if (norm(got.nu[j].theta - tgt.nu[j].theta) > 1e-9) throw LayoutMismatch("nu atom directions differ");
    r.push_back((got.nu[j].b - tgt.nu[j].b) / tgt.nu[j].b);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Polyhedral solver

namespace detail {

/// Cell data for unknowns x = (c_0..c_{m−1}, d_0..d_{q−1}).
struct PolyState {
  std::vector<Piece> pieces;
  std::vector<Halfplane> hs;
  CellComplex cx;
  std::vector<double> M, E;
  bool valid = false;
};

inline PolyState evaluate_state(const SurfaceAreaPair& p, const Eigen::VectorXd& x, double clip_hint) {
  PolyState s;
  std::size_t m = p.mu.size(), q = p.nu.size();
  for (std::size_t i = 0; i < m; ++i) s.pieces.push_back({p.mu[i].z, x[static_cast<Eigen::Index>(i)]});
  for (std::size_t j = 0; j < q; ++j) s.hs.push_back({p.nu[j].theta, x[static_cast<Eigen::Index>(m + j)]});
  try {
    s.cx = build_cells(s.pieces, s.hs, clip_hint);
  } catch (const Error&) {
    return s;
  }
  s.M.assign(m, 0.0);
  s.E.assign(q, 0.0);
  for (const auto& cell : s.cx.cells) {
    const Piece& pc = s.pieces[cell.piece];
    s.M[cell.piece] = integrate_exp_affine(pc.z, pc.c, cell.region);
    for (std::size_t e = 0; e < cell.region.size(); ++e) {
      int l = cell.region.labels[e];
      if (is_facet_label(l)) s.E[facet_index(l)] += integrate_exp_affine_edge(pc.z, pc.c, cell.region, e);
    }
  }
  s.valid = std::all_of(s.M.begin(), s.M.end(), [](double v) { return v > 0.0; }) &&
            std::all_of(s.E.begin(), s.E.end(), [](double v) { return v > 0.0; });
  return s;
}

inline std::vector<double> relative_residual(const SurfaceAreaPair& p, const PolyState& s) {
  std::vector<double> r;
  for (std::size_t i = 0; i < p.mu.size(); ++i) r.push_back((s.M[i] - p.mu[i].a) / p.mu[i].a);
  for (std::size_t j = 0; j < p.nu.size(); ++j) r.push_back((s.E[j] - p.nu[j].b) / p.nu[j].b);
  return r;
}

inline Eigen::VectorXd absolute_residual(const SurfaceAreaPair& p, const PolyState& s) {
  std::size_t m = p.mu.size(), q = p.nu.size();
  Eigen::VectorXd F(static_cast<Eigen::Index>(m + q));
  for (std::size_t i = 0; i < m; ++i) F[static_cast<Eigen::Index>(i)] = s.M[i] - p.mu[i].a;
  for (std::size_t j = 0; j < q; ++j) F[static_cast<Eigen::Index>(m + j)] = s.E[j] - p.nu[j].b;
  return F;
}

/// Analytic Jacobian of (M, E) with respect to (c, d). Mass moves across a cell wall
/// {⟨z_k − z_i, x⟩ = c_k − c_i} at normal speed 1/|z_k − z_i|; a facet moves at unit speed
/// and its endpoints slide along the neighbouring facets.
inline Eigen::MatrixXd analytic_jacobian(const PolyState& s) {
  std::size_t m = s.pieces.size(), q = s.hs.size();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m + q), static_cast<Eigen::Index>(m + q));
  auto I = [](std::size_t k) { return static_cast<Eigen::Index>(k); };
  for (const auto& cell : s.cx.cells) {
    std::size_t i = cell.piece;
    const Piece& pc = s.pieces[i];
    H(I(i), I(i)) += s.M[i];
    for (std::size_t e = 0; e < cell.region.size(); ++e) {
      int l = cell.region.labels[e];
      double flux = integrate_exp_affine_edge(pc.z, pc.c, cell.region, e);
      if (l >= 0) {
        std::size_t k = static_cast<std::size_t>(l);
        double w = flux / norm(s.pieces[k].z - pc.z);
        H(I(i), I(i)) -= w;
        H(I(i), I(k)) += w;
      } else if (is_facet_label(l)) {
        std::size_t j = facet_index(l);
        H(I(i), I(m + j)) += flux;
        H(I(m + j), I(i)) += flux;
        H(I(m + j), I(m + j)) -= dot(pc.z, s.hs[j].normal) * flux;
      }
    }
  }
  const Region& D = s.cx.domain;
  std::size_t n = D.size();
  for (std::size_t v = 0; v < n; ++v) {
    int l0 = D.labels[(v + n - 1) % n], l1 = D.labels[v];
    if (!is_facet_label(l0) || !is_facet_label(l1)) continue;
    std::size_t j = facet_index(l0), k = facet_index(l1);
    if (j == k) continue;
    Vec2 t0 = s.hs[j].normal, t1 = s.hs[k].normal;
    double sn = std::abs(cross(t0, t1)), cs = dot(t0, t1);
    Vec2 pnt = D.vertices[v];
    double phi = -inf;
    for (const auto& pc : s.pieces) phi = std::max(phi, piece_value(pc, pnt));
    double fp = std::exp(-phi);
    H(I(m + j), I(m + j)) -= fp * cs / sn;
    H(I(m + k), I(m + k)) -= fp * cs / sn;
    H(I(m + j), I(m + k)) += fp / sn;
    H(I(m + k), I(m + j)) += fp / sn;
  }
  return H;
}

inline Eigen::MatrixXd fd_jacobian(const SurfaceAreaPair& p, const Eigen::VectorXd& x, const PolyState& s0, double step) {
  Eigen::Index N = x.size();
  Eigen::MatrixXd H(N, N);
  Eigen::VectorXd F0 = absolute_residual(p, s0);
  for (Eigen::Index k = 0; k < N; ++k) {
    double h = step * std::max(1.0, std::abs(x[k]));
    Eigen::VectorXd xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    PolyState sp = evaluate_state(p, xp, s0.cx.clip_radius);
    PolyState sm = evaluate_state(p, xm, s0.cx.clip_radius);
    if (sp.valid && sm.valid) H.col(k) = (absolute_residual(p, sp) - absolute_residual(p, sm)) / (2.0 * h);
    else if (sp.valid) H.col(k) = (absolute_residual(p, sp) - F0) / h;
    else if (sm.valid) H.col(k) = (F0 - absolute_residual(p, sm)) / h;
    else H.col(k).setZero();
  }
  return H;
}

/// Columns spanning the translation kernel: (⟨z_i, e_k⟩, ⟨θ_j, e_k⟩).
inline Eigen::MatrixXd gauge_columns(const SurfaceAreaPair& p) {
  std::size_t m = p.mu.size(), q = p.nu.size();
  Eigen::MatrixXd G(static_cast<Eigen::Index>(m + q), 2);
  for (std::size_t i = 0; i < m; ++i) G.row(static_cast<Eigen::Index>(i)) << p.mu[i].z.x, p.mu[i].z.y;
  for (std::size_t j = 0; j < q; ++j) G.row(static_cast<Eigen::Index>(m + j)) << p.nu[j].theta.x, p.nu[j].theta.y;
  return G;
}

inline Eigen::VectorXd bordered_solve(const Eigen::MatrixXd& H, const Eigen::MatrixXd& G, const Eigen::VectorXd& rhs) {
  Eigen::Index N = H.rows();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(N + 2, N + 2);
  K.topLeftCorner(N, N) = H;
  K.topRightCorner(N, 2) = G;
  K.bottomLeftCorner(2, N) = G.transpose();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(N + 2);
  b.head(N) = rhs;
  Eigen::VectorXd sol;
  if (N <= 400) {
    sol = K.partialPivLu().solve(b);
  } else {
    Eigen::SparseMatrix<double> S = K.sparseView(0.0, 1e-300);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(S);
    if (lu.info() != Eigen::Success) sol = K.partialPivLu().solve(b);
    else sol = lu.solve(b);
  }
  return sol.head(N);
}

/// Starting point: Voronoi-type pieces c_i = κ|z_i|²/2 (every cell owns its site κz_i) inside
/// the domain {⟨θ_j, x⟩ ≤ ρ}, all of whose facets are active; then a common shift of c to match J.
inline Eigen::VectorXd initial_guess(const SurfaceAreaPair& p) {
  std::size_t m = p.mu.size(), q = p.nu.size();
  double A = p.mu_total(), B = p.nu_total();
  double zmax = 0.0;
  for (const auto& a : p.mu) zmax = std::max(zmax, norm(a.z));
  std::vector<Vec2> dirs;
  for (const auto& n : p.nu) dirs.push_back(n.theta);
  bool bounded = q >= 3 && positively_spanning(dirs);
  double rho = 1.0;
  if (bounded) {
    std::vector<Halfplane> hs;
    for (const auto& n : p.nu) hs.push_back({n.theta, 1.0});
    Region D0 = domain_region(hs, 0.0);
    double per = detail::region_perimeter(D0), ar = area(D0);
    rho = A * per / (B * ar);
  } else if (zmax > 0.0) {
    rho = zmax;
  }
  auto start = [&](double r) {
    double kappa = zmax > 0.0 ? 0.5 * r / zmax : 1.0;
    Eigen::VectorXd x(static_cast<Eigen::Index>(m + q));
    for (std::size_t i = 0; i < m; ++i) x[static_cast<Eigen::Index>(i)] = 0.5 * kappa * norm2(p.mu[i].z);
    for (std::size_t j = 0; j < q; ++j) x[static_cast<Eigen::Index>(m + j)] = r;
    return x;
  };
  // Facet share E/J as a function of ρ; it falls as the domain grows.
  auto share = [&](double r) {
    PolyState s = evaluate_state(p, start(r), 1.0);
    if (!s.valid) return std::numeric_limits<double>::quiet_NaN();
    double J = 0.0, E = 0.0;
    for (double v : s.M) J += v;
    for (double v : s.E) E += v;
    return E / J;
  };
  if (q > 0 && B > 0.0) {
    // The perimeter/area guess overshoots when ν is light; bisect log ρ on the share instead.
    double target = B / A, lo = std::log(rho), hi = lo;
    double slo = share(rho), shi = slo;
    for (int k = 0; k < 12 && std::isfinite(slo) && slo <= target; ++k) slo = share(std::exp(lo -= 1.0));
    for (int k = 0; k < 12 && std::isfinite(shi) && shi >= target; ++k) shi = share(std::exp(hi += 1.0));
    if (std::isfinite(slo) && std::isfinite(shi) && slo > target && shi < target) {
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi), sm = share(std::exp(mid));
        if (!std::isfinite(sm)) break;
        (sm > target ? lo : hi) = mid;
      }
      rho = std::exp(0.5 * (lo + hi));
    }
  }
  Eigen::VectorXd x = start(rho);
  PolyState s = evaluate_state(p, x, 1.0);
  double J = 0.0;
  for (double v : s.M) J += v;
  if (J > 0.0 && std::isfinite(J)) x.head(static_cast<Eigen::Index>(m)).array() += std::log(A / J);
  return x;
}

inline PolyhedralLogConcave steiner_gauge(const PolyhedralLogConcave& f) {
  Polygon L = superlevel(f, std::exp(-1.0) * f.max_value());
  return translate(f, steiner_point(L));
}

} // namespace detail

/// Closed form for pairs (aδ₀, ν): f = c·1_K with S_K = ν/c and c·vol K = a.
inline PolyhedralLogConcave solve_indicator_pair(const SurfaceAreaPair& p) {
  Polygon K0 = minkowski_problem_2d(nu_measure(p));
  double c = area(K0) / p.mu_total();
  return PolyhedralLogConcave::indicator(scale(K0, 1.0 / c), c);
}

inline bool is_indicator_pair(const SurfaceAreaPair& p) {
  return p.mu.size() == 1 && p.mu[0].z.x == 0.0 && p.mu[0].z.y == 0.0;
}

/// Newton solve of extract_pair(f) = p for f = e^{−φ}, φ = max(⟨z_i,x⟩ − c_i) on {⟨θ_j,x⟩ ≤ d_j}.
inline Solved<PolyhedralLogConcave> solve_polyhedral(const SurfaceAreaPair& pair, const SolverConfig& cfg = {}) {
  cfg.validate();
  if (pair.dim != 2) throw LayoutMismatch("polyhedral solver works in dimension 2");
  SurfaceAreaPair p = canonical(pair);
  AdmissibilityReport rep = admissible(p);
  if (!rep.ok()) throw NotAdmissible(rep.describe());

  SolveTrace trace;
  if (cfg.indicator_fast_path && is_indicator_pair(p)) {
    auto f = detail::steiner_gauge(solve_indicator_pair(p));
    trace.converged = true;
    trace.final_residual = residual(p, f);
    trace.iterates.push_back({0, inf_norm(trace.final_residual), 1.0});
    return {f, trace};
  }

  Eigen::VectorXd x = detail::initial_guess(p);
  detail::PolyState s = detail::evaluate_state(p, x, 1.0);
  if (!s.valid) throw NoConvergence("initial point has empty cells or facets", trace);
  Eigen::MatrixXd G = detail::gauge_columns(p);
  double merit = inf_norm(detail::relative_residual(p, s));
  trace.iterates.push_back({0, merit, 0.0});
  // One extra Newton step is taken after the tolerance is first met.
  bool polishing = false;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    if (merit <= cfg.residual_tol) {
      if (polishing) break;
      polishing = true;
    }
    Eigen::MatrixXd H = cfg.jacobian == SolverConfig::Jacobian::analytic ? detail::analytic_jacobian(s)
                                                                         : detail::fd_jacobian(p, x, s, cfg.fd_step);
    Eigen::VectorXd dx = detail::bordered_solve(H, G, -detail::absolute_residual(p, s));
    if (!dx.allFinite()) throw NoConvergence("singular Newton system", trace);
    double t = 1.0;
    bool accepted = false;
    for (; t >= cfg.min_step; t *= cfg.damping) {
      Eigen::VectorXd xt = x + t * dx;
      detail::PolyState st = detail::evaluate_state(p, xt, s.cx.clipped() ? s.cx.clip_radius : 1.0);
      if (!st.valid) continue;
      double mt = inf_norm(detail::relative_residual(p, st));
      if (mt <= (1.0 - 1e-4 * t) * merit) {
        x = xt;
        s = std::move(st);
        merit = mt;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (merit <= cfg.residual_tol) break;
      throw NoConvergence("line search failed at residual " + std::to_string(merit), trace);
    }
    trace.iterates.push_back({it, merit, t});
  }
  trace.final_residual = detail::relative_residual(p, s);
  trace.converged = merit <= cfg.residual_tol;
  if (!trace.converged) throw NoConvergence("iteration limit reached at residual " + std::to_string(merit), trace);
  PolyhedralLogConcave f(s.pieces, s.hs);
  return {detail::steiner_gauge(f), trace};
}

// ---------------------------------------------------------------------------
// Radial solver

namespace detail {

/// Annulus mass nωₙ e^{−w_a} ∫_a^{a+L} r^{n−1} e^{−g(r−a)} dr.
inline double annulus_mass(int n, double a, double L, double wa, double g) {
  return sphere_area(n) * std::exp(-wa) * shifted_moment(n - 1, 0, a, L, g);
}

/// Length L with annulus_mass = target, or nullopt when even L = ∞ is too small.
inline std::optional<double> annulus_length(int n, double a, double wa, double g, double target) {
  if (g > 0.0 && annulus_mass(n, a, inf, wa, g) <= target) return std::nullopt;
  double lo = 0.0, hi = 1.0;
  while (annulus_mass(n, a, hi, wa, g) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) return std::nullopt;
  }
  double L = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double v = annulus_mass(n, a, L, wa, g) - target;
    if (v > 0.0) hi = L; else lo = L;
    double dv = sphere_area(n) * std::exp(-wa) * std::pow(a + L, n - 1) * std::exp(-g * L);
    double Ln = dv > 0.0 ? L - v / dv : 0.5 * (lo + hi);
    if (!(Ln > lo && Ln < hi)) Ln = 0.5 * (lo + hi);
    if (std::abs(Ln - L) <= 1e-16 * (a + L) || hi - lo <= 1e-16 * (a + hi)) { L = Ln; break; }
    L = Ln;
  }
  return L;
}

struct RadialShot {
  bool feasible = false;
  std::vector<std::pair<double, double>> knots;
  double residual = 0.0;  // relative, last constraint
};

/// Builds the profile for a given w(0) by solving annulus radii in order.
inline RadialShot radial_shoot(const RadialPair& p, double w0) {
  RadialShot s;
  int n = p.dim;
  double r = 0.0, w = w0;
  s.knots.push_back({0.0, w0});
  std::size_t K = p.grad.size();
  bool tail = p.boundary == 0.0;
  std::size_t finite_count = tail ? K - 1 : K;
  for (std::size_t k = 0; k < finite_count; ++k) {
    auto L = annulus_length(n, r, w, p.grad[k].g, p.grad[k].a);
    if (!L) return s;
    w += p.grad[k].g * *L;
    r += *L;
    s.knots.push_back({r, w});
  }
  s.feasible = true;
  if (tail) {
    double got = annulus_mass(n, r, inf, w, p.grad.back().g);
    s.residual = (got - p.grad.back().a) / p.grad.back().a;
  } else {
    double got = sphere_area(n) * std::pow(r, n - 1) * std::exp(-w);
    s.residual = (got - p.boundary) / p.boundary;
  }
  return s;
}

} // namespace detail

namespace detail {

/// Joint Newton system for the knots (r_k, w_k). Unknowns [w_0..w_K, r_1..r_K] where K is the
/// number of finite annuli; equations are log-mass mismatches per annulus, the linear links
/// w_{k+1} = w_k + g_k (r_{k+1} − r_k), and the boundary (or tail) mass.
struct RadialSystem {
  const RadialPair& p;
  std::size_t K;
  bool tail;

  Eigen::Index wi(std::size_t k) const { return static_cast<Eigen::Index>(k); }
  Eigen::Index ri(std::size_t k) const { return static_cast<Eigen::Index>(K + k); }  // k ≥ 1
  Eigen::Index size() const { return static_cast<Eigen::Index>(2 * K + 1); }

  double r(const Eigen::VectorXd& u, std::size_t k) const { return k == 0 ? 0.0 : u[ri(k)]; }

  bool ordered(const Eigen::VectorXd& u) const {
    for (std::size_t k = 0; k < K; ++k)
      if (!(r(u, k + 1) > r(u, k))) return false;
    return u.allFinite();
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& u) const {
    int m = p.dim - 1;
    double lw = std::log(sphere_area(p.dim));
    Eigen::VectorXd F(size());
    Eigen::Index e = 0;
    for (std::size_t k = 0; k < K; ++k) {
      double a = r(u, k), L = r(u, k + 1) - a, g = p.grad[k].g;
      F[e++] = lw - u[wi(k)] + std::log(shifted_moment(m, 0, a, L, g)) - std::log(p.grad[k].a);
      F[e++] = u[wi(k + 1)] - u[wi(k)] - g * L;
    }
    double R = r(u, K);
    if (tail) F[e] = lw - u[wi(K)] + std::log(shifted_moment(m, 0, R, inf, p.grad.back().g)) - std::log(p.grad.back().a);
    else F[e] = lw + m * std::log(R) - u[wi(K)] - std::log(p.boundary);
    return F;
  }

  Eigen::SparseMatrix<double> jacobian(const Eigen::VectorXd& u) const {
    int m = p.dim - 1;
    std::vector<Eigen::Triplet<double>> T;
    Eigen::Index e = 0;
    for (std::size_t k = 0; k < K; ++k) {
      double a = r(u, k), b = r(u, k + 1), g = p.grad[k].g;
      double M = shifted_moment(m, 0, a, b - a, g);
      T.emplace_back(e, wi(k), -1.0);
      if (k > 0) T.emplace_back(e, ri(k), (g * M - std::pow(a, m)) / M);
      T.emplace_back(e, ri(k + 1), std::pow(b, m) * std::exp(-g * (b - a)) / M);
      ++e;
      T.emplace_back(e, wi(k + 1), 1.0);
      T.emplace_back(e, wi(k), -1.0);
      if (k > 0) T.emplace_back(e, ri(k), g);
      T.emplace_back(e, ri(k + 1), -g);
      ++e;
    }
    double R = r(u, K);
    T.emplace_back(e, wi(K), -1.0);
    if (K > 0) {
      if (tail) {
        double g = p.grad.back().g, M = shifted_moment(m, 0, R, inf, g);
        T.emplace_back(e, ri(K), (g * M - std::pow(R, m)) / M);
      } else if (m > 0) {
        T.emplace_back(e, ri(K), m / R);
      }
    }
    Eigen::SparseMatrix<double> J(size(), size());
    J.setFromTriplets(T.begin(), T.end());
    return J;
  }
};

} // namespace detail

/// Radial Minkowski problem. A shooting pass in w(0) (annulus radii solved in order as monotone
/// 1D roots) gives a starting profile; forward shooting loses accuracy far out, so the knots are
/// then polished by damped Newton on the joint system.
inline Solved<RadialLogConcave> solve_radial(const RadialPair& pair, const SolverConfig& cfg = {}) {
  cfg.validate();
  RadialPair p = canonical(pair);
  if (p.dim < 1) throw LayoutMismatch("dimension must be at least 1");
  if (p.grad.empty() || !(p.mu_total() > 0.0)) throw NotAdmissible("mu is zero");
  if (p.boundary == 0.0 && !(p.grad.back().g > 0.0))
    throw InfeasibleBoundary("no boundary mass and no positive gradient atom");
  if (p.boundary < 0.0) throw InfeasibleBoundary("negative boundary mass");

  SolveTrace trace;
  // Larger w(0) makes f smaller: annuli widen and the last residual decreases; infeasible counts as negative.
  auto value = [&](double w0) {
    detail::RadialShot s = detail::radial_shoot(p, w0);
    return std::make_pair(s.feasible ? s.residual : -inf, s);
  };
  double lo = -1.0, hi = 1.0;
  auto vlo = value(lo), vhi = value(hi);
  int guard = 0;
  while (!(vlo.first > 0.0) && guard++ < 200) { hi = lo; vhi = vlo; lo -= std::ldexp(1.0, guard); vlo = value(lo); }
  guard = 0;
  while (!(vhi.first < 0.0) && guard++ < 200) { lo = hi; vlo = vhi; hi += std::ldexp(1.0, guard); vhi = value(hi); }
  if (!(vlo.first > 0.0) || !(vhi.first < 0.0)) throw NoConvergence("could not bracket w(0)", trace);

  detail::RadialShot best = vlo.second;
  double best_res = std::abs(vlo.first);
  int it = 0;
  for (; it < 400 && best_res > 1e-3 * cfg.residual_tol; ++it) {
    double mid = 0.5 * (lo + hi);
    // Secant guess when both ends are feasible.
    if (std::isfinite(vlo.first) && std::isfinite(vhi.first)) {
      double sec = lo - vlo.first * (hi - lo) / (vhi.first - vlo.first);
      if (sec > lo + 0.05 * (hi - lo) && sec < hi - 0.05 * (hi - lo)) mid = sec;
    }
    auto v = value(mid);
    if (v.second.feasible && std::abs(v.first) < best_res) { best_res = std::abs(v.first); best = v.second; }
    trace.iterates.push_back({it + 1, best_res, hi - lo});
    if (v.first > 0.0) { lo = mid; vlo = v; } else { hi = mid; vhi = v; }
    if (hi - lo <= 4e-16 * (1.0 + std::abs(lo))) break;
  }

  detail::RadialSystem sys{p, best.knots.size() - 1, p.boundary == 0.0};
  Eigen::VectorXd u(sys.size());
  for (std::size_t k = 0; k <= sys.K; ++k) {
    u[sys.wi(k)] = best.knots[k].second;
    if (k > 0) u[sys.ri(k)] = best.knots[k].first;
  }
  Eigen::VectorXd F = sys.residual(u);
  double merit = F.cwiseAbs().maxCoeff();
  for (int k = 0; k < cfg.max_iterations && merit > 1e-3 * cfg.residual_tol; ++k) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(sys.jacobian(u));
    if (lu.info() != Eigen::Success) break;
    Eigen::VectorXd du = lu.solve(-F);
    bool accepted = false;
    double t = 1.0;
    for (; t >= cfg.min_step; t *= cfg.damping) {
      Eigen::VectorXd ut = u + t * du;
      if (!sys.ordered(ut)) continue;
      Eigen::VectorXd Ft = sys.residual(ut);
      double mt = Ft.allFinite() ? Ft.cwiseAbs().maxCoeff() : inf;
      if (mt <= (1.0 - 1e-4 * t) * merit) {
        u = ut;
        F = Ft;
        merit = mt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    trace.iterates.push_back({++it, merit, t});
  }

  std::vector<std::pair<double, double>> knots;
  for (std::size_t k = 0; k <= sys.K; ++k) knots.push_back({sys.r(u, k), u[sys.wi(k)]});
  std::optional<double> tail;
  if (sys.tail) tail = p.grad.back().g;
  RadialLogConcave f(p.dim, knots, tail);
  RadialPair got = extract_radial_pair(f);
  for (const auto& a : p.grad) {
    double m = 0.0;
    for (const auto& b : got.grad)
      if (std::abs(b.g - a.g) <= kMergeRadius) m = b.a;
    trace.final_residual.push_back((m - a.a) / a.a);
  }
  if (p.boundary > 0.0) trace.final_residual.push_back((got.boundary - p.boundary) / p.boundary);
  trace.converged = inf_norm(trace.final_residual) <= cfg.residual_tol;
  if (!trace.converged) throw NoConvergence("radial residual " + std::to_string(inf_norm(trace.final_residual)), trace);
  return {f, trace};
}

// ---------------------------------------------------------------------------
// Comparison up to translation

struct TranslationMatch {
  bool equal = false;
  Vec2 shift;  // f(x) ≈ g(x − shift)
  double sup_error = 0.0;
};

inline TranslationMatch equal_up_to_translation(const PolyhedralLogConcave& f, const PolyhedralLogConcave& g,
                                                double tol, int grid = 100) {
  TranslationMatch r;
  double fm = f.max_value();
  Vec2 sf = steiner_point(superlevel(f, std::exp(-1.0) * fm));
  Vec2 sg = steiner_point(superlevel(g, std::exp(-1.0) * g.max_value()));
  r.shift = sf - sg;
  double level = std::max(tol, 1e-12);
  std::vector<Vec2> pts = level_region(f, f.min_phi() - std::log(level)).vertices;
  for (Vec2 v : level_region(g, g.min_phi() - std::log(level)).vertices) pts.push_back(v + r.shift);
  detail::Box b = detail::bounding_box(pts);
  double wx = b.x1 - b.x0, wy = b.y1 - b.y0;
  b = {b.x0 - 0.05 * wx, b.y0 - 0.05 * wy, b.x1 + 0.05 * wx, b.y1 + 0.05 * wy};
  const double ox = 0.5 * (std::sqrt(5.0) - 1.0), oy = std::sqrt(2.0) - 1.0;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      Vec2 x{b.x0 + (b.x1 - b.x0) * (i + ox) / grid, b.y0 + (b.y1 - b.y0) * (j + oy) / grid};
      r.sup_error = std::max(r.sup_error, std::abs(f(x) - g(x - r.shift)));
    }
  r.equal = r.sup_error <= tol * fm;
  return r;
}

inline TranslationMatch equal_up_to_translation(const RadialLogConcave& f, const RadialLogConcave& g, double tol,
                                                int grid = 10000) {
  TranslationMatch r;
  double R = std::max(level_radius(f, f.min_phi() - std::log(std::max(tol, 1e-12))),
                      level_radius(g, g.min_phi() - std::log(std::max(tol, 1e-12))));
  R = std::max(R, 1e-9) * 1.05;
  for (int i = 0; i <= grid; ++i) {
    double rr = R * (i + 0.5 * (std::sqrt(5.0) - 1.0)) / grid;
    r.sup_error = std::max(r.sup_error, std::abs(f(rr) - g(rr)));
  }
  r.equal = r.sup_error <= tol * f.max_value();
  return r;
}

} // namespace blaschke_lab

#endif
