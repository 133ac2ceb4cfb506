#ifndef BLASCHKE_LAB_INEQUALITIES_HPP
#define BLASCHKE_LAB_INEQUALITIES_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "blaschke.hpp"
#include "corpus.hpp"
#include "digest.hpp"
#include "functionals.hpp"

namespace blaschke_lab {

/// margin = lhs − rhs. Inequalities pass when margin ≥ −tolerance·scale; equality witnesses and
/// identities pass when |margin| ≤ tolerance·scale, with scale = max(1, |lhs|, |rhs|).
struct InequalityReport {
  std::string name;
  std::string instance;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool equality_witness = false;
  double tolerance = 0.0;
  std::string digest;
  double seconds = 0.0;
  std::string error;

  double scale() const { return std::max({1.0, std::abs(lhs), std::abs(rhs)}); }
  bool passed() const {
    if (!error.empty() || !std::isfinite(margin)) return false;
    return equality_witness ? std::abs(margin) <= tolerance * scale() : margin >= -tolerance * scale();
  }
};

struct SuiteConfig {
  std::vector<double> t_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int polygon_pairs = 20;
  std::uint64_t seed = 20240611;
  double inequality_tol = 1e-8;
  double witness_tol = 1e-6;
  double covariance_tol = 1e-2;
  SolverConfig solver;
  OmegaConfig omega;
  /// Empty runs everything; otherwise the suite names to run.
  std::vector<std::string> only;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"minkowski_first", "entropy_concavity", "ks_multiplicative",
                                              "mixed_volume",    "omega_superadditivity", "omega_symmetral",
                                              "petty",           "covariance"};
  return names;
}

namespace detail {

class ReportSink {
 public:
  ReportSink(std::vector<InequalityReport>& out, const SuiteConfig& cfg) : out_(out), cfg_(cfg) {}

  /// Runs `body`, which fills lhs/rhs; errors become structured rows.
  void run(const std::string& name, const std::string& instance, bool witness, double tol, const Digest& d,
           const std::function<void(InequalityReport&)>& body) {
    InequalityReport r;
    r.name = name;
    r.instance = instance;
    r.equality_witness = witness;
    r.tolerance = tol;
    r.digest = Digest(d).add(name).add(instance).hex();
    auto t0 = std::chrono::steady_clock::now();
    try {
      body(r);
      r.margin = r.lhs - r.rhs;
      if (!std::isfinite(r.margin)) r.error = "non-finite margin";
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    if (!r.error.empty()) r.lhs = r.rhs = r.margin = 0.0;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out_.push_back(std::move(r));
  }
  bool enabled(const std::string& name) const {
    return cfg_.only.empty() || std::find(cfg_.only.begin(), cfg_.only.end(), name) != cfg_.only.end();
  }

 private:
  std::vector<InequalityReport>& out_;
  const SuiteConfig& cfg_;
};

inline Mat2 reflection_matrix(Vec2 u) {
  u = normalized(u);
  return {1.0 - 2.0 * u.x * u.x, -2.0 * u.x * u.y, -2.0 * u.x * u.y, 1.0 - 2.0 * u.y * u.y};
}

/// Random T ∈ GL₂ with condition number ≤ 10 and det > 0.
inline Mat2 random_transform(PortableRng& rng) {
  double s1 = rng.uniform(0.5, 2.0), s2 = s1 / rng.uniform(1.0, 10.0);
  Mat2 U = Mat2::rotation(rng.uniform(0.0, pi)), V = Mat2::rotation(rng.uniform(0.0, pi));
  return U * Mat2{s1, 0.0, 0.0, s2} * V;
}

inline double sharp_pow(double omega) { return std::pow(omega, 1.5); }

} // namespace detail

/// Every inequality of the suite on the corpus. Ω estimates are upper bounds on an infimum, so the
/// optimizer for the smaller side is also started from the optimum of the larger side; that is
/// the same comparison the proofs make for a fixed Q.
inline std::vector<InequalityReport> run_inequality_suite(const Corpus& corpus, const SuiteConfig& cfg = {}) {
  std::vector<InequalityReport> out;
  detail::ReportSink sink(out, cfg);
  const double itol = cfg.inequality_tol, wtol = cfg.witness_tol;

  std::vector<const NamedPolyhedral*> poly;
  for (const auto& f : corpus.polyhedral) poly.push_back(&f);
  std::vector<const NamedRadial*> rad;
  for (const auto& f : corpus.radial) rad.push_back(&f);
  const PolyhedralLogConcave disk = PolyhedralLogConcave::indicator(disk_polygon(1.0, 64));
  const RadialLogConcave ball(2, {{0.0, 0.0}, {1.0, 0.0}});

  // (a) δ(f,g) ≥ J(f)[n + log J(g)] + Ent(f)
  if (sink.enabled("minkowski_first")) {
    auto emit = [&](const std::string& inst, bool witness, const Digest& d, auto&& delta, double Jf, double Jg,
                    double Ef, int n) {
      sink.run("minkowski_first", inst, witness, witness ? wtol : itol, d, [&](InequalityReport& r) {
        r.lhs = delta();
        r.rhs = Jf * (n + std::log(Jg)) + Ef;
      });
    };
    for (const auto* f : poly) {
      SurfaceAreaPair p = extract_pair(f->f);
      double Jf = mass(f->f), Ef = entropy(f->f);
      for (const auto* g : poly) {
        double d;
        try {
          d = first_variation(p, g->f);
        } catch (const UnboundedSupportTerm&) {
          continue;
        }
        if (!std::isfinite(d)) continue;
        emit(f->name + "|" + g->name, false, Digest().add(f->f).add(g->f), [d] { return d; }, Jf, mass(g->f), Ef, 2);
      }
      PolyhedralLogConcave moved = translate(f->f, {0.37, -0.21});
      emit(f->name + "|translate", true, Digest().add(f->f).add(moved),
           [&] { return first_variation(p, moved); }, Jf, mass(moved), Ef, 2);
    }
    for (const auto* f : rad) {
      RadialPair p = extract_radial_pair(f->f);
      double Jf = mass(f->f), Ef = entropy(f->f);
      for (const auto* g : rad) {
        if (g->f.dim() != f->f.dim()) continue;
        double d;
        try {
          d = first_variation(p, g->f);
        } catch (const UnboundedSupportTerm&) {
          continue;
        }
        if (!std::isfinite(d)) continue;
        emit(f->name + "|" + g->name, f == g, Digest().add(f->f).add(g->f), [d] { return d; }, Jf, mass(g->f), Ef,
             f->f.dim());
      }
    }
  }

  // (b) Ent((1−t)⊙f₁ ♯ t⊙f₂) ≥ (1−t)Ent f₁ + t Ent f₂
  if (sink.enabled("entropy_concavity")) {
    std::vector<std::pair<const PolyhedralLogConcave*, const PolyhedralLogConcave*>> pairs;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i + 1 < poly.size() && pairs.size() < 4; i += 2) {
      pairs.push_back({&poly[i]->f, &poly[i + 1]->f});
      labels.push_back(poly[i]->name + "|" + poly[i + 1]->name);
    }
    PolyhedralLogConcave moved = translate(disk, {0.5, 0.25});
    for (std::size_t k = 0; k <= pairs.size(); ++k) {
      bool witness = k == pairs.size();
      const PolyhedralLogConcave& f1 = witness ? disk : *pairs[k].first;
      const PolyhedralLogConcave& f2 = witness ? moved : *pairs[k].second;
      SurfaceAreaPair p1 = extract_pair(f1), p2 = extract_pair(f2);
      double E1 = entropy(f1), E2 = entropy(f2);
      for (double t : cfg.t_grid)
        sink.run("entropy_concavity", (witness ? std::string("disk|translate") : labels[k]) + "@t=" + std::to_string(t),
                 witness, witness ? wtol : itol, Digest().add(p1).add(p2).add(t), [&](InequalityReport& r) {
                   r.lhs = entropy(solve_polyhedral((1.0 - t) * p1 + t * p2, cfg.solver).function);
                   r.rhs = (1.0 - t) * E1 + t * E2;
                 });
    }
    // Radial members are paired only with the same support kind: a boundary atom next to a
    // light far tail packs that tail into annuli thinner than the radius resolution.
    for (std::size_t i = 0; i < rad.size(); ++i)
      for (std::size_t j = i + 1; j < rad.size(); ++j) {
        const auto& f1 = rad[i]->f;
        const auto& f2 = rad[j]->f;
        if (f1.dim() != f2.dim() || f1.tail_slope().has_value() != f2.tail_slope().has_value()) continue;
        RadialPair p1 = extract_radial_pair(f1), p2 = extract_radial_pair(f2);
        double E1 = entropy(f1), E2 = entropy(f2);
        for (double t : cfg.t_grid)
          sink.run("entropy_concavity", rad[i]->name + "|" + rad[j]->name + "@t=" + std::to_string(t), false, itol,
                   Digest().add(p1).add(p2).add(t), [&](InequalityReport& r) {
                     r.lhs = entropy(solve_radial((1.0 - t) * p1 + t * p2, cfg.solver).function);
                     r.rhs = (1.0 - t) * E1 + t * E2;
                   });
      }
  }

  // Polygon pool shared by the two body inequalities.
  PortableRng rng(cfg.seed);
  std::vector<Polygon> pool;
  for (int i = 0; i < 2 * cfg.polygon_pairs + 1; ++i) pool.push_back(detail::random_convex_domain(rng));

  // (c) vol(B_t)^{1/2} ≥ m_t vol(K)^{−(1−t)vol K/(2m_t)} vol(L)^{−t vol L/(2m_t)}
  if (sink.enabled("ks_multiplicative")) {
    auto ks = [&](const Polygon& K, const Polygon& L, double t, InequalityReport& r) {
      double vK = area(K), vL = area(L), m = (1.0 - t) * vK + t * vL;
      SphereMeasure2 S = (1.0 - t) * surface_area_measure(K) + t * surface_area_measure(L);
      r.lhs = std::sqrt(area(minkowski_problem_2d(S)));
      r.rhs = m * std::pow(vK, -(1.0 - t) * vK / (2.0 * m)) * std::pow(vL, -t * vL / (2.0 * m));
    };
    for (int i = 0; i <= cfg.polygon_pairs; ++i) {
      bool witness = i == cfg.polygon_pairs;
      const Polygon& K = pool[2 * i % pool.size()];
      Polygon L = witness ? translate(K, {1.0, -2.0}) : pool[(2 * i + 1) % pool.size()];
      for (double t : cfg.t_grid)
        sink.run("ks_multiplicative", (witness ? std::string("K|translate") : "pair" + std::to_string(i)) +
                                          "@t=" + std::to_string(t),
                 witness, witness ? wtol : itol, Digest().add(K).add(L).add(t),
                 [&](InequalityReport& r) { ks(K, L, t, r); });
    }
  }

  // (d) n(V₁(K,M) + V₁(L,M)) ≥ (vol K + vol L)[n + log vol M] − vol K log vol K − vol L log vol L
  if (sink.enabled("mixed_volume")) {
    auto mv = [](const Polygon& K, const Polygon& L, const Polygon& M, InequalityReport& r) {
      double vK = area(K), vL = area(L), vM = area(M);
      r.lhs = first_variation(extract_pair(K), M) + first_variation(extract_pair(L), M);
      r.rhs = (vK + vL) * (2.0 + std::log(vM)) - vK * std::log(vK) - vL * std::log(vL);
    };
    for (int i = 0; i <= cfg.polygon_pairs; ++i) {
      bool witness = i == cfg.polygon_pairs;
      const Polygon& K = pool[i % pool.size()];
      Polygon L = witness ? translate(K, {0.3, 0.1}) : pool[(i + 7) % pool.size()];
      Polygon M = witness ? translate(K, {-1.0, 0.4}) : pool[(i + 13) % pool.size()];
      sink.run("mixed_volume", witness ? std::string("translates") : "triple" + std::to_string(i), witness,
               witness ? wtol : itol, Digest().add(K).add(L).add(M), [&](InequalityReport& r) { mv(K, L, M, r); });
    }
  }

  // Ω_♯ items work on pairs: Ω_Q only sees the pair, and ♯ adds pairs.
  struct NamedPair {
    std::string name;
    SurfaceAreaPair p;
  };
  std::vector<NamedPair> planar;
  for (const auto* f : poly) planar.push_back({f->name, extract_pair(f->f)});
  const SurfaceAreaPair ball_pair = embed_radial(extract_radial_pair(ball), 256);

  // (e) Ω_♯(f♯g)^{3/2} ≥ Ω_♯(f)^{3/2} + Ω_♯(g)^{3/2}
  if (sink.enabled("omega_superadditivity")) {
    auto super = [&](const SurfaceAreaPair& p, const SurfaceAreaPair& q, InequalityReport& r) {
      OmegaResult s = affine_surface_area(p + q, cfg.omega);
      OmegaConfig seeded = cfg.omega;
      seeded.extra_seeds.push_back(s.Q);
      r.lhs = detail::sharp_pow(s.value);
      r.rhs = detail::sharp_pow(affine_surface_area(p, seeded).value) +
              detail::sharp_pow(affine_surface_area(q, seeded).value);
    };
    for (std::size_t i = 0; i + 1 < planar.size() && i < 10; i += 2)
      sink.run("omega_superadditivity", planar[i].name + "|" + planar[i + 1].name, false, itol,
               Digest().add(planar[i].p).add(planar[i + 1].p),
               [&](InequalityReport& r) { super(planar[i].p, planar[i + 1].p, r); });
    sink.run("omega_superadditivity", "ball|ball", true, wtol, Digest().add(ball_pair),
             [&](InequalityReport& r) { super(ball_pair, ball_pair, r); });
  }

  // (f) Ω_♯(B_u^♯ f) ≥ Ω_♯(f); the candidate R_u Q* is scored as Ω_{Q*}(R_u f).
  if (sink.enabled("omega_symmetral")) {
    auto mono = [&](const SurfaceAreaPair& p, Vec2 u, InequalityReport& r) {
      OmegaResult s = affine_surface_area(symmetral_pair(p, u), cfg.omega);
      OmegaConfig seeded = cfg.omega;
      seeded.extra_seeds.push_back(s.Q);
      OmegaResult o = affine_surface_area(p, seeded);
      double best = std::min(o.inf_omega, omega_Q(transformed(directional_atoms(p), detail::reflection_matrix(u)), s.Q));
      r.lhs = s.value;
      r.rhs = omega_sharp_from_inf(best);
    };
    const std::vector<double> angles{0.0, 0.9};
    for (std::size_t i = 0; i < planar.size() && i < 8; ++i)
      for (double a : angles)
        sink.run("omega_symmetral", planar[i].name + "@u=" + std::to_string(a), false, itol,
                 Digest().add(planar[i].p).add(a), [&](InequalityReport& r) { mono(planar[i].p, unit(a), r); });
    SurfaceAreaPair sq = extract_pair(square_indicator());
    sink.run("omega_symmetral", "square@u=e1", true, wtol, Digest().add(sq),
             [&](InequalityReport& r) { mono(sq, {1.0, 0.0}, r); });
  }

  // (g) nωₙ G_♯^n ≥ Ω_♯^{n+1}
  if (sink.enabled("petty")) {
    auto petty = [&](const std::vector<DirectionalAtom>& atoms, InequalityReport& r) {
      OmegaResult G = geominimal_surface_area(atoms, cfg.omega);
      OmegaConfig seeded = cfg.omega;
      seeded.extra_seeds.push_back(G.Q);
      OmegaResult O = affine_surface_area(atoms, seeded);
      r.lhs = 2.0 * pi * G.value * G.value;
      r.rhs = std::pow(O.value, 3);
    };
    for (const auto& np : planar)
      sink.run("petty", np.name, false, itol, Digest().add(np.p),
               [&](InequalityReport& r) { petty(directional_atoms(np.p), r); });
    for (const auto* f : rad) {
      if (f->f.dim() != 2) continue;
      RadialPair p = extract_radial_pair(f->f);
      sink.run("petty", f->name, false, itol, Digest().add(p),
               [&](InequalityReport& r) { petty(directional_atoms(p, cfg.omega.grid), r); });
    }
    RadialPair bp = extract_radial_pair(ball);
    sink.run("petty", "ball", true, wtol, Digest().add(bp),
             [&](InequalityReport& r) { petty(directional_atoms(bp, cfg.omega.grid), r); });
  }

  // Affine covariance. δ(f∘T, 1_K)|det T| = δ(f, 1_{TK}) is exact on the polyhedral corpus. For
  // Ω_♯(f∘T)|det T|^{1/3} = Ω_♯(f) the instances are dense directional measures (ball and Gaussian
  // pulled back by T): on purely atomic pairs the discrete optimum is ≈ Δ^{1/3}Σw^{2/3}, a grid
  // artifact of the zero infimum that is not affine invariant.
  if (sink.enabled("covariance")) {
    PortableRng trng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    const Polygon K = pool.front();
    for (std::size_t i = 0; i < poly.size(); ++i) {
      Mat2 T = detail::random_transform(trng);
      const auto& f = poly[i]->f;
      PolyhedralLogConcave fT = affine_image(f, T);
      sink.run("delta_covariance", poly[i]->name, true, wtol, Digest().add(f).add(T.a).add(T.b).add(T.c).add(T.d),
               [&](InequalityReport& r) {
                 r.lhs = first_variation(extract_pair(fT), K) * std::abs(T.det());
                 r.rhs = first_variation(extract_pair(f), linear_image(K, T));
               });
    }
    std::vector<std::pair<std::string, RadialPair>> dense{{"ball", extract_radial_pair(ball)}};
    for (const auto* f : rad)
      if (f->f.dim() == 2 && f->name != "disk2") dense.push_back({f->name, extract_radial_pair(f->f)});
    for (const auto& [name, p] : dense)
      for (int k = 0; k < 2; ++k) {
        Mat2 T = detail::random_transform(trng);
        sink.run("omega_covariance", name + "#" + std::to_string(k), true, cfg.covariance_tol,
                 Digest().add(p).add(T.a).add(T.b).add(T.c).add(T.d), [&](InequalityReport& r) {
                   // Ω_{TᵀP}(f∘T) = |det T|^{−1/2} Ω_P(f): each side is also started from the other's optimum.
                   auto pf = directional_atoms(p, cfg.omega.grid);
                   auto pT = pullback(pf, T);
                   OmegaResult a = affine_surface_area(pf, cfg.omega), b = affine_surface_area(pT, cfg.omega);
                   OmegaConfig ca = cfg.omega, cb = cfg.omega;
                   cb.extra_seeds.push_back(a.Q.linear_image(T.transpose()));
                   ca.extra_seeds.push_back(b.Q.linear_image(T.transpose().inverse()));
                   double va = std::min(a.value, affine_surface_area(pf, ca).value);
                   double vb = std::min(b.value, affine_surface_area(pT, cb).value);
                   r.lhs = vb * std::cbrt(std::abs(T.det()));
                   r.rhs = va;
                 });
      }
  }
  return out;
}

/// F(f) ≤ F(f^♯) for F ∈ {Ent, Ω_♯}; radial f are equality witnesses.
inline InequalityReport comparison_principle_check(const std::string& F, const LogConcave& f,
                                                   const SolverConfig& scfg = {}, const OmegaConfig& ocfg = {}) {
  InequalityReport r;
  r.name = "comparison_" + F;
  bool radial = std::holds_alternative<RadialLogConcave>(f);
  r.instance = radial ? "radial" : "polyhedral";
  r.equality_witness = radial;
  r.tolerance = radial ? 1e-4 : 1e-8;
  Digest d;
  std::visit([&](const auto& g) { d.add(g); }, f);
  r.digest = d.add(F).hex();
  auto t0 = std::chrono::steady_clock::now();
  try {
    if (F == "entropy") {
      r.lhs = entropy(mean_blaschke_symmetral(f, scfg).function);
      r.rhs = entropy(f);
    } else if (F == "omega") {
      // f^♯ is radial, where the infimum sits at the ball and Ω_♯ has a closed form.
      RadialPair sym = extract_radial_pair(mean_blaschke_symmetral(f, scfg).function);
      r.lhs = radial_affine_surface_area(sym.dim, quermassintegral_W1(sym));
      r.rhs = std::visit([&](const auto& g) { return affine_surface_area(g, ocfg).value; }, f);
    } else {
      throw InvalidFunction("unknown functional " + F + " (expected entropy or omega)");
    }
    r.margin = r.lhs - r.rhs;
  } catch (const std::exception& e) {
    r.error = e.what();
    r.lhs = r.rhs = r.margin = 0.0;
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

} // namespace blaschke_lab

#endif
