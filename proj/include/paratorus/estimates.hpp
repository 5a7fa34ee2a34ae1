#pragma once

// Monte-Carlo bound-ratio suites: each draws random rough fields of
// prescribed Hoelder-Besov regularity and records |lhs| / (product of norms)
// for one continuity estimate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "paratorus/errors.hpp"
#include "paratorus/field.hpp"
#include "paratorus/noise.hpp"
#include "paratorus/nonlinear.hpp"
#include "paratorus/paraproducts.hpp"
#include "paratorus/parallel.hpp"
#include "paratorus/spectral.hpp"
#include "paratorus/symbols.hpp"
#include "paratorus/trajectory.hpp"

namespace paratorus {

/// sum_{k != 0} |k|^{-(1+gamma)} g_k e_k with Hermitian complex Gaussians g_k
/// (unit variance), Nyquist modes zero; lies in C^gamma up to a log factor.
inline TorusField rough_field(const Grid& g, double gamma, GaussianSource& normal, double mean = 0.0) {
  std::vector<cplx> spec(g.size(), cplx(0.0, 0.0));
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  for (std::size_t idx = 1; idx < g.size(); ++idx) {
    const Mode k = g.mode(idx);
    if (g.is_nyquist(idx) || !(k.k1 > 0 || (k.k1 == 0 && k.k2 > 0))) continue;
    const double amp = std::pow(k.norm(), -(1.0 + gamma));
    const double a = normal(), b = normal();
    spec[idx] = amp * cplx(a, b) * inv_sqrt2;
    spec[g.index(-k)] = amp * cplx(a, -b) * inv_sqrt2;
  }
  spec[0] = mean;
  return TorusField::from_spectral(g, std::move(spec), true);
}

/// Band-limited version: modes with |k| > radius are dropped.
inline TorusField band_limited_field(const Grid& g, double gamma, double radius, GaussianSource& normal) {
  TorusField f = rough_field(g, gamma, normal);
  std::vector<double> keep(g.size());
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = g.mode_norms()[i] <= radius ? 1.0 : 0.0;
  return f.multiplied(keep);
}

/// One random-phase mode of modulus about 2^j per dyadic shell, amplitude
/// 2^{-alpha j}, random direction: every block has sup norm ~ 2^{-alpha j}, so
/// the C^alpha norm carries no logarithmic factor.
inline TorusField lacunary_field(const Grid& g, double alpha, GaussianSource& normal) {
  auto part = partition_for(g);
  std::vector<cplx> spec(g.size(), cplx(0.0, 0.0));
  for (int j = 0; j <= part->j_max(); ++j) {
    const double dir = std::atan2(normal(), normal());
    const double phase = std::atan2(normal(), normal());
    const double r = std::ldexp(1.0, j);
    const Mode k{static_cast<int>(std::lround(r * std::cos(dir))), static_cast<int>(std::lround(r * std::sin(dir)))};
    if (k.norm2() == 0 || !g.contains(k) || !g.contains(-k)) continue;
    const cplx c = 0.5 * std::exp2(-alpha * j) * std::polar(1.0, phase);
    spec[g.index(k)] += c;
    spec[g.index(-k)] += std::conj(c);
  }
  return TorusField::from_spectral(g, std::move(spec), true);
}

struct EstimateResult {
  std::string name;
  std::string statement;
  int n = 0;
  int samples = 0;
  std::vector<double> ratios;
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
};

using RatioSample = std::function<double(const Grid&, GaussianSource&)>;

struct EstimateSuite {
  std::string name;
  std::string statement;
  RatioSample sample;
};

inline EstimateResult run_estimate(const EstimateSuite& suite, int n, int samples, std::uint64_t master) {
  const Grid g(n);
  EstimateResult r;
  r.name = suite.name;
  r.statement = suite.statement;
  r.n = n;
  r.samples = samples;
  // the suite name enters the seed so suites draw independent fields
  std::uint64_t tag = 0;
  for (char c : suite.name) tag = splitmix64(tag ^ static_cast<unsigned char>(c));
  r.ratios = parallel_map<double>(static_cast<std::size_t>(samples), [&](std::size_t m) {
    GaussianSource normal(sample_seed(master ^ tag, m));
    return suite.sample(g, normal);
  });
  for (double v : r.ratios) {
    r.max_ratio = std::max(r.max_ratio, v);
    r.mean_ratio += v;
  }
  if (samples > 0) r.mean_ratio /= samples;
  return r;
}

namespace suites {

inline EstimateSuite paraproduct(double beta = -0.5) {
  return {"paraproduct", "||P_u v||_{C^b} <= C ||u||_inf ||v||_{C^b}, b=" + std::to_string(beta),
          [beta](const Grid& g, GaussianSource& z) {
            const TorusField u = rough_field(g, 0.5, z, 0.3);
            const TorusField v = rough_field(g, beta, z);
            return besov_norm(para(u, v), beta) / (u.sup_norm() * besov_norm(v, beta));
          }};
}

inline EstimateSuite resonant_product(double alpha = 0.7, double beta = -0.5) {
  return {"resonant",
          "||Pi(u,v)||_{C^{a+b}} <= C ||u||_{C^a} ||v||_{C^b}, a=" + std::to_string(alpha) +
              ", b=" + std::to_string(beta),
          [alpha, beta](const Grid& g, GaussianSource& z) {
            const TorusField u = rough_field(g, alpha, z, 0.3);
            const TorusField v = rough_field(g, beta, z);
            return besov_norm(resonant(u, v), alpha + beta) / (besov_norm(u, alpha) * besov_norm(v, beta));
          }};
}

inline EstimateSuite corrector_bound(double alpha = 0.6, double beta = 0.5, double gamma = -0.8) {
  return {"corrector",
          "||C(u,v,w)||_{C^{a+b+c}} <= C ||u||_{C^a} ||v||_{C^b} ||w||_{C^c}, a=" + std::to_string(alpha) +
              ", b=" + std::to_string(beta) + ", c=" + std::to_string(gamma),
          [=](const Grid& g, GaussianSource& z) {
            const TorusField u = rough_field(g, alpha, z, 0.3);
            const TorusField v = rough_field(g, beta, z);
            const TorusField w = rough_field(g, gamma, z);
            return besov_norm(corrector(u, v, w), alpha + beta + gamma) /
                   (besov_norm(u, alpha) * besov_norm(v, beta) * besov_norm(w, gamma));
          }};
}

inline EstimateSuite merge_bound(double alpha = 0.7, double beta = 0.6) {
  return {"merge",
          "||P_h1(P_h2 h3) - P_{h1 h2} h3||_{C^{a+b}} <= C ||h1||_{C^a} ||h2||_{C^b} ||h3||_{C^a}, a=" +
              std::to_string(alpha) + ", b=" + std::to_string(beta),
          [=](const Grid& g, GaussianSource& z) {
            const TorusField h1 = rough_field(g, alpha, z, 0.3);
            const TorusField h2 = rough_field(g, beta, z, 0.3);
            const TorusField h3 = rough_field(g, alpha, z);
            return besov_norm(merge_defect(h1, h2, h3), alpha + beta) /
                   (besov_norm(h1, alpha) * besov_norm(h2, beta) * besov_norm(h3, alpha));
          }};
}

inline EstimateSuite paralinearization(double alpha = 0.4) {
  return {"paralinearization",
          "||R_f(u)||_{C^{2a}} <= C ||f||_{C^2_b} (1 + ||u||_{C^a}^2), f=sin, a=" + std::to_string(alpha),
          [alpha](const Grid& g, GaussianSource& z) {
            const NonlinearFn f = sine_fn(1.0);
            const TorusField u = rough_field(g, alpha, z, 0.3);
            const double nu = besov_norm(u, alpha);
            return besov_norm(paralin_remainder(f, u), 2.0 * alpha) / (f.c3b_bound * (1.0 + nu * nu));
          }};
}

inline EstimateSuite composition_lipschitz(double alpha = 0.4) {
  return {"lipschitz",
          "||f(u) - f(v)||_{C^a} <= C (1 + ||u||_{C^a}) ||u - v||_{C^a}, f=sin, a=" + std::to_string(alpha),
          [alpha](const Grid& g, GaussianSource& z) {
            const NonlinearFn f = sine_fn(1.0);
            const TorusField u = rough_field(g, alpha, z, 0.3);
            const TorusField d = 0.2 * rough_field(g, alpha, z);
            const TorusField v = u + d;
            return besov_norm(u.mapped(f.f) - v.mapped(f.f), alpha) /
                   (f.c3b_bound * (1.0 + besov_norm(u, alpha)) * besov_norm(d, alpha));
          }};
}

/// f(t) = f0 + (t/T)^{a/2} f1 on 17 nodes over [0, 1/4]; the ratio is the
/// largest over the middle and final nodes.
inline EstimateSuite modified_vs_plain(double alpha = 0.8, double beta = -0.3) {
  return {"modified-vs-plain",
          "||(P-bar_f g - P_f g)(t)||_{C^{a+b}} <= C ||f||_{C^{a/2}L^inf} ||g||_{C^b}, a=" +
              std::to_string(alpha) + ", b=" + std::to_string(beta),
          [=](const Grid& g, GaussianSource& z) {
            const double T = 0.25;
            const std::size_t nodes = 17;
            const double dt = T / static_cast<double>(nodes - 1);
            const TorusField f0 = rough_field(g, 0.5, z, 0.3);
            const TorusField f1 = rough_field(g, 0.5, z);
            std::vector<TorusField> fs;
            for (std::size_t m = 0; m < nodes; ++m) {
              const double s = std::pow(static_cast<double>(m) / static_cast<double>(nodes - 1), alpha / 2.0);
              fs.push_back(TorusField::combine(f0, f1, 1.0, s));
            }
            const Trajectory f(dt, std::move(fs));
            const TorusField h = rough_field(g, beta, z);
            const double fnorm = std::max(sup_time_sup_norm(f), time_hoelder_seminorm(f, alpha / 2.0));
            const TimeMollifier mol;
            double lhs = 0.0;
            for (std::size_t node : {nodes / 2, nodes - 1}) {
              lhs = std::max(lhs, besov_norm(modified_para_at(f, h, node, mol) - para(f[node], h), alpha + beta));
            }
            return lhs / (fnorm * besov_norm(h, beta));
          }};
}

/// (d_t - w Lap)(P-bar_v X) - P_{wv}(-Lap X) at the middle of 17 nodes on
/// [0, 1/4], d_t by a centred difference; v(t) = v0 + t v1.
inline EstimateSuite weighted_laplacian_commutator(double alpha = 0.9, double beta = 0.7) {
  return {"weighted-commutator",
          "||(d_t - w Lap)(P-bar_v X) - P_{wv}(-Lap X)||_{C^{a+b-2}} <= C (1 + ||w||_{C^{2b}}) ||v||_{C^b_T} "
          "||X||_{C^a}, a=" + std::to_string(alpha) + ", b=" + std::to_string(beta),
          [=](const Grid& g, GaussianSource& z) {
            const double T = 0.25;
            const std::size_t nodes = 17;
            const double dt = T / static_cast<double>(nodes - 1);
            const TorusField v0 = rough_field(g, beta, z, 0.3);
            const TorusField v1 = rough_field(g, beta, z);
            std::vector<TorusField> vs;
            for (std::size_t m = 0; m < nodes; ++m) vs.push_back(TorusField::combine(v0, v1, 1.0, dt * m));
            const Trajectory v(dt, std::move(vs));
            const TorusField w = rough_field(g, 2.0 * beta, z, 1.0);
            const TorusField X = rough_field(g, alpha, z);
            const TimeMollifier mol;
            const std::size_t mid = nodes / 2;
            const TorusField p_minus = modified_para_at(v, X, mid - 1, mol);
            const TorusField p_mid = modified_para_at(v, X, mid, mol);
            const TorusField p_plus = modified_para_at(v, X, mid + 1, mol);
            const TorusField dtp = (1.0 / (2.0 * dt)) * (p_plus - p_minus);
            const TorusField lhs = dtp - dealiased_product(w, laplacian(p_mid)) -
                                   para(dealiased_product(w, v[mid]), -laplacian(X));
            const double rhs = (1.0 + besov_norm(w, 2.0 * beta)) * parabolic_norm(v, beta) * besov_norm(X, alpha);
            return besov_norm(lhs, alpha + beta - 2.0) / rhs;
          }};
}

/// Op(a)(P_h1 h2) - P_h1(Op(a) h2) for a(x,k) = (1 + cos(x1)/2) 1_{k != 0} <k>^s.
inline EstimateSuite symbol_commutator(double a1 = 0.5, double a2 = 0.3, double s = -0.5) {
  return {"symbol-commutator",
          "||Op(a)(P_h1 h2) - P_h1(Op(a) h2)||_{C^{a1+a2-s}} <= C ||h1||_{C^a1} ||h2||_{C^a2}, a1=" +
              std::to_string(a1) + ", a2=" + std::to_string(a2) + ", s=" + std::to_string(s),
          [=](const Grid& g, GaussianSource& z) {
            const TorusField theta =
                TorusField::sample(g, [](double x1, double) { return 1.0 + 0.5 * std::cos(x1); });
            const Symbol a = make_modulated_symbol(
                theta,
                [s](const Mode& k) {
                  return k.norm2() == 0 ? cplx(0.0, 0.0) : cplx(std::pow(japanese(k.norm()), s), 0.0);
                },
                0.5, s);
            const TorusField h1 = rough_field(g, a1, z, 0.3);
            const TorusField h2 = rough_field(g, a2, z);
            return besov_norm(commutator_para(a, h1, h2), a1 + a2 - s) / (besov_norm(h1, a1) * besov_norm(h2, a2));
          }};
}

}  // namespace suites

/// The suites run by check-estimates, in output order.
inline std::vector<EstimateSuite> estimate_catalog() {
  return {suites::paraproduct(),         suites::resonant_product(),   suites::corrector_bound(),
          suites::merge_bound(),         suites::paralinearization(),  suites::composition_lipschitz(),
          suites::modified_vs_plain(),   suites::weighted_laplacian_commutator(),
          suites::symbol_commutator()};
}

struct SchauderReport {
  std::vector<double> times;
  std::vector<double> smoothing_slopes;  // per sample, d log ||e^{t Lap} u||_{C^{a+d}} / d log t
  double min_smoothing_slope = 0.0;
  std::vector<double> max_heat_ratio;    // per t, max over samples of ||e^{t Lap}u - u||_inf / t^{a/2}
  double heat_ratio_slope = 0.0;         // d log max_heat_ratio / d log t
  double gaussian_min_smoothing_slope = 0.0;  // same smoothing fit on rough_field samples
};

/// Heat-semigroup checks on unit C^alpha lacunary samples for
/// t = 2^{-10}, ..., 2^{-2}. The smoothing fit is also reported for the
/// Gaussian rough_field samples, whose extra log factor steepens it.
inline SchauderReport schauder_study(int n, int samples, double alpha, double delta, std::uint64_t master) {
  const Grid g(n);
  SchauderReport rep;
  for (int e = -10; e <= -2; ++e) rep.times.push_back(std::ldexp(1.0, e));
  std::vector<double> logt;
  for (double t : rep.times) logt.push_back(std::log(t));
  struct PerSample {
    double slope;
    double gaussian_slope;
    std::vector<double> ratios;
  };
  const auto per = parallel_map<PerSample>(static_cast<std::size_t>(samples), [&](std::size_t m) {
    GaussianSource z(sample_seed(master, m));
    TorusField u = lacunary_field(g, alpha, z);
    u = (1.0 / besov_norm(u, alpha)) * u;
    TorusField r = rough_field(g, alpha, z);
    r = (1.0 / besov_norm(r, alpha)) * r;
    PerSample ps;
    std::vector<double> logn, logr;
    for (double t : rep.times) {
      const TorusField h = heat_semigroup(u, t);
      logn.push_back(std::log(besov_norm(h, alpha + delta)));
      logr.push_back(std::log(besov_norm(heat_semigroup(r, t), alpha + delta)));
      ps.ratios.push_back((h - u).sup_norm() / std::pow(t, alpha / 2.0));
    }
    ps.slope = fit_slope(logt, logn);
    ps.gaussian_slope = fit_slope(logt, logr);
    return ps;
  });
  rep.max_heat_ratio.assign(rep.times.size(), 0.0);
  rep.min_smoothing_slope = std::numeric_limits<double>::infinity();
  rep.gaussian_min_smoothing_slope = std::numeric_limits<double>::infinity();
  for (const auto& ps : per) {
    rep.gaussian_min_smoothing_slope = std::min(rep.gaussian_min_smoothing_slope, ps.gaussian_slope);
    rep.smoothing_slopes.push_back(ps.slope);
    rep.min_smoothing_slope = std::min(rep.min_smoothing_slope, ps.slope);
    for (std::size_t i = 0; i < ps.ratios.size(); ++i)
      rep.max_heat_ratio[i] = std::max(rep.max_heat_ratio[i], ps.ratios[i]);
  }
  std::vector<double> logr;
  for (double r : rep.max_heat_ratio) logr.push_back(std::log(r));
  rep.heat_ratio_slope = fit_slope(logt, logr);
  return rep;
}

}  // namespace paratorus
