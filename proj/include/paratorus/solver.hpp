#pragma once

// IMEX integration of
//   du/dt = A(f(u)) Lap u + B(g(u)) xi^eps + c_a (B(g(u))/A(f(u)))^2 f'(u)
//           - c_b B(g(u))/A(f(u)) g'(u)
// with the diffusion split as cbar Lap u (implicit, exact in Fourier) plus
// (A(f(u)) - cbar) Lap u (explicit), cbar = min_x A(f(u)).

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "paratorus/errors.hpp"
#include "paratorus/field.hpp"
#include "paratorus/noise.hpp"
#include "paratorus/nonlinear.hpp"
#include "paratorus/paraproducts.hpp"
#include "paratorus/parallel.hpp"
#include "paratorus/renorm.hpp"
#include "paratorus/spectral.hpp"
#include "paratorus/symbols.hpp"
#include "paratorus/trajectory.hpp"

namespace paratorus {

struct SolverConfig {
  Grid grid{64};
  double alpha = 0.9;
  double beta = 0.7;
  Symbol a;
  Symbol b;
  NonlinearFn f;
  NonlinearFn g;
  double eps = 0.125;
  double dt = 1e-3;          // step cap; adaptive steps never exceed it
  double T = 0.25;
  std::optional<double> t_smooth;  // initial smoothing time, default 4 dt
  double output_dt = 0.01;   // spacing of stored trajectory nodes
  std::uint64_t seed = 0;
  bool counterterms = true;
  bool adaptive = true;
  double floor = 1e-6;
  double blowup_cap = 1e3;
  int positivity_trials = 16;

  double smoothing_time() const { return t_smooth.value_or(4.0 * dt); }
  std::size_t output_nodes() const {
    return static_cast<std::size_t>(std::llround(T / output_dt)) + 1;
  }

  void validate() const {
    if (!(2.0 / 3.0 < beta && beta < alpha && alpha < 1.0)) {
      throw ConfigError("exponents must satisfy 2/3 < beta < alpha < 1");
    }
    require_resolved_cutoff(grid, eps);
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(T > 0.0)) throw ConfigError("T must be positive");
    if (!(output_dt > 0.0) || output_dt > T) throw ConfigError("output spacing must lie in (0, T]");
    const double nodes = T / output_dt;
    if (std::abs(nodes - std::round(nodes)) > 1e-9 * nodes) {
      throw ConfigError("T must be an integer multiple of the output spacing");
    }
    if (smoothing_time() < 0.0) throw ConfigError("smoothing time must be nonnegative");
    if (!(a.grid() == grid) || !(b.grid() == grid)) throw ConfigError("symbols must live on the solver grid");
    if (a.order() > 0.0 || b.order() > 0.0) throw ConfigError("symbol orders must be <= 0");
    if (!f.f || !g.f) throw ConfigError("f and g must be set");
    if (!f.lower_bound || !(*f.lower_bound > 0.0)) {
      throw ConfigError("f needs a declared positive lower bound");
    }
    if (!positivity_certificate(a, positivity_trials, 0x5eed).pass) {
      throw ConfigError("symbol a does not pass the positivity certificate");
    }
  }
};

/// Regularized noise and counterterm fields for one (noise draw, eps).
struct Forcing {
  TorusField xi_eps;
  TorusField c_a;
  TorusField c_b;
};

struct Counterterms {
  TorusField c_a;
  TorusField c_b;
};

inline Counterterms make_counterterms(const SolverConfig& cfg) {
  return {renorm_constant(cfg.a, cfg.eps), renorm_constant(cfg.b, cfg.eps)};
}

inline Forcing make_forcing(const SolverConfig& cfg, const NoiseRealization& xi, const Counterterms& ct) {
  return {regularize(xi.xi, cfg.eps), ct.c_a, ct.c_b};
}

inline Forcing make_forcing(const SolverConfig& cfg, const NoiseRealization& xi) {
  return make_forcing(cfg, xi, make_counterterms(cfg));
}

struct SolveStats {
  std::size_t steps = 0;
  double min_dt = std::numeric_limits<double>::infinity();
  double min_cbar = std::numeric_limits<double>::infinity();
  double max_coefficient = 0.0;
};

namespace detail {

inline std::string location(const Grid& g, std::size_t idx) {
  std::ostringstream os;
  os << "x=(" << (idx / g.n()) * g.spacing() << "," << (idx % g.n()) * g.spacing() << ")";
  return os.str();
}

}  // namespace detail

inline Trajectory solve_renormalized(const SolverConfig& cfg, const Forcing& forcing, const TorusField& u0,
                                     SolveStats* stats = nullptr) {
  const Grid& grid = cfg.grid;
  require_same_grid(grid, u0.grid(), "solve_renormalized");
  require_same_grid(grid, forcing.xi_eps.grid(), "solve_renormalized");
  const std::size_t n2 = grid.size();
  const auto& lam = grid.mode_norms2();
  double lam_max = 0.0;
  for (double l : lam) lam_max = std::max(lam_max, l);

  const bool use_ca = cfg.counterterms && !cfg.f.constant_value;
  const bool use_cb = cfg.counterterms && !cfg.g.constant_value;
  const auto& xi = forcing.xi_eps.physical();
  const auto& ca = forcing.c_a.physical();
  const auto& cb = forcing.c_b.physical();

  const std::size_t nodes = cfg.output_nodes();
  std::vector<TorusField> out;
  out.reserve(nodes);
  TorusField u = heat_semigroup(u0, cfg.smoothing_time());
  out.push_back(u);

  SolveStats st;
  std::vector<cplx> rhs(n2), rhs_hat(n2), next(n2);
  double t = 0.0;
  for (std::size_t node = 1; node < nodes; ++node) {
    const double t_node = cfg.output_dt * static_cast<double>(node);
    while (t < t_node) {
      const TorusField af = apply_op(cfg.a, u.mapped(cfg.f.f));
      const TorusField bg = apply_op(cfg.b, u.mapped(cfg.g.f));
      double cbar = std::numeric_limits<double>::infinity(), amax = -cbar;
      std::size_t where = 0;
      for (std::size_t i = 0; i < n2; ++i) {
        const double v = af.physical()[i].real();
        if (v < cbar) {
          cbar = v;
          where = i;
        }
        amax = std::max(amax, v);
      }
      if (!(cbar >= cfg.floor)) {
        std::ostringstream os;
        os << "ellipticity lost at t=" << t << ", " << detail::location(grid, where)
           << ": A(f(u))=" << cbar << " below floor " << cfg.floor;
        throw NumericalError(os.str());
      }
      double step = std::min(cfg.dt, t_node - t);
      // frozen-coefficient stability of the explicit remainder: unconditional
      // while max A - cbar <= cbar, otherwise dt (max A - 2 cbar) lam_max <= 1
      if (cfg.adaptive && amax - cbar > cbar) step = std::min(step, 1.0 / ((amax - 2.0 * cbar) * lam_max));
      if (step < 1e-12 * cfg.T) throw NumericalError("time step collapsed at t=" + std::to_string(t));

      const TorusField lap = laplacian(u);
      const auto& up = u.physical();
      for (std::size_t i = 0; i < n2; ++i) {
        const double av = af.physical()[i].real();
        const double bv = bg.physical()[i].real();
        double r = (av - cbar) * lap.physical()[i].real() + bv * xi[i].real();
        if (use_ca || use_cb) {
          const double q = bv / av;
          const double x = up[i].real();
          if (use_ca) r += ca[i].real() * q * q * cfg.f.d1(x);
          if (use_cb) r -= cb[i].real() * q * cfg.g.d1(x);
        }
        rhs[i] = r;
      }
      fft_forward(grid.n(), rhs.data(), rhs_hat.data());
      const auto& uh = u.spectral();
      for (std::size_t k = 0; k < n2; ++k) next[k] = (uh[k] + step * rhs_hat[k]) / (1.0 + step * cbar * lam[k]);
      u = TorusField::from_spectral(grid, next, true);

      const double sup = u.sup_norm();
      if (!(sup <= cfg.blowup_cap)) {
        std::ostringstream os;
        os << "blow-up at t=" << t + step << ": ||u||_inf=" << sup << " exceeds cap " << cfg.blowup_cap
           << " (step " << st.steps << ", dt=" << step << ")";
        throw NumericalError(os.str());
      }
      t = (t_node - (t + step) <= 1e-12 * cfg.T) ? t_node : t + step;
      ++st.steps;
      st.min_dt = std::min(st.min_dt, step);
      st.min_cbar = std::min(st.min_cbar, cbar);
      st.max_coefficient = std::max(st.max_coefficient, amax);
    }
    out.push_back(u);
  }
  if (stats) *stats = st;
  return Trajectory(cfg.output_dt, std::move(out));
}

inline Trajectory solve_renormalized(const SolverConfig& cfg, const NoiseRealization& xi, const TorusField& u0,
                                     SolveStats* stats = nullptr) {
  return solve_renormalized(cfg, make_forcing(cfg, xi), u0, stats);
}

/// Per-mode Duhamel solution of du/dt - c0 Lap u = xi_eps sampled at t = m dt.
inline Trajectory exact_linear_solve(const TorusField& xi_eps, double c0, const TorusField& u0, double T,
                                     double dt) {
  if (!(c0 > 0.0)) throw ArgumentError("exact_linear_solve: c0 must be positive");
  if (!(dt > 0.0) || !(T > 0.0)) throw ArgumentError("exact_linear_solve: T and dt must be positive");
  require_same_grid(xi_eps.grid(), u0.grid(), "exact_linear_solve");
  const Grid& g = u0.grid();
  const auto steps = static_cast<std::size_t>(std::llround(T / dt));
  const auto& lam = g.mode_norms2();
  std::vector<TorusField> out;
  out.reserve(steps + 1);
  for (std::size_t m = 0; m <= steps; ++m) {
    const double t = dt * static_cast<double>(m);
    std::vector<cplx> s(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (lam[k] == 0.0) {
        s[k] = u0.spectral()[k] + t * xi_eps.spectral()[k];
        continue;
      }
      const double decay = std::exp(-c0 * lam[k] * t);
      s[k] = decay * u0.spectral()[k] + (-std::expm1(-c0 * lam[k] * t)) / (c0 * lam[k]) * xi_eps.spectral()[k];
    }
    out.push_back(TorusField::from_spectral(g, std::move(s), u0.is_real() && xi_eps.is_real()));
  }
  return Trajectory(dt, std::move(out));
}

/// u' = B(g(u)) / A(f(u)) at one time, with the floor check.
inline TorusField gubinelli_derivative(const TorusField& u, const Symbol& a, const Symbol& b,
                                       const NonlinearFn& f, const NonlinearFn& g, double floor = 1e-6) {
  const TorusField af = apply_op(a, u.mapped(f.f));
  const double m = af.min_real();
  if (!(m >= floor)) {
    throw NumericalError("ellipticity lost: min A(f(u)) = " + std::to_string(m) + " below floor");
  }
  return pointwise_quotient(apply_op(b, u.mapped(g.f)), af);
}

struct ParacontrolledPair {
  Trajectory uprime;
  Trajectory usharp;
  TorusField X;
  /// P-bar_{u'} X + u#, equal to u by construction.
  Trajectory reconstruct(const TimeMollifier& m) const {
    const Trajectory px = modified_para(uprime, X, m);
    std::vector<TorusField> out;
    for (std::size_t i = 0; i < px.size(); ++i) out.push_back(px[i] + usharp[i]);
    return Trajectory(usharp.dt(), std::move(out));
  }
};

inline Trajectory gubinelli_derivative(const Trajectory& u, const Symbol& a, const Symbol& b,
                                       const NonlinearFn& f, const NonlinearFn& g, double floor = 1e-6) {
  std::vector<TorusField> up;
  up.reserve(u.size());
  for (const auto& field : u.fields()) up.push_back(gubinelli_derivative(field, a, b, f, g, floor));
  return Trajectory(u.dt(), std::move(up));
}

inline ParacontrolledPair extract_paracontrolled(const Trajectory& u, const TorusField& X, const Symbol& a,
                                                 const Symbol& b, const NonlinearFn& f, const NonlinearFn& g,
                                                 const TimeMollifier& m, double floor = 1e-6) {
  Trajectory up = gubinelli_derivative(u, a, b, f, g, floor);
  const Trajectory px = modified_para(up, X, m);
  return {std::move(up), u - px, X};
}

/// Initial conditions by name: "zero", or "bump" = 0.5 + 0.25 sin(x1) cos(x2).
inline TorusField initial_condition(const std::string& name, const Grid& g) {
  if (name == "zero") return TorusField::zero(g);
  if (name == "bump") {
    return TorusField::sample(g, [](double x1, double x2) { return 0.5 + 0.25 * std::sin(x1) * std::cos(x2); });
  }
  throw ConfigError("unknown initial condition '" + name + "' (expected zero or bump)");
}

struct LadderOptions {
  std::vector<double> ladder;
  int samples = 1;
  std::uint64_t master_seed = 0;
  double report_alpha = 0.5;
  bool ablation = false;
  bool paracontrolled = false;
};

struct LadderStudy {
  std::vector<double> ladder;
  int samples = 0;
  double report_alpha = 0.5;
  // E parabolic_norm(u^eps - u^eta, report_alpha) per consecutive pair
  std::vector<double> diff_mean;
  std::vector<int> diff_count;
  bool strictly_decreasing = true;
  double diff_slope = std::numeric_limits<double>::quiet_NaN();  // d log diff / d log eps
  int failures = 0;
  std::vector<std::string> failure_log;
  // counterterm ablation
  std::vector<double> ablation_gap_mean;   // E sup_t ||u_no-ct - u_ct||_inf per eps
  std::vector<double> ablation_diff_mean;  // successive differences without counterterms
  std::vector<int> ablation_count;         // seeds where both runs succeeded, per eps
  double ablation_slope = std::numeric_limits<double>::quiet_NaN();  // d log gap / d log log(1/eps)
  // paracontrolled remainder at the final node
  std::vector<double> sharp_weighted_mean;  // E T^{(2b-a)/2} ||u#(T)||_{C^{2b}}
  std::vector<double> u_norm_mean;          // E ||u(T)||_{C^{2b}}
  std::vector<int> run_count;
};

namespace detail {

struct SeedOutcome {
  std::vector<std::optional<double>> diff, ablation_gap, ablation_diff, sharp, unorm;
  std::vector<std::string> failures;
};

inline double sup_time_sup_diff(const Trajectory& a, const Trajectory& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, (a[i] - b[i]).sup_norm());
  return m;
}

}  // namespace detail

/// Coupled-seed study along a decreasing eps ladder: every eps reuses the same
/// white-noise draw per sample. Failed runs are excluded and counted.
inline LadderStudy ladder_study(const SolverConfig& base, const TorusField& u0, const LadderOptions& opt,
                                const TimeMollifier& mollifier = TimeMollifier()) {
  if (opt.ladder.empty()) throw ArgumentError("ladder_study: empty epsilon ladder");
  if (opt.samples < 1) throw ArgumentError("ladder_study: need at least one sample");
  for (std::size_t l = 1; l < opt.ladder.size(); ++l)
    if (!(opt.ladder[l] < opt.ladder[l - 1])) throw ArgumentError("ladder_study: ladder must be decreasing");
  const std::size_t ne = opt.ladder.size();
  std::vector<SolverConfig> cfgs;
  std::vector<Counterterms> cts;
  for (double e : opt.ladder) {
    SolverConfig c = base;
    c.eps = e;
    c.validate();
    cts.push_back(make_counterterms(c));
    cfgs.push_back(std::move(c));
  }
  const double weight = std::pow(base.T, (2.0 * base.beta - base.alpha) / 2.0);

  auto outcomes = parallel_map<detail::SeedOutcome>(
      static_cast<std::size_t>(opt.samples), [&](std::size_t m) {
        detail::SeedOutcome o;
        o.diff.resize(ne > 0 ? ne - 1 : 0);
        o.ablation_diff.resize(o.diff.size());
        o.ablation_gap.resize(ne);
        o.sharp.resize(ne);
        o.unorm.resize(ne);
        const auto xi = sample_white_noise(base.grid, sample_seed(opt.master_seed, m));
        std::optional<Trajectory> prev, prev_noct;
        for (std::size_t l = 0; l < ne; ++l) {
          const Forcing forcing = make_forcing(cfgs[l], xi, cts[l]);
          std::optional<Trajectory> cur, cur_noct;
          try {
            cur = solve_renormalized(cfgs[l], forcing, u0);
          } catch (const NumericalError& e) {
            o.failures.push_back("seed " + std::to_string(m) + " eps " + std::to_string(opt.ladder[l]) + ": " +
                                 e.what());
          }
          if (opt.ablation) {
            SolverConfig plain = cfgs[l];
            plain.counterterms = false;
            try {
              cur_noct = solve_renormalized(plain, forcing, u0);
            } catch (const NumericalError& e) {
              o.failures.push_back("seed " + std::to_string(m) + " eps " + std::to_string(opt.ladder[l]) +
                                   " (no counterterms): " + e.what());
            }
          }
          if (cur && prev && l > 0) o.diff[l - 1] = parabolic_norm(*prev - *cur, opt.report_alpha);
          if (cur && cur_noct) o.ablation_gap[l] = detail::sup_time_sup_diff(*cur_noct, *cur);
          if (cur_noct && prev_noct && l > 0) {
            o.ablation_diff[l - 1] = parabolic_norm(*prev_noct - *cur_noct, opt.report_alpha);
          }
          if (cur && opt.paracontrolled) {
            try {
              const Trajectory up = gubinelli_derivative(*cur, cfgs[l].a, cfgs[l].b, cfgs[l].f, cfgs[l].g,
                                                         cfgs[l].floor);
              const TorusField X = make_X(forcing.xi_eps);
              const std::size_t last = cur->size() - 1;
              const TorusField sharp = cur->back() - modified_para_at(up, X, last, mollifier);
              o.sharp[l] = weight * besov_norm(sharp, 2.0 * base.beta);
              o.unorm[l] = besov_norm(cur->back(), 2.0 * base.beta);
            } catch (const NumericalError& e) {
              o.failures.push_back("seed " + std::to_string(m) + " eps " + std::to_string(opt.ladder[l]) +
                                   " (paracontrolled): " + e.what());
            }
          }
          prev = std::move(cur);
          prev_noct = std::move(cur_noct);
        }
        return o;
      });

  LadderStudy st;
  st.ladder = opt.ladder;
  st.samples = opt.samples;
  st.report_alpha = opt.report_alpha;
  auto mean_of = [&](auto member, std::size_t count, std::vector<int>* counts) {
    std::vector<double> sum(count, 0.0);
    std::vector<int> cnt(count, 0);
    for (const auto& o : outcomes)
      for (std::size_t i = 0; i < count; ++i)
        if ((o.*member)[i]) {
          sum[i] += *(o.*member)[i];
          ++cnt[i];
        }
    for (std::size_t i = 0; i < count; ++i)
      sum[i] = cnt[i] > 0 ? sum[i] / cnt[i] : std::numeric_limits<double>::quiet_NaN();
    if (counts) *counts = cnt;
    return sum;
  };
  st.diff_mean = mean_of(&detail::SeedOutcome::diff, ne - 1, &st.diff_count);
  for (const auto& o : outcomes) {
    st.failures += static_cast<int>(o.failures.size());
    st.failure_log.insert(st.failure_log.end(), o.failures.begin(), o.failures.end());
  }
  for (std::size_t i = 1; i < st.diff_mean.size(); ++i)
    if (!(st.diff_mean[i] < st.diff_mean[i - 1])) st.strictly_decreasing = false;
  if (st.diff_mean.size() >= 2) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < st.diff_mean.size(); ++i) {
      x.push_back(std::log(opt.ladder[i]));
      y.push_back(std::log(st.diff_mean[i]));
    }
    st.diff_slope = fit_slope(x, y);
  }
  if (opt.ablation) {
    st.ablation_gap_mean = mean_of(&detail::SeedOutcome::ablation_gap, ne, &st.ablation_count);
    st.ablation_diff_mean = mean_of(&detail::SeedOutcome::ablation_diff, ne - 1, nullptr);
    if (ne >= 2) {
      std::vector<double> x, y;
      for (std::size_t l = 0; l < ne; ++l) {
        x.push_back(std::log(std::log(1.0 / opt.ladder[l])));
        y.push_back(std::log(st.ablation_gap_mean[l]));
      }
      st.ablation_slope = fit_slope(x, y);
    }
  }
  if (opt.paracontrolled) {
    st.sharp_weighted_mean = mean_of(&detail::SeedOutcome::sharp, ne, &st.run_count);
    st.u_norm_mean = mean_of(&detail::SeedOutcome::unorm, ne, nullptr);
  }
  return st;
}

}  // namespace paratorus
