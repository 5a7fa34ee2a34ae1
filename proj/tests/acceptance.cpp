// Desk-scale acceptance run: one PASS/FAIL line per criterion, nonzero exit
// if any criterion fails. All randomness derives from kMaster.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>

#include "harness_util.hpp"
#include "test_util.hpp"

using namespace paratorus;

namespace {

constexpr std::uint64_t kMaster = 1;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome partition_and_reconstruction() {
  double unity = 0.0, recon = 0.0;
  for (int n : {64, 128, 256}) {
    const Grid g(n);
    auto part = partition_for(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      double s = 0.0;
      for (int j = -1; j <= part->j_max(); ++j) s += part->rho(j, i);
      unity = std::max(unity, std::abs(s - 1.0));
    }
    std::mt19937_64 rng(sample_seed(kMaster, static_cast<std::uint64_t>(n) + 1));
    for (int t = 0; t < 100; ++t) {
      const TorusField u = testutil::random_band_limited(g, rng, n / 4 - 1);
      const TorusField v = testutil::random_band_limited(g, rng, n / 4 - 1);
      recon = std::max(recon, testutil::sup_gap(para(u, v) + resonant(u, v) + para(v, u), dealiased_product(u, v)));
    }
  }
  return {unity <= 1e-10 && recon <= 1e-10,
          "unity " + fmt("%.3g", unity) + ", reconstruction " + fmt("%.3g", recon) + " (tol 1e-10)"};
}

Outcome schauder() {
  const double alpha = 0.9, delta = 0.5;
  const auto rep = schauder_study(256, 50, alpha, delta, kMaster);
  double worst = 0.0;
  for (double r : rep.max_heat_ratio) worst = std::max(worst, r);
  // bounded: the worst-case ratio does not grow as t decreases over the window
  const bool bounded = std::isfinite(worst) && rep.heat_ratio_slope >= -0.1;
  return {rep.min_smoothing_slope >= -delta / 2.0 - 0.1 && bounded,
          "min smoothing slope " + fmt("%.4f", rep.min_smoothing_slope) + " (>= -0.35), heat ratio slope " +
              fmt("%.4f", rep.heat_ratio_slope) + " (>= -0.1), max ratio " + fmt("%.4f", worst)};
}

Outcome estimate_ratios() {
  bool ok = true;
  std::string detail;
  for (const auto& suite : estimate_catalog()) {
    const auto small = run_estimate(suite, 64, 100, kMaster);
    const auto large = run_estimate(suite, 256, 100, kMaster);
    const double growth = large.max_ratio / small.max_ratio;
    ok = ok && growth < 2.0;
    detail += suite.name + " " + fmt("%.3f", growth) + "; ";
  }
  return {ok, "growth n=64->256: " + detail};
}

double identity_slope_256 = std::numeric_limits<double>::quiet_NaN();

Outcome renorm_constant_checks() {
  const Grid g(256);
  const std::vector<double> ladder{0.25, 0.125, 0.0625, 0.03125};
  const auto lad = renorm_constant_ladder(identity_symbol(g), ladder);
  identity_slope_256 = lad.slope;
  const double two_pi = 2.0 * std::numbers::pi;
  const bool slope_ok = std::abs(lad.slope - two_pi) <= 0.1 * two_pi;
  double oracle_gap = 0.0;
  for (std::size_t l = 0; l < ladder.size(); ++l) {
    const auto ref = oracle::renorm_constant(256, ladder[l], {{{0, 0}, 1.0}}, [](int, int) { return 1.0; });
    oracle_gap = std::max(oracle_gap, testutil::spectral_gap(lad.constants[l], ref));
  }
  double spread = 0.0;
  for (const Symbol& a : {identity_symbol(g), gaussian_smoothing_symbol(g, 0.05), bessel_symbol(g, -0.5)})
    for (double e : ladder) {
      const TorusField c = renorm_constant(a, e);
      spread = std::max(spread, c.max_real() - c.min_real());
    }
  return {slope_ok && oracle_gap <= 1e-8 && spread <= 1e-10,
          "slope " + fmt("%.5f", lad.slope) + " (2pi +- 10%), oracle gap " + fmt("%.3g", oracle_gap) +
              " (1e-8), convolution spread " + fmt("%.3g", spread) + " (1e-10)"};
}

Outcome cauchy() {
  const Grid g(128);
  const double alpha = 0.9;
  const auto st = cauchy_study(identity_symbol(g), {0.25, 0.125, 0.0625, 0.03125}, 100, 2.0, 2.0 * alpha - 2.0,
                               kMaster);
  std::string moments;
  for (const auto& r : st.rows) moments += fmt("%.5g", r.moment) + " ";
  const double rel = std::abs(st.unrenorm_slope - identity_slope_256) / identity_slope_256;
  return {st.strictly_decreasing && rel <= 0.25,
          "moments " + moments + (st.strictly_decreasing ? "(strictly decreasing)" : "(NOT strictly decreasing)") +
              ", unrenormalized sup slope " + fmt("%.4f", st.unrenorm_slope) + " vs c slope " +
              fmt("%.4f", identity_slope_256) + ", relative gap " + fmt("%.3f", rel) + " (<= 0.25)"};
}

SolverConfig linear_config(double dt) {
  const Grid g(64);
  SolverConfig c;
  c.grid = g;
  c.a = identity_symbol(g);
  c.b = identity_symbol(g);
  c.f = constant_fn(1.0);
  c.g = constant_fn(1.0);
  c.eps = 0.25;
  c.dt = dt;
  c.T = 0.25;
  c.output_dt = 0.0125;
  c.t_smooth = 0.0;
  return c;
}

Outcome linear_benchmark() {
  bool ok = true;
  std::string detail;
  for (std::uint64_t m = 0; m < 4; ++m) {
    const auto xi = sample_white_noise(Grid(64), sample_seed(kMaster, m));
    std::vector<double> err;
    for (double dt : {1e-3, 5e-4, 2.5e-4}) {
      const SolverConfig c = linear_config(dt);
      const Trajectory u = solve_renormalized(c, xi, TorusField::zero(c.grid));
      const Trajectory ex = exact_linear_solve(regularize(xi.xi, c.eps), 1.0, TorusField::zero(c.grid), c.T, c.T);
      err.push_back(testutil::sup_gap(u.back(), ex.back()));
      SolverConfig off = c;
      off.counterterms = false;
      const Trajectory v = solve_renormalized(off, xi, TorusField::zero(c.grid));
      for (std::size_t i = 0; i < u.size(); ++i) ok = ok && u[i].spectral() == v[i].spectral();
    }
    for (std::size_t i = 1; i < err.size(); ++i) {
      const double ratio = err[i - 1] / err[i];
      ok = ok && std::abs(ratio - 2.0) <= 0.4;
      detail += fmt("%.3f", ratio) + " ";
    }
  }
  return {ok, "error ratios per halving " + detail + "(2 +- 20%), counterterm on/off bit-identical"};
}

LadderStudy quasilinear_study() {
  const auto cfg =
      harness::build_config("convergence-study", std::nullopt, {{"preset", "quasilinear-demo"}, {"seed", "1"}});
  const SolverConfig s = harness::make_solver_config(cfg, cfg.eps());
  LadderOptions opt;
  opt.ladder = cfg.eps_ladder;
  opt.samples = 20;
  opt.master_seed = kMaster;
  opt.report_alpha = 0.5;
  opt.ablation = true;
  opt.paracontrolled = true;
  return ladder_study(s, initial_condition(cfg.u0, s.grid), opt);
}

Outcome convergence(const LadderStudy& st) {
  std::string diffs;
  for (double d : st.diff_mean) diffs += fmt("%.5g", d) + " ";
  const bool ok = st.failures == 0 && st.strictly_decreasing && st.ablation_slope > 0.0;
  return {ok, "mean differences " + diffs + (st.strictly_decreasing ? "(strictly decreasing)" : "(NOT decreasing)") +
                  ", ablation log-log slope " + fmt("%.4f", st.ablation_slope) + ", failed runs " +
                  std::to_string(st.failures)};
}

Outcome paracontrolled_gain(const LadderStudy& st) {
  const auto [lo, hi] = std::minmax_element(st.sharp_weighted_mean.begin(), st.sharp_weighted_mean.end());
  const double sharp_ratio = *hi / *lo;
  const double u_ratio = st.u_norm_mean.back() / st.u_norm_mean.front();
  return {st.failures == 0 && sharp_ratio <= 2.0 && u_ratio > 2.0,
          "weighted sharp max/min " + fmt("%.4f", sharp_ratio) + " (<= 2), u norm growth " + fmt("%.4f", u_ratio) +
              " (> 2)"};
}

Outcome determinism() {
  const std::vector<std::pair<std::string, std::map<std::string, std::string>>> runs{
      {"sample-noise", {{"grid", "64"}, {"samples", "3"}}},
      {"renorm-constant", {{"preset", "modulated-renorm"}}},
      {"renorm-study", {{"grid", "64"}, {"samples", "4"}}},
      {"solve", {{"preset", "quasilinear-demo"}, {"grid", "64"}, {"eps-ladder", "2^-3"}, {"T", "0.05"},
                 {"snapshot-stride", "1"}}},
      {"convergence-study", {{"preset", "quasilinear-demo"}, {"grid", "64"}, {"T", "0.05"}, {"samples", "2"},
                             {"eps-ladder", "2^-2..2^-4"}}},
      {"ablation", {{"preset", "quasilinear-demo"}, {"grid", "64"}, {"T", "0.05"}, {"samples", "2"},
                    {"eps-ladder", "2^-2..2^-4"}}},
      {"check-estimates", {{"grid", "32"}, {"samples", "3"}}},
      {"presets", {}},
  };
  bool ok = true;
  std::string detail;
  for (const auto& [cmd, flags] : runs) {
    auto f = flags;
    f["seed"] = std::to_string(kMaster);
    const auto a = testutil::scratch("det_a_" + cmd), b = testutil::scratch("det_b_" + cmd);
    const int ca = testutil::run(cmd, f, a), cb = testutil::run(cmd, f, b);
    const bool same = ca == cb && testutil::tree(a) == testutil::tree(b) && !testutil::tree(a).empty();
    ok = ok && same;
    detail += cmd + (same ? " ok" : " DIFFERS") + "; ";
  }
  return {ok, detail};
}

}  // namespace

// Optional arguments select criteria by number; default is all nine.
int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  auto selected = [&](int id) { return only.empty() || only.count(id) > 0; };
  int failed = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& check) {
    if (!selected(id)) return;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("criterion %d %s: %s | %s | %.1fs\n", id, o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
                secs);
    std::fflush(stdout);
  };

  report(1, "partition and reconstruction", partition_and_reconstruction);
  report(2, "heat semigroup slopes", schauder);
  report(3, "estimate constants stable in n", estimate_ratios);
  report(4, "renormalization constant", renorm_constant_checks);
  report(5, "renormalized resonant product", cauchy);
  report(6, "solver linear benchmark", linear_benchmark);
  std::optional<LadderStudy> st;
  std::string study_error;
  if (selected(7) || selected(8)) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      st = quasilinear_study();
    } catch (const std::exception& e) {
      study_error = e.what();
    }
    std::printf("(quasilinear ladder study, M=20: %.1fs)\n",
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  auto need = [&](auto fn) {
    return [&, fn]() -> Outcome {
      if (!st) return {false, "study failed: " + study_error};
      return fn(*st);
    };
  };
  report(7, "quasilinear convergence and ablation", need(convergence));
  report(8, "paracontrolled gain", need(paracontrolled_gain));
  report(9, "determinism", determinism);
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
