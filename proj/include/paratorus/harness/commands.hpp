#pragma once

#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "paratorus/estimates.hpp"
#include "paratorus/harness/config.hpp"
#include "paratorus/harness/output.hpp"
#include "paratorus/noise.hpp"
#include "paratorus/renorm.hpp"
#include "paratorus/snapshot.hpp"
#include "paratorus/solver.hpp"

namespace paratorus::harness {

/// Process exit codes; the category word is also printed on stderr.
enum ExitCode : int { kOk = 0, kConfig = 2, kNumerical = 3, kIo = 4, kInternal = 5 };

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"sample-noise",       "renorm-constant", "renorm-study",
                                              "solve",              "convergence-study", "ablation",
                                              "check-estimates",    "presets"};
  return names;
}

/// defaults <- preset <- config file <- flags. The preset may come from the
/// file or a flag (the flag wins).
inline RunConfig build_config(const std::string& command, const std::optional<std::string>& config_file,
                              const std::map<std::string, std::string>& flags) {
  RunConfig c;
  c.command = command;
  std::map<std::string, std::string> file;
  if (config_file) file = read_kv_file(*config_file);
  std::optional<std::string> preset;
  if (auto it = file.find("preset"); it != file.end()) preset = it->second;
  if (auto it = flags.find("preset"); it != flags.end()) preset = it->second;
  if (preset && !preset->empty()) apply_preset(c, *preset);
  for (const auto& [k, v] : file)
    if (k != "preset") set(c, k, v);
  for (const auto& [k, v] : flags)
    if (k != "preset") set(c, k, v);
  validate(c);
  return c;
}

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

namespace detail {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline void write_failures(const std::filesystem::path& dir, const std::string& hash,
                           const std::vector<std::string>& log) {
  CsvWriter w(dir / "failures.csv", hash, {"index", "message"});
  for (std::size_t i = 0; i < log.size(); ++i) w.row({static_cast<long long>(i), quote(log[i])});
}

inline double ratio_last_first(const std::vector<double>& v) {
  return v.empty() || !(v.front() != 0.0) ? kNaN : v.back() / v.front();
}

inline int sample_noise(const RunConfig& c, std::ostream& log) {
  const auto dir = ensure_dir(c.out);
  const std::string h = config_hash(c);
  const Grid g(c.grid);
  const auto rep = noise_regularity_report(g, c.seed, c.samples, c.eps_ladder, c.gammas);
  {
    CsvWriter w(dir / "noise_regularity.csv", h, {"epsilon", "gamma", "M", "mean_besov_norm"});
    for (const auto& r : rep.rows) w.row({r.eps, r.gamma, static_cast<long long>(c.samples), r.mean_norm});
  }
  {
    CsvWriter w(dir / "regularity_summary.csv", h, {"gamma", "log2_slope", "bounded"});
    for (std::size_t i = 0; i < rep.gammas.size(); ++i)
      w.row({rep.gammas[i], rep.slopes[i], static_cast<long long>(rep.bounded[i] ? 1 : 0)});
  }
  save_snapshot((dir / "xi_sample0.bin").string(), sample_white_noise(g, sample_seed(c.seed, 0)).xi);
  write_gnuplot(dir / "noise_regularity.gp", "noise_regularity.csv", 1, 4, "mean Besov norm of xi^eps");
  write_manifest(dir, c, {{"largest_bounded_gamma", format_double(rep.largest_bounded_gamma)},
                          {"boundedness_threshold", format_double(rep.threshold)}});
  log << "largest bounded gamma: " << format_double(rep.largest_bounded_gamma) << "\n";
  return kOk;
}

inline int renorm_constant_cmd(const RunConfig& c, std::ostream& log) {
  const auto dir = ensure_dir(c.out);
  const std::string h = config_hash(c);
  const Grid g(c.grid);
  const Symbol a = make_symbol(c.symbol, g, c.mu);
  const auto lad = renorm_constant_ladder(a, c.eps_ladder);
  CsvWriter w(dir / "renorm_constant.csv", h,
              {"epsilon", "log_inv_eps", "c_mean", "c_min", "c_max", "c_spread", "c_slope"});
  for (std::size_t l = 0; l < lad.ladder.size(); ++l) {
    const auto& cf = lad.constants[l];
    w.row({lad.ladder[l], std::log(1.0 / lad.ladder[l]), lad.means[l], cf.min_real(), cf.max_real(), lad.spreads[l],
           lad.slope});
    save_snapshot((dir / ("c_eps" + std::to_string(l) + ".bin")).string(), cf);
  }
  write_gnuplot(dir / "renorm_constant.gp", "renorm_constant.csv", 2, 3, "c(eps) against log(1/eps)", false, false);
  write_manifest(dir, c, {{"symbol_name", a.name()}});
  log << "c slope per log(1/eps): " << format_double(lad.slope) << "\n";
  return kOk;
}

inline int renorm_study(const RunConfig& c, std::ostream& log) {
  const auto dir = ensure_dir(c.out);
  const std::string h = config_hash(c);
  const Grid g(c.grid);
  const Symbol a = make_symbol(c.symbol, g, c.mu);
  const auto st = cauchy_study(a, c.eps_ladder, c.samples, c.r, c.gamma, c.seed);
  CsvWriter w(dir / "renorm_study.csv", h,
              {"epsilon", "eta", "gamma", "r", "M", "moment", "unrenorm_sup_mean", "c_slope"});
  for (std::size_t l = 0; l < st.ladder.size(); ++l) {
    const bool pair = l < st.rows.size();
    w.row({st.ladder[l], pair ? st.rows[l].eta : kNaN, c.gamma, c.r, static_cast<long long>(c.samples),
           pair ? st.rows[l].moment : kNaN, st.unrenorm_sup_mean[l], st.c_slope});
  }
  write_gnuplot(dir / "renorm_study.gp", "renorm_study.csv", 1, 6, "coupled Cauchy moment");
  write_manifest(dir, c,
                 {{"strictly_decreasing", st.strictly_decreasing ? "true" : "false"},
                  {"moment_slope", format_double(st.moment_slope)},
                  {"unrenorm_slope", format_double(st.unrenorm_slope)}});
  log << "moments strictly decreasing: " << (st.strictly_decreasing ? "yes" : "no") << "\n";
  return kOk;
}

inline int solve_cmd(const RunConfig& c, std::ostream& log) {
  const auto dir = ensure_dir(c.out);
  const std::string h = config_hash(c);
  const SolverConfig s = make_solver_config(c, c.eps());
  const TorusField u0 = initial_condition(c.u0, s.grid);
  const auto xi = sample_white_noise(s.grid, sample_seed(c.seed, 0));
  const Forcing forcing = make_forcing(s, xi);
  SolveStats stats;
  std::optional<Trajectory> u;
  std::string failure;
  try {
    u = solve_renormalized(s, forcing, u0, &stats);
  } catch (const NumericalError& e) {
    failure = e.what();
  }
  write_manifest(dir, c, {{"counterterm_a_mean", format_double(forcing.c_a.mean().real())},
                          {"counterterm_b_mean", format_double(forcing.c_b.mean().real())}});
  if (!u) {
    write_failures(dir, h, {"seed " + std::to_string(c.seed) + " eps " + format_double(c.eps()) + ": " + failure});
    log << "solve failed: " << failure << "\n";
    return kNumerical;
  }
  {
    CsvWriter w(dir / "trajectory.csv", h, {"t", "sup_norm", "mean", "min", "max", "holder_norm"});
    for (std::size_t m = 0; m < u->size(); ++m) {
      const auto& f = (*u)[m];
      w.row({u->time(m), f.sup_norm(), f.mean().real(), f.min_real(), f.max_real(), besov_norm(f, c.report_alpha)});
      if (c.snapshot_stride > 0 && m % static_cast<std::size_t>(c.snapshot_stride) == 0)
        save_snapshot((dir / ("u_node" + std::to_string(m) + ".bin")).string(), f);
    }
  }
  {
    CsvWriter w(dir / "solve_stats.csv", h, {"steps", "min_dt", "min_cbar", "max_coefficient"});
    w.row({static_cast<long long>(stats.steps), stats.min_dt, stats.min_cbar, stats.max_coefficient});
  }
  save_snapshot((dir / "u_final.bin").string(), u->back());
  write_gnuplot(dir / "trajectory.gp", "trajectory.csv", 1, 2, "sup norm of u", false, false);
  log << "steps: " << stats.steps << ", final sup norm: " << format_double(u->back().sup_norm()) << "\n";
  return kOk;
}

inline LadderStudy run_ladder(const RunConfig& c, bool ablation, bool paracontrolled) {
  const SolverConfig s = make_solver_config(c, c.eps());
  LadderOptions opt;
  opt.ladder = c.eps_ladder;
  opt.samples = c.samples;
  opt.master_seed = c.seed;
  opt.report_alpha = c.report_alpha;
  opt.ablation = ablation;
  opt.paracontrolled = paracontrolled;
  return ladder_study(s, initial_condition(c.u0, s.grid), opt);
}

inline int convergence_study(const RunConfig& c, std::ostream& log) {
  const auto dir = ensure_dir(c.out);
  const std::string h = config_hash(c);
  const LadderStudy st = run_ladder(c, false, true);
  {
    CsvWriter w(dir / "convergence.csv", h, {"epsilon", "eta", "M_ok", "mean_parabolic_diff"});
    for (std::size_t l = 0; l + 1 < st.ladder.size(); ++l)
      w.row({st.ladder[l], st.ladder[l + 1], static_cast<long long>(st.diff_count[l]), st.diff_mean[l]});
  }
  {
    CsvWriter w(dir / "paracontrolled.csv", h, {"epsilon", "M_ok", "sharp_weighted_mean", "u_norm_mean"});
    for (std::size_t l = 0; l < st.ladder.size(); ++l)
      w.row({st.ladder[l], static_cast<long long>(st.run_count[l]), st.sharp_weighted_mean[l], st.u_norm_mean[l]});
  }
  write_failures(dir, h, st.failure_log);
  write_gnuplot(dir / "convergence.gp", "convergence.csv", 1, 4, "E parabolic norm of u^eps - u^eta");
  write_manifest(dir, c,
                 {{"strictly_decreasing", st.strictly_decreasing ? "true" : "false"},
                  {"diff_slope", format_double(st.diff_slope)},
                  {"sharp_ratio", format_double(ratio_last_first(st.sharp_weighted_mean))},
                  {"u_norm_ratio", format_double(ratio_last_first(st.u_norm_mean))},
                  {"failures", std::to_string(st.failures)}});
  log << "differences strictly decreasing: " << (st.strictly_decreasing ? "yes" : "no")
      << ", failures: " << st.failures << "\n";
  return st.failures > 0 ? kNumerical : kOk;
}

inline int ablation_cmd(const RunConfig& c, std::ostream& log) {
  const auto dir = ensure_dir(c.out);
  const std::string h = config_hash(c);
  const LadderStudy st = run_ladder(c, true, false);
  CsvWriter w(dir / "ablation.csv", h,
              {"epsilon", "log_log_inv_eps", "M_ok", "mean_gap", "mean_diff_counterterms", "mean_diff_plain"});
  for (std::size_t l = 0; l < st.ladder.size(); ++l) {
    const bool pair = l + 1 < st.ladder.size();
    w.row({st.ladder[l], std::log(std::log(1.0 / st.ladder[l])), static_cast<long long>(st.ablation_count[l]),
           st.ablation_gap_mean[l], pair ? st.diff_mean[l] : kNaN, pair ? st.ablation_diff_mean[l] : kNaN});
  }
  write_failures(dir, h, st.failure_log);
  write_gnuplot(dir / "ablation.gp", "ablation.csv", 2, 4, "counterterm ablation gap", false, true);
  write_manifest(dir, c, {{"ablation_slope", format_double(st.ablation_slope)},
                          {"failures", std::to_string(st.failures)}});
  log << "ablation log-log slope: " << format_double(st.ablation_slope) << "\n";
  return st.failures > 0 ? kNumerical : kOk;
}

inline int check_estimates(const RunConfig& c, std::ostream& log) {
  const auto dir = ensure_dir(c.out);
  const std::string h = config_hash(c);
  std::vector<std::pair<std::string, std::string>> extra;
  CsvWriter summary(dir / "estimates_summary.csv", h, {"name", "n", "M", "max_ratio", "mean_ratio"});
  for (const auto& suite : estimate_catalog()) {
    const auto r = run_estimate(suite, c.grid, c.samples, c.seed);
    CsvWriter w(dir / ("estimate_" + suite.name + ".csv"), h, {"sample", "ratio"});
    for (std::size_t m = 0; m < r.ratios.size(); ++m) w.row({static_cast<long long>(m), r.ratios[m]});
    summary.row({suite.name, static_cast<long long>(c.grid), static_cast<long long>(c.samples), r.max_ratio,
                 r.mean_ratio});
    extra.emplace_back("estimate." + suite.name, suite.statement);
    log << suite.name << ": max ratio " << format_double(r.max_ratio) << "\n";
  }
  const auto sch = schauder_study(c.grid, c.samples, c.alpha, 0.5, c.seed);
  {
    CsvWriter w(dir / "schauder.csv", h, {"t", "max_heat_ratio"});
    for (std::size_t i = 0; i < sch.times.size(); ++i) w.row({sch.times[i], sch.max_heat_ratio[i]});
  }
  extra.emplace_back("schauder.min_smoothing_slope", format_double(sch.min_smoothing_slope));
  extra.emplace_back("schauder.heat_ratio_slope", format_double(sch.heat_ratio_slope));
  extra.emplace_back("schauder.gaussian_min_smoothing_slope", format_double(sch.gaussian_min_smoothing_slope));
  write_gnuplot(dir / "schauder.gp", "schauder.csv", 1, 2, "heat ratio against t");
  write_manifest(dir, c, extra);
  return kOk;
}

inline int presets_cmd(const RunConfig& c, std::ostream& log) {
  const auto dir = ensure_dir(c.out);
  const std::string h = config_hash(c);
  CsvWriter w(dir / "presets.csv", h, {"name", "kind", "validates", "description"});
  int code = kOk;
  for (const auto& p : preset_catalog()) {
    bool ok = true;
    try {
      RunConfig pc;
      apply_preset(pc, p.name);
      validate(pc);
      if (p.solver) make_solver_config(pc, pc.eps());
      else make_symbol(pc.symbol, Grid(pc.grid), pc.mu);
    } catch (const std::invalid_argument& e) {
      ok = false;
      code = kConfig;
      log << p.name << ": " << e.what() << "\n";
    }
    w.row({p.name, std::string(p.solver ? "solver" : "renorm"), static_cast<long long>(ok ? 1 : 0), quote(p.description)});
    log << p.name << (ok ? "  " : "  (invalid)  ") << p.description << "\n";
  }
  write_manifest(dir, c);
  return code;
}

}  // namespace detail

inline int run_command(const RunConfig& c, std::ostream& log) {
  const std::string& cmd = c.command;
  if (cmd == "sample-noise") return detail::sample_noise(c, log);
  if (cmd == "renorm-constant") return detail::renorm_constant_cmd(c, log);
  if (cmd == "renorm-study") return detail::renorm_study(c, log);
  if (cmd == "solve") return detail::solve_cmd(c, log);
  if (cmd == "convergence-study") return detail::convergence_study(c, log);
  if (cmd == "ablation") return detail::ablation_cmd(c, log);
  if (cmd == "check-estimates") return detail::check_estimates(c, log);
  if (cmd == "presets") return detail::presets_cmd(c, log);
  throw ConfigError("unknown subcommand '" + cmd + "'");
}

/// run_command with every failure mapped to an exit code and a single
/// "error category=<word>: <message>" line.
inline int run_guarded(const RunConfig& c, std::ostream& log, std::ostream& err) {
  try {
    return run_command(c, log);
  } catch (const std::invalid_argument& e) {
    err << "error category=config: " << e.what() << "\n";
    return kConfig;
  } catch (const NumericalError& e) {
    err << "error category=numerical: " << e.what() << "\n";
    return kNumerical;
  } catch (const IoError& e) {
    err << "error category=io: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    err << "error category=internal: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace paratorus::harness
