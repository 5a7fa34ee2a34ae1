#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "paratorus/errors.hpp"
#include "paratorus/estimates.hpp"
#include "paratorus/noise.hpp"
#include "paratorus/nonlinear.hpp"
#include "paratorus/renorm.hpp"
#include "paratorus/solver.hpp"
#include "paratorus/symbols.hpp"

namespace paratorus::harness {

/// Flat run configuration. Every field has a key in to_kv()/set().
struct RunConfig {
  std::string command;
  std::string preset;
  int grid = 64;
  double alpha = 0.9;
  double beta = 0.7;
  double s = 0.0;
  double mu = 0.5;
  std::vector<double> gammas{-1.2, -1.0, -0.5, 0.0};
  double gamma = -0.2;  // moment exponent for renorm-study
  double r = 2.0;
  std::string symbol = "identity";
  std::string b_symbol = "identity";
  std::string f = "const:1";
  std::string g = "const:1";
  std::vector<double> eps_ladder{0.25, 0.125, 0.0625};
  int samples = 4;
  double dt = 1e-3;
  double T = 0.25;
  double output_dt = 0.0125;
  double t_smooth = -1.0;  // negative: 4 dt
  std::string u0 = "zero";
  std::uint64_t seed = 1;
  double report_alpha = 0.5;
  bool counterterms = true;
  int snapshot_stride = 0;  // 0: final snapshot only
  std::string out = "out";

  double eps() const { return eps_ladder.front(); }
};

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  // accepted forms: plain decimal, 2^-k
  if (t.rfind("2^", 0) == 0) {
    try {
      std::size_t used = 0;
      const int e = std::stoi(t.substr(2), &used);
      if (used + 2 != t.size()) throw std::invalid_argument(t);
      return std::ldexp(1.0, e);
    } catch (const std::exception&) {
      throw ConfigError(key + ": cannot parse '" + text + "' as a power of two");
    }
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": cannot parse '" + text + "' as a number");
  }
}

inline long long parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  try {
    std::size_t used = 0;
    const long long v = std::stoll(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": cannot parse '" + text + "' as an integer");
  }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

/// "2^-2..2^-5" (every power of two in between) or a comma list.
inline std::vector<double> parse_eps_ladder(const std::string& text) {
  const std::string t = trim(text);
  const auto dots = t.find("..");
  std::vector<double> out;
  if (dots != std::string::npos) {
    const std::string lo = trim(t.substr(0, dots)), hi = trim(t.substr(dots + 2));
    if (lo.rfind("2^", 0) != 0 || hi.rfind("2^", 0) != 0) {
      throw ConfigError("eps-ladder: ranges must be written 2^-a..2^-b");
    }
    const int a = static_cast<int>(parse_int("eps-ladder", lo.substr(2)));
    const int b = static_cast<int>(parse_int("eps-ladder", hi.substr(2)));
    const int step = a <= b ? 1 : -1;
    for (int e = a;; e += step) {
      out.push_back(std::ldexp(1.0, e));
      if (e == b) break;
    }
  } else {
    for (const auto& part : split(t, ',')) out.push_back(parse_double("eps-ladder", part));
  }
  if (out.empty()) throw ConfigError("eps-ladder: empty");
  return out;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_double(key, part));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

inline std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "1" || t == "true" || t == "on" || t == "yes") return true;
  if (t == "0" || t == "false" || t == "off" || t == "no") return false;
  throw ConfigError(key + ": expected a boolean, got '" + text + "'");
}

/// Sets one key; unknown keys are configuration errors.
inline void set(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "preset") c.preset = trim(value);
  else if (key == "grid") c.grid = static_cast<int>(parse_int(key, value));
  else if (key == "alpha") c.alpha = parse_double(key, value);
  else if (key == "beta") c.beta = parse_double(key, value);
  else if (key == "s") c.s = parse_double(key, value);
  else if (key == "mu") c.mu = parse_double(key, value);
  else if (key == "gammas") c.gammas = parse_list(key, value);
  else if (key == "gamma") c.gamma = parse_double(key, value);
  else if (key == "r") c.r = parse_double(key, value);
  else if (key == "symbol") c.symbol = trim(value);
  else if (key == "b-symbol") c.b_symbol = trim(value);
  else if (key == "f") c.f = trim(value);
  else if (key == "g") c.g = trim(value);
  else if (key == "eps-ladder") c.eps_ladder = parse_eps_ladder(value);
  else if (key == "samples") c.samples = static_cast<int>(parse_int(key, value));
  else if (key == "dt") c.dt = parse_double(key, value);
  else if (key == "T") c.T = parse_double(key, value);
  else if (key == "output-dt") c.output_dt = parse_double(key, value);
  else if (key == "t-smooth") c.t_smooth = parse_double(key, value);
  else if (key == "u0") c.u0 = trim(value);
  else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "report-alpha") c.report_alpha = parse_double(key, value);
  else if (key == "counterterms") c.counterterms = parse_bool(key, value);
  else if (key == "snapshot-stride") c.snapshot_stride = static_cast<int>(parse_int(key, value));
  else if (key == "out") c.out = trim(value);
  else throw ConfigError("unknown configuration key '" + key + "'");
}

/// Canonical key=value listing (output directory excluded).
inline std::vector<std::pair<std::string, std::string>> to_kv(const RunConfig& c) {
  return {{"command", c.command},
          {"preset", c.preset},
          {"grid", std::to_string(c.grid)},
          {"alpha", format_double(c.alpha)},
          {"beta", format_double(c.beta)},
          {"s", format_double(c.s)},
          {"mu", format_double(c.mu)},
          {"gammas", join(c.gammas)},
          {"gamma", format_double(c.gamma)},
          {"r", format_double(c.r)},
          {"symbol", c.symbol},
          {"b-symbol", c.b_symbol},
          {"f", c.f},
          {"g", c.g},
          {"eps-ladder", join(c.eps_ladder)},
          {"samples", std::to_string(c.samples)},
          {"dt", format_double(c.dt)},
          {"T", format_double(c.T)},
          {"output-dt", format_double(c.output_dt)},
          {"t-smooth", format_double(c.t_smooth)},
          {"u0", c.u0},
          {"seed", std::to_string(c.seed)},
          {"report-alpha", format_double(c.report_alpha)},
          {"counterterms", c.counterterms ? "true" : "false"},
          {"snapshot-stride", std::to_string(c.snapshot_stride)}};
}

/// 64-bit FNV-1a of the canonical listing, as 16 hex digits.
inline std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& [k, v] : to_kv(c)) {
    for (char ch : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 0x100000001b3ull;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Reads "key = value" lines; '#' starts a comment.
inline std::map<std::string, std::string> read_kv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

/// Named parameters of a spec "family:k1=v1,k2=v2".
struct Spec {
  std::string family;
  std::map<std::string, std::string> params;
  double get(const std::string& k, double fallback) const {
    auto it = params.find(k);
    return it == params.end() ? fallback : parse_double(family + "." + k, it->second);
  }
};

inline Spec parse_spec(const std::string& text) {
  Spec s;
  const auto colon = text.find(':');
  s.family = trim(text.substr(0, colon));
  if (colon == std::string::npos) return s;
  const std::string rest = text.substr(colon + 1);
  if (s.family == "file") {
    s.params["path"] = trim(rest);
    return s;
  }
  for (const auto& part : split(rest, ',')) {
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos) {
      // bare value: "const:1"
      s.params["value"] = part;
      continue;
    }
    s.params[trim(part.substr(0, eq))] = trim(part.substr(eq + 1));
  }
  return s;
}

/// const:c | tanh:shift=a,scale=b | sin:amp=a | clamped:slope=a,radius=r,width=w
inline NonlinearFn make_nonlinear(const std::string& text) {
  const Spec s = parse_spec(text);
  if (s.family == "const") return constant_fn(s.get("value", 1.0));
  if (s.family == "tanh") return tanh_fn(s.get("shift", 0.0), s.get("scale", 1.0));
  if (s.family == "sin") return sine_fn(s.get("amp", 1.0));
  if (s.family == "clamped") return clamped_linear_fn(s.get("slope", 1.0), s.get("radius", 1.0), s.get("width", 1.0));
  throw ConfigError("unknown nonlinearity '" + text + "' (const, tanh, sin, clamped)");
}

/// identity | gaussian:tau=t | bessel:s=s | modulated:amp=a,s=s | file:path
inline Symbol make_symbol(const std::string& text, const Grid& g, double mu) {
  const Spec s = parse_spec(text);
  if (s.family == "identity") return identity_symbol(g);
  if (s.family == "gaussian") return gaussian_smoothing_symbol(g, s.get("tau", 0.05), mu);
  if (s.family == "bessel") return bessel_symbol(g, s.get("s", -0.5), mu);
  if (s.family == "modulated") {
    const double amp = s.get("amp", 0.5);
    const double order = s.get("s", 0.0);
    const TorusField theta = TorusField::sample(g, [amp](double x1, double) { return 1.0 + amp * std::cos(x1); });
    return make_modulated_symbol(
        theta,
        [order](const Mode& k) {
          return k.norm2() == 0 ? cplx(0.0, 0.0) : cplx(std::pow(japanese(k.norm()), order), 0.0);
        },
        mu, order, "modulated:amp=" + format_double(amp) + ",s=" + format_double(order));
  }
  if (s.family == "file") {
    std::ifstream is(s.params.at("path"), std::ios::binary);
    if (!is) throw ConfigError("cannot open symbol file " + s.params.at("path"));
    Symbol sym = read_symbol(is);
    if (!(sym.grid() == g)) throw ConfigError("symbol file grid does not match --grid");
    return sym;
  }
  throw ConfigError("unknown symbol '" + text + "' (identity, gaussian, bessel, modulated, file)");
}

/// Checks every cross-field constraint; throws ConfigError naming the first
/// violated one.
inline void validate(const RunConfig& c) {
  if (c.grid < 8 || c.grid % 2 != 0) throw ConfigError("grid must be an even integer >= 8");
  if (!(2.0 / 3.0 < c.beta && c.beta < c.alpha && c.alpha < 1.0)) {
    throw ConfigError("exponents must satisfy 2/3 < beta < alpha < 1");
  }
  if (c.s > 0.0) throw ConfigError("symbol order s must be <= 0");
  if (!(c.mu > 0.0 && c.mu < 1.0)) throw ConfigError("mu must lie in (0,1)");
  if (c.samples < 1) throw ConfigError("samples must be >= 1");
  if (!(c.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(c.T > 0.0)) throw ConfigError("T must be positive");
  if (!(c.r >= 1.0)) throw ConfigError("moment order r must be >= 1");
  if (!(c.report_alpha > 0.0 && c.report_alpha < c.alpha)) {
    throw ConfigError("report-alpha must lie in (0, alpha)");
  }
  const Grid g(c.grid);
  // check-estimates and presets never regularize, so their ladder is not checked
  const bool uses_ladder = c.command != "check-estimates" && c.command != "presets";
  for (std::size_t l = 0; uses_ladder && l < c.eps_ladder.size(); ++l) {
    require_resolved_cutoff(g, c.eps_ladder[l]);
    if (l > 0 && !(c.eps_ladder[l] < c.eps_ladder[l - 1])) throw ConfigError("eps-ladder must be decreasing");
  }
  if (c.snapshot_stride < 0) throw ConfigError("snapshot-stride must be >= 0");
}

inline SolverConfig make_solver_config(const RunConfig& c, double eps) {
  SolverConfig s;
  s.grid = Grid(c.grid);
  s.alpha = c.alpha;
  s.beta = c.beta;
  s.a = make_symbol(c.symbol, s.grid, c.mu);
  s.b = make_symbol(c.b_symbol, s.grid, c.mu);
  s.f = make_nonlinear(c.f);
  s.g = make_nonlinear(c.g);
  s.eps = eps;
  s.dt = c.dt;
  s.T = c.T;
  if (c.t_smooth >= 0.0) s.t_smooth = c.t_smooth;
  s.output_dt = c.output_dt;
  s.seed = c.seed;
  s.counterterms = c.counterterms;
  s.validate();
  return s;
}

struct Preset {
  std::string name;
  std::string description;
  bool solver;  // solver presets must also pass the SolverConfig hypotheses
  std::vector<std::pair<std::string, std::string>> keys;
};

inline std::vector<Preset> preset_catalog() {
  return {
      {"linear-benchmark",
       "f = g = 1, A = B = identity: stochastic heat equation with an exact Duhamel oracle",
       true,
       {{"grid", "64"}, {"symbol", "identity"}, {"b-symbol", "identity"}, {"f", "const:1"}, {"g", "const:1"},
        {"eps-ladder", "2^-2..2^-4"}, {"samples", "4"}, {"dt", "0.001"}, {"T", "0.25"},
        {"output-dt", "0.0125"}, {"u0", "zero"}, {"t-smooth", "0"}}},
      {"quasilinear-demo",
       "f = 2 + tanh, g = tanh, A = Gaussian smoothing (tau = 0.05), B = identity",
       true,
       {{"grid", "128"}, {"symbol", "gaussian:tau=0.05"}, {"b-symbol", "identity"},
        {"f", "tanh:shift=2,scale=1"}, {"g", "tanh:shift=0,scale=1"}, {"eps-ladder", "2^-2..2^-5"},
        {"samples", "20"}, {"dt", "0.001"}, {"T", "0.25"}, {"output-dt", "0.01"}, {"u0", "bump"},
        {"alpha", "0.9"}, {"beta", "0.7"}, {"report-alpha", "0.5"}}},
      {"convolution-renorm",
       "identity (convolution) symbol: spatially constant c(eps) and coupled-seed Cauchy moments",
       false,
       {{"grid", "256"}, {"symbol", "identity"}, {"eps-ladder", "2^-2..2^-5"}, {"samples", "100"},
        {"gamma", "-0.2"}, {"r", "2"}}},
      {"modulated-renorm",
       "a(x,k) = (1 + cos(x1)/2) 1_{k != 0}: non-constant c(eps)",
       false,
       {{"grid", "64"}, {"symbol", "modulated:amp=0.5,s=0"}, {"eps-ladder", "2^-2..2^-4"}, {"samples", "20"},
        {"gamma", "-0.2"}, {"r", "2"}}},
  };
}

inline void apply_preset(RunConfig& c, const std::string& name) {
  for (const auto& p : preset_catalog()) {
    if (p.name != name) continue;
    for (const auto& [k, v] : p.keys) set(c, k, v);
    c.preset = name;
    return;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace paratorus::harness
