// Command-line front end. Every subcommand accepts the same flags; only the
// flags actually given override the config file and preset.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "paratorus/harness/commands.hpp"

namespace {

struct FlagInfo {
  const char* key;
  const char* help;
};

const std::vector<FlagInfo> kFlags{
    {"preset", "named preset (see the presets subcommand)"},
    {"grid", "grid points per side n"},
    {"alpha", "regularity exponent alpha"},
    {"beta", "exponent beta with 2/3 < beta < alpha < 1"},
    {"s", "symbol order s <= 0"},
    {"mu", "symbol support band mu in (0,1)"},
    {"gammas", "comma list of Besov exponents for sample-noise"},
    {"gamma", "Hoelder exponent of the Cauchy moments"},
    {"r", "moment order"},
    {"eps-ladder", "2^-a..2^-b or a comma list of cutoffs"},
    {"samples", "Monte-Carlo sample count M"},
    {"dt", "time step cap"},
    {"T", "final time"},
    {"output-dt", "trajectory node spacing"},
    {"t-smooth", "initial heat smoothing time (negative: 4 dt)"},
    {"seed", "master seed"},
    {"out", "output directory"},
    {"symbol", "identity | gaussian:tau=.. | bessel:s=.. | modulated:amp=..,s=.. | file:PATH"},
    {"b-symbol", "symbol B, same syntax as --symbol"},
    {"f", "const:c | tanh:shift=..,scale=.. | sin:amp=.. | clamped:slope=..,radius=..,width=.."},
    {"g", "nonlinearity g, same syntax as --f"},
    {"u0", "initial condition: zero | bump"},
    {"report-alpha", "exponent of reported parabolic norms"},
    {"counterterms", "true | false"},
    {"snapshot-stride", "write u every k trajectory nodes (0: final only)"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"paratorus: renormalized quasilinear SPDE experiments on the 2-torus"};
  app.require_subcommand(1);
  std::map<std::string, std::string> values;
  std::optional<std::string> config_file;
  std::string config_value;
  for (const auto& name : paratorus::harness::subcommands()) {
    auto* sub = app.add_subcommand(name);
    for (const auto& f : kFlags) sub->add_option(std::string("--") + f.key, values[f.key], f.help);
    sub->add_option("--config", config_value, "flat key = value file; flags override its keys");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error category=usage: " << e.what() << "\n";
    return paratorus::harness::kConfig;
  }
  CLI::App* sub = app.get_subcommands().front();
  std::map<std::string, std::string> given;
  for (const auto& f : kFlags)
    if (sub->count(std::string("--") + f.key) > 0) given[f.key] = values[f.key];
  if (sub->count("--config") > 0) config_file = config_value;

  paratorus::harness::RunConfig cfg;
  try {
    cfg = paratorus::harness::build_config(sub->get_name(), config_file, given);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error category=config: " << e.what() << "\n";
    return paratorus::harness::kConfig;
  }
  return paratorus::harness::run_guarded(cfg, std::cout, std::cerr);
}
