#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "hmfloquet/commands.hpp"

namespace {

struct FlagSpec {
  const char* name;  // long flag, also the config-file key
  const char* help;
};

const FlagSpec kValueFlags[] = {
    {"A-over-omega", "A/omega value or start:stop:step"},
    {"phi", "phase in radians (pi expressions allowed) or start:stop:step"},
    {"chi", "nonlinearity value or range"},
    {"omega", "drive frequency"},
    {"v", "tunneling rate"},
    {"f", "second-harmonic ratio"},
    {"N", "initial Fourier cutoff"},
    {"tol", "solver residual tolerance"},
    {"max-iter", "self-consistent sweep limit"},
    {"damping", "mixing weight of the new iterate"},
    {"dt", "RK4 step (default T/500)"},
    {"t-end", "integration end time (dynamics)"},
    {"alpha", "ramp rate"},
    {"tf", "ramp hold time"},
    {"dt-avg", "averaging window after tf"},
    {"initial", "initial state for dynamics: 1, 2 or ground"},
    {"threads", "worker threads for ramp sweeps (0 = all cores)"},
    {"out", "output CSV path (default stdout)"},
};

const FlagSpec kSwitches[] = {
    {"json", "also write a JSON mirror (<out>.json, or JSON on stdout)"},
    {"validate", "add quadrature / step-doubling columns"},
    {"trajectories", "write full trajectories to <out>.traj.csv"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear Floquet states of a two-mode system under harmonic-mixing driving"};
  std::string command;
  app.add_option("command", command, "spectrum | perturb | dynamics | ramp | symmetry | validate")->required();
  std::optional<std::string> config_path;
  app.add_option("--config", config_path, "key=value config file (flags override it)");
  bool preset = false;
  app.add_flag("--paper", preset, "f=1/4, omega=10, v=1, chi=0.4, alpha=0.01, tf=2400, dt-avg=400");
  bool print_config = false;
  app.add_flag("--print-config", print_config, "print the resolved config and exit");

  std::map<std::string, std::optional<std::string>> values;
  for (const auto& f : kValueFlags) app.add_option(std::string("--") + f.name, values[f.name], f.help);
  std::map<std::string, bool> switches;
  for (const auto& f : kSwitches) app.add_flag(std::string("--") + f.name, switches[f.name], f.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  hmf::RunConfig cfg;
  try {
    hmf::KeyValues kv;
    if (preset) kv = hmf::standard_preset();
    if (config_path) kv = hmf::merge(kv, hmf::read_config_file(*config_path));
    hmf::KeyValues flags{{"command", command}};
    for (const auto& [k, v] : values)
      if (v) flags[k] = *v;
    for (const auto& [k, on] : switches)
      if (on) flags[k] = "true";
    cfg = hmf::config_from_key_values(hmf::merge(kv, flags));
  } catch (const hmf::IoError& e) {
    std::cerr << "hmfloquet: I/O error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "hmfloquet: configuration error: " << e.what() << "\n";
    return 1;
  }
  if (print_config) {
    std::cout << hmf::serialize_config(cfg);
    return 0;
  }
  return hmf::run(cfg, std::cout, std::cerr);
}
