#pragma once

#include <map>
#include <string>
#include <vector>

#include "hmfloquet/errors.hpp"

namespace hmf {

class ConfigError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { spectrum, perturb, dynamics, ramp, symmetry, validate };

std::string to_string(Command c);
Command parse_command(const std::string& s);

/// Real-valued expression with +, -, *, /, parentheses and the constant pi,
/// e.g. "-pi", "3*pi/4", "0.25".
double parse_real(const std::string& text);

/// Inclusive arithmetic range "start:stop:step" or a single value.
struct Range {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;  // 0 for a single value

  static Range single(double x) { return {x, x, 0.0}; }
  static Range parse(const std::string& text);
  std::vector<double> values() const;
  std::string to_string() const;
  bool operator==(const Range&) const = default;
};

struct RunConfig {
  Command command = Command::spectrum;
  double v = 1.0;
  double omega = 10.0;
  double f = 0.25;
  Range a_over_omega = Range::single(2.4);
  Range phi = Range::single(0.0);
  Range chi = Range::single(0.0);
  int cutoff = 16;
  double tol = 1e-11;
  int max_iter = 200;
  double damping = 0.5;
  double dt = 0.0;  // 0 selects T/500
  double t_end = 2000.0;
  double alpha = 0.01;
  double t_f = 2400.0;
  double dt_avg = 400.0;
  std::string initial = "1";  // 1, 2 or ground
  std::string out;            // empty writes to stdout
  bool json = false;
  bool validate = false;
  bool trajectories = false;
  unsigned threads = 0;

  void check() const;
  bool operator==(const RunConfig&) const = default;
};

using KeyValues = std::map<std::string, std::string>;

/// Flat key=value text; '#' starts a comment, blank lines are skipped.
KeyValues parse_key_values(const std::string& text);
KeyValues read_config_file(const std::string& path);

/// The standard parameter set: f, omega, v, chi, alpha, tf and dt-avg.
KeyValues standard_preset();

/// Later maps override earlier ones.
KeyValues merge(KeyValues base, const KeyValues& overrides);

RunConfig config_from_key_values(const KeyValues& kv);
KeyValues config_to_key_values(const RunConfig& cfg);
std::string serialize_config(const RunConfig& cfg);
RunConfig parse_config(const std::string& text);

/// Shortest round-tripping decimal form (17 significant digits).
std::string format_real(double x);

}  // namespace hmf
