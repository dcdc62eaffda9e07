#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "hmfloquet/config.hpp"

namespace hmf {

/// A command failed inside a solver or integrator (exit code 3).
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Cell = std::variant<double, long, std::string>;

struct Table {
  std::vector<std::string> notes;  // extra '#' lines after the config block
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Result tables of one command. The first table goes to the main output;
/// `extra` holds optional side tables keyed by file suffix.
struct CommandOutput {
  Table main;
  std::vector<std::pair<std::string, Table>> extra;
  bool failed_checks = false;  // validate only
};

CommandOutput cmd_spectrum(const RunConfig& cfg);
CommandOutput cmd_perturb(const RunConfig& cfg);
CommandOutput cmd_dynamics(const RunConfig& cfg);
CommandOutput cmd_ramp(const RunConfig& cfg);
CommandOutput cmd_symmetry(const RunConfig& cfg);
CommandOutput cmd_validate(const RunConfig& cfg);

CommandOutput dispatch(const RunConfig& cfg);

/// CSV with a '#' block recording the full config; reals use 17 digits.
void write_csv(std::ostream& os, const RunConfig& cfg, const Table& t);
void write_json(std::ostream& os, const RunConfig& cfg, const Table& t);

/// Runs the configured command and writes its files. Returns the exit code:
/// 0 success, 1 config error, 2 I/O error, 3 solver or integrator failure.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace hmf
