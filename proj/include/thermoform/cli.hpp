#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "thermoform/freezing.hpp"

namespace thermoform::cli {

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"pressure",     "induced",   "nonlinear", "nonlinear-induced",
                                              "freeze-sweep", "zero-temp", "max-ratio", "estimate",
                                              "verify"};
  return names;
}

struct SystemSpec {
  int alphabet_size = 0;
  std::vector<std::vector<int>> adjacency;
  bool operator==(const SystemSpec&) const = default;
};

struct PotentialSpec {
  int range = 1;
  std::map<std::string, double> values;  // word string -> value
  bool operator==(const PotentialSpec&) const = default;
};

/// F(x) = xᵀQx + cᵀx + offset. kind "linear" leaves q empty, "constant"
/// leaves c at zeros of the component dimension.
struct FunctionalSpec {
  std::string kind = "linear";
  std::vector<double> c;
  std::vector<std::vector<double>> q;
  double offset = 0.0;
  /// When given, must agree with the convexity computed from Q.
  std::optional<bool> convex;
  bool operator==(const FunctionalSpec&) const = default;
};

/// Defaults for every tolerance a command reads.
const std::map<std::string, double>& default_tolerances();

struct RunParameters {
  std::string phi = "phi";
  std::string psi = "psi";
  std::vector<std::string> components;  // nonlinear commands; defaults to {phi}
  std::optional<double> T;
  std::optional<int> n;
  std::optional<int> q;
  std::optional<std::vector<double>> beta_grid;
  double beta0 = 1.0;
  int test_depth = 2;
  std::uint64_t seed = 0;
  int restarts = 20;
  bool heuristic = false;
  std::optional<std::size_t> cap;
  std::map<std::string, double> tolerances;
  bool operator==(const RunParameters&) const = default;
};

struct OutputSpec {
  std::string csv_path;
  std::string svg_path;
  bool operator==(const OutputSpec&) const = default;
};

struct RunConfig {
  std::string command;
  std::optional<SystemSpec> system;  // optional for verify only
  std::map<std::string, PotentialSpec> potentials;
  std::optional<FunctionalSpec> functional;
  RunParameters parameters;
  OutputSpec output;
  bool operator==(const RunConfig&) const = default;
};

/// Parses and validates a JSON config, filling defaults. When the text has no
/// "command", default_command is used; a conflicting one is a SchemaError.
/// Throws Error with code SchemaError or ValidationError.
RunConfig parse_config(std::string_view text, const std::string& default_command = {});

std::string render_config(const RunConfig& config);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// printf "%#.12g": always 12 significant digits.
std::string format_number(double x);

std::string to_csv(const CsvTable& table);
/// Throws InvalidArgument on an empty table and IoError if the file cannot be
/// written.
void write_csv(const CsvTable& table, const std::string& path);

/// 800×500 plot of the pressure curve, the line β·Max + h_∞ and the largest
/// gap. Needs at least two points.
std::string render_sweep_svg(const BetaSweep& sweep);
void write_sweep_svg(const BetaSweep& sweep, const std::string& path);

struct RunResult {
  CsvTable table;
  std::optional<BetaSweep> sweep;
  /// Lines for standard error (verdicts, failed checks).
  std::vector<std::string> notes;
  bool verified = true;  // false when verify found a failing case
};

/// Runs the command; throws library errors.
RunResult compute(const RunConfig& config);

/// compute plus artifact writing. CSV goes to output.csv_path or to `out`.
/// Returns 0, 1 for config errors and 2 for computation or I/O errors, with a
/// diagnostic on `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

struct Invocation {
  std::string command;
  std::string config_path;
  std::optional<std::string> csv_path;
  std::optional<std::string> svg_path;
  std::optional<std::uint64_t> seed;
};

/// Reads the config file, applies command line overrides and runs.
int execute(const Invocation& invocation, std::ostream& out, std::ostream& err);

}  // namespace thermoform::cli
