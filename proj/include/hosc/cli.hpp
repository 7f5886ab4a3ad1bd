#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace hosc::cli {

enum class Command { sequences, verify, trace, counterexample, hermite_check };
enum class Format { csv, json };

struct RunConfig {
  Command command = Command::sequences;
  std::optional<std::string> potential;
  int n_max = 10;
  std::vector<double> s_values{0.5, 1.0, 2.0};
  std::optional<int> basis_size;
  std::optional<int> quad_nodes;
  double tol = 1e-8;
  Format format = Format::csv;
  std::optional<std::string> out;  ///< standard output when empty
  int n = 2;                       ///< counterexample
  double N = 10.0;                 ///< counterexample
};

/// Exit codes: 0 all verdicts pass, 1 a verdict failed or an error row was
/// emitted, 2 usage, parse or I/O error.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

/// Rows share one column list; cells are JSON scalars (null renders empty in CSV).
struct Report {
  std::string command;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  std::vector<std::string> columns;
  std::vector<nlohmann::ordered_json> rows;
  bool ok = true;
};

std::string command_name(Command c);

/// Double rounded to 10 significant digits; format10 prints it with %.10g.
double round10(double x);
std::string format10(double x);

std::string render_csv(const Report& report);
std::string render_json(const Report& report);
std::string render(const Report& report, Format format);

Report cmd_sequences(const RunConfig& config);
Report cmd_verify(const RunConfig& config);
Report cmd_trace(const RunConfig& config);
Report cmd_counterexample(const RunConfig& config);
Report cmd_hermite_check(const RunConfig& config);

Report run(const RunConfig& config);

/// Runs the command and writes to config.out (or `stdout_stream`). Errors are
/// written to `err` and mapped to kExitUsage.
int execute(const RunConfig& config, std::ostream& stdout_stream, std::ostream& err);

}  // namespace hosc::cli
