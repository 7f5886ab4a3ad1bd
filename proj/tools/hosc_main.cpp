#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "hosc/cli.hpp"

using hosc::cli::Command;
using hosc::cli::Format;
using hosc::cli::RunConfig;

int main(int argc, char** argv) {
  CLI::App app{"Hermite-Galerkin eigenvalues and eigenvalue-sum bounds for -u'' + (x^2 + q) u"};
  app.require_subcommand(1);
  app.allow_extras(false);

  RunConfig config;
  std::string format = "csv";
  std::string out;
  int basis_size = 0;
  int quad_nodes = 0;
  std::string potential;

  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", out, "output path (default: standard output)");
  };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--potential", potential, "perturbation, e.g. gauss(a=1,s=0.5)")->required();
    sub->add_option("--n-max", config.n_max, "largest index n")->check(CLI::NonNegativeNumber);
    sub->add_option("--basis-size", basis_size, "fixed Galerkin basis size")->check(CLI::PositiveNumber);
    sub->add_option("--quad-nodes", quad_nodes, "minimum quadrature nodes")->check(CLI::PositiveNumber);
    sub->add_option("--tol", config.tol, "solver convergence tolerance")->check(CLI::PositiveNumber);
  };

  std::map<CLI::App*, Command> commands;
  CLI::App* seq = app.add_subcommand("sequences", "tabulate omega, chi, epsilon, tau");
  seq->add_option("--n-max", config.n_max, "largest index n")->check(CLI::NonNegativeNumber);
  add_output(seq);
  commands[seq] = Command::sequences;

  CLI::App* verify = app.add_subcommand("verify", "check every applicable bound for n = 0..n_max");
  add_solver(verify);
  verify->add_option("--s", config.s_values, "exponents for the power bounds")->delimiter(',')->check(
      CLI::PositiveNumber);
  add_output(verify);
  commands[verify] = Command::verify;

  CLI::App* trace = app.add_subcommand("trace", "regularized sums against the trace-formula constant");
  add_solver(trace);
  add_output(trace);
  commands[trace] = Command::trace;

  CLI::App* ce = app.add_subcommand("counterexample", "box potential whose regularized sum falls below -N");
  ce->add_option("--n", config.n, "index n")->check(CLI::NonNegativeNumber);
  ce->add_option("--N", config.N, "depth N")->check(CLI::PositiveNumber);
  add_output(ce);
  commands[ce] = Command::counterexample;

  CLI::App* hc = app.add_subcommand("hermite-check", "Hermite identity and bound suite");
  add_output(hc);
  commands[hc] = Command::hermite_check;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hosc::cli::kExitUsage;
  }

  for (const auto& [sub, command] : commands)
    if (sub->parsed()) config.command = command;
  config.format = format == "json" ? Format::json : Format::csv;
  if (!out.empty()) config.out = out;
  if (!potential.empty()) config.potential = potential;
  if (basis_size > 0) config.basis_size = basis_size;
  if (quad_nodes > 0) config.quad_nodes = quad_nodes;
  return hosc::cli::execute(config, std::cout, std::cerr);
}
