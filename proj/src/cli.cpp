#include "hosc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "hosc/bounds.hpp"
#include "hosc/hermite.hpp"
#include "hosc/potentials.hpp"
#include "hosc/sequences.hpp"
#include "hosc/solver.hpp"

namespace hosc::cli {

namespace {

using json = nlohmann::ordered_json;
using bounds::TheoremId;

constexpr const char* kVersion = "1.0.0";
constexpr double kPi = std::numbers::pi;
constexpr int kCoefficientLimit = 50;

json number(double x) { return std::isfinite(x) ? json(round10(x)) : json(nullptr); }

std::string format_name(Format f) { return f == Format::csv ? "csv" : "json"; }

json config_echo(const RunConfig& c) {
  json j = json::object();
  j["command"] = command_name(c.command);
  j["potential"] = c.potential ? json(*c.potential) : json(nullptr);
  j["n_max"] = c.n_max;
  json s = json::array();
  for (double v : c.s_values) s.push_back(number(v));
  j["s_values"] = s;
  j["basis_size"] = c.basis_size ? json(*c.basis_size) : json(nullptr);
  j["quad_nodes"] = c.quad_nodes ? json(*c.quad_nodes) : json(nullptr);
  j["tol"] = number(c.tol);
  j["format"] = format_name(c.format);
  j["n"] = c.n;
  j["N"] = number(c.N);
  return j;
}

Report start(const RunConfig& c, std::vector<std::string> columns) {
  Report r;
  r.command = command_name(c.command);
  r.meta["version"] = kVersion;
  r.meta["config"] = config_echo(c);
  r.columns = std::move(columns);
  return r;
}

void add_warning(Report& r, const std::string& w) {
  if (!r.meta.contains("warnings")) r.meta["warnings"] = json::array();
  for (const auto& existing : r.meta["warnings"])
    if (existing == w) return;
  r.meta["warnings"].push_back(w);
}

potentials::PotentialSpec require_potential(const RunConfig& c) {
  if (!c.potential) throw std::invalid_argument(command_name(c.command) + " requires --potential");
  return potentials::parse(*c.potential);
}

solver::SolverOptions solver_options(const RunConfig& c) {
  solver::SolverOptions o;
  if (c.basis_size) o.basis_size = *c.basis_size;
  if (c.quad_nodes) o.quad_nodes = *c.quad_nodes;
  o.tol = c.tol;
  return o;
}

void validate(const RunConfig& c) {
  if (c.n_max < 0) throw std::invalid_argument("--n-max must be non-negative");
  if (!(c.tol > 0.0)) throw std::invalid_argument("--tol must be positive");
  for (double s : c.s_values)
    if (!(s > 0.0)) throw std::invalid_argument("--s values must be positive");
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

json bound_row(const bounds::BoundReport& b, bool power) {
  json row = json::object();
  row["theorem"] = bounds::theorem_name(b.theorem);
  row["n"] = b.n;
  row["s"] = power ? number(b.s) : json(nullptr);
  row["lhs"] = number(b.lhs);
  row["rhs"] = number(b.rhs);
  row["slack"] = number(b.slack);
  row["tolerance"] = number(b.inputs.verdict_tol);
  row["verdict"] = b.verdict ? "pass" : "fail";
  row["note"] = join(b.warnings);
  row["basis_size"] = b.inputs.basis_size;
  row["potential"] = b.inputs.potential;
  return row;
}

json other_row(TheoremId id, int n, std::optional<double> s, const std::string& verdict, const std::string& note,
               const solver::EigenResult& eig, const std::string& potential) {
  json row = json::object();
  row["theorem"] = bounds::theorem_name(id);
  row["n"] = n;
  row["s"] = s ? number(*s) : json(nullptr);
  row["lhs"] = nullptr;
  row["rhs"] = nullptr;
  row["slack"] = nullptr;
  row["tolerance"] = nullptr;
  row["verdict"] = verdict;
  row["note"] = note;
  row["basis_size"] = eig.basis_size;
  row["potential"] = potential;
  return row;
}

// Runs one (theorem, s) series over n = 0..n_last. A hypothesis failure at n
// also fails for every larger n, so the series stops at the first one.
template <class Check>
void run_series(Report& r, TheoremId id, std::optional<double> s, int n_last, const solver::EigenResult& eig,
                const std::string& potential, Check check) {
  for (int n = 0; n <= n_last; ++n) {
    try {
      const bounds::BoundReport b = check(n);
      r.rows.push_back(bound_row(b, s.has_value()));
      if (!b.verdict) r.ok = false;
    } catch (const bounds::HypothesisError& e) {
      r.rows.push_back(other_row(id, n, s, "skipped", std::string("skipped: hypothesis: ") + e.what(), eig, potential));
      return;
    } catch (const potentials::UnboundedError& e) {
      r.rows.push_back(other_row(id, n, s, "skipped", std::string("skipped: hypothesis: ") + e.what(), eig, potential));
      return;
    } catch (const std::exception& e) {
      r.rows.push_back(other_row(id, n, s, "error", std::string("error: ") + e.what(), eig, potential));
      r.ok = false;
      return;
    }
  }
}

void open_output(const std::string& path, std::ofstream& file) {
  file.open(path, std::ios::out | std::ios::trunc | std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file '" + path + "'");
}

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) return format10(v.get<double>());
  if (v.is_number()) return v.dump();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  std::string text = v.is_string() ? v.get<std::string>() : v.dump();
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char ch : text) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

// Hermite check helpers: each returns the largest residual over its range.

double recurrence_residual() {
  double worst = 0.0;
  for (int i = 0; i <= 160; ++i) {
    const double x = -8.0 + 0.1 * i;
    for (int n = 1; n < 100; ++n) {
      const double a = hermite::hermite_physicists(n + 1, x);
      const double b = 2.0 * x * hermite::hermite_physicists(n, x);
      const double c = 2.0 * n * hermite::hermite_physicists(n - 1, x);
      const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
      if (scale > 0.0) worst = std::max(worst, std::abs(a - b + c) / scale);
    }
  }
  return worst;
}

double derivative_residual() {
  const double h = 1e-5;
  double worst = 0.0;
  for (int n = 1; n <= 30; ++n) {
    double scale = 0.0;
    double diff = 0.0;
    for (int i = 0; i <= 60; ++i) {
      const double x = -3.0 + 0.1 * i;
      const double exact = 2.0 * n * hermite::hermite_physicists(n - 1, x);
      const double fd = (hermite::hermite_physicists(n, x + h) - hermite::hermite_physicists(n, x - h)) / (2.0 * h);
      scale = std::max(scale, std::abs(exact));
      diff = std::max(diff, std::abs(fd - exact));
    }
    worst = std::max(worst, diff / scale);
  }
  return worst;
}

double gram_residual() {
  const int N = 60;
  const hermite::QuadratureRule rule = hermite::gauss_hermite_rule(2 * N + 8);
  std::vector<std::vector<double>> gram(N + 1, std::vector<double>(N + 1, 0.0));
  std::vector<double> p(N + 1);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    hermite::hermite_orthonormal_all(rule.nodes[i], p);
    for (int j = 0; j <= N; ++j)
      for (int k = 0; k <= N; ++k) gram[j][k] += rule.weights[i] * p[j] * p[k];
  }
  double worst = 0.0;
  for (int j = 0; j <= N; ++j)
    for (int k = 0; k <= N; ++k) worst = std::max(worst, std::abs(gram[j][k] - (j == k ? 1.0 : 0.0)));
  return worst;
}

double turan_residual() {
  double worst = 0.0;
  for (int n = 0; n <= 30; ++n)
    for (int i = 0; i <= 120; ++i) {
      const double x = -6.0 + 0.1 * i;
      const double a = hermite::turan_sum(n, x);
      const double b = hermite::turan_closed_form(n, x);
      worst = std::max(worst, std::abs(a - b) / std::abs(b));
    }
  return worst;
}

double h_n_identity_residual() {
  double worst = 0.0;
  for (int n = 0; n <= 30; ++n)
    for (int i = 0; i <= 120; ++i) {
      const double x = -6.0 + 0.1 * i;
      const double a = hermite::h_n(n, x);
      const double b = hermite::h_n_raw(n, x);
      worst = std::max(worst, std::abs(a - b) / std::abs(b));
    }
  return worst;
}

// Returns 0 when h_n > 0 on the grid and the largest relative overshoot of
// the bound otherwise; positivity failures count as 1.
double h_n_bound_residual() {
  double worst = 0.0;
  for (int n = 0; n <= 20; ++n) {
    const double bound = hermite::h_n_bound(n);
    for (int i = 0; i <= 2000; ++i) {
      const double x = -10.0 + 0.01 * i;
      const double h = hermite::h_n(n, x);
      if (!(h > 0.0)) return 1.0;
      worst = std::max(worst, h / bound - 1.0);
    }
  }
  return std::max(worst, 0.0);
}

double h_n_attained_residual() {
  double worst = 0.0;
  for (int n = 0; n <= 20; n += 2)
    worst = std::max(worst, std::abs(hermite::h_n(n, 0.0) / hermite::h_n_bound(n) - 1.0));
  return worst;
}

double moment_double_residual() {
  const hermite::QuadratureRule rule = hermite::gauss_hermite_rule(40);
  double worst = 0.0;
  for (int n = 0; n <= 20; ++n)
    for (int m = 0; m <= 20; ++m) {
      double sum = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * hermite::hermite_physicists(n, rule.nodes[i]) *
               hermite::hermite_physicists(m, rule.nodes[i]);
      const double scale =
          std::sqrt(hermite::hermite_moment_double(n, n) * hermite::hermite_moment_double(m, m));
      worst = std::max(worst, std::abs(sum - hermite::hermite_moment_double(n, m)) / scale);
    }
  return worst;
}

double moment_triple_residual() {
  const hermite::QuadratureRule rule = hermite::gauss_hermite_rule(40);
  double worst = 0.0;
  for (int a = 0; a <= 10; ++a)
    for (int b = 0; b <= 10; ++b)
      for (int c = 0; c <= 10; ++c) {
        double sum = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
          const double x = rule.nodes[i];
          sum += rule.weights[i] * hermite::hermite_physicists(a, x) * hermite::hermite_physicists(b, x) *
                 hermite::hermite_physicists(c, x);
        }
        const double scale = std::sqrt(hermite::hermite_moment_double(a, a) * hermite::hermite_moment_double(b, b) *
                                       hermite::hermite_moment_double(c, c));
        worst = std::max(worst, std::abs(sum - hermite::hermite_moment_triple(a, b, c)) / scale);
      }
  return worst;
}

double gaussian_squared_residual() {
  // int e^{-2x^2} H_k^2 = int e^{-x^2} (e^{-x^2} H_k^2)
  const hermite::QuadratureRule rule = hermite::gauss_hermite_rule(60);
  double worst = 0.0;
  for (int k = 0; k <= 12; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double x = rule.nodes[i];
      const double H = hermite::hermite_physicists(k, x);
      sum += rule.weights[i] * std::exp(-x * x) * H * H;
    }
    const double exact = hermite::gaussian_squared_moment(k);
    worst = std::max(worst, std::abs(sum - exact) / exact);
  }
  return worst;
}

}  // namespace

std::string command_name(Command c) {
  switch (c) {
    case Command::sequences: return "sequences";
    case Command::verify: return "verify";
    case Command::trace: return "trace";
    case Command::counterexample: return "counterexample";
    case Command::hermite_check: return "hermite-check";
  }
  return "unknown";
}

double round10(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

std::string format10(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", round10(x));
  return buf;
}

std::string render_csv(const Report& report) {
  std::ostringstream out;
  for (std::size_t i = 0; i < report.columns.size(); ++i) out << (i ? "," : "") << report.columns[i];
  out << '\n';
  for (const json& row : report.rows) {
    for (std::size_t i = 0; i < report.columns.size(); ++i) {
      if (i) out << ',';
      const auto it = row.find(report.columns[i]);
      if (it != row.end()) out << csv_cell(*it);
    }
    out << '\n';
  }
  return out.str();
}

std::string render_json(const Report& report) {
  json doc = json::object();
  json meta = report.meta;
  meta["command"] = report.command;
  meta["columns"] = report.columns;
  meta["ok"] = report.ok;
  doc["meta"] = meta;
  doc["rows"] = report.rows;
  return doc.dump(2) + "\n";
}

std::string render(const Report& report, Format format) {
  return format == Format::csv ? render_csv(report) : render_json(report);
}

Report cmd_sequences(const RunConfig& config) {
  validate(config);
  Report r = start(config, {"n", "omega", "chi", "epsilon", "tau", "chi_residual"});
  const sequences::SequenceTable t = sequences::build_table(config.n_max);
  for (std::size_t i = 0; i < t.n_values.size(); ++i) {
    json row = json::object();
    row["n"] = t.n_values[i];
    row["omega"] = number(t.omega[i]);
    row["chi"] = number(t.chi[i]);
    row["epsilon"] = number(t.epsilon[i]);
    row["tau"] = number(t.tau[i]);
    row["chi_residual"] = number(t.chi_residual[i]);
    r.rows.push_back(row);
  }
  json footer = json::object();
  footer["n"] = "-Z0(1/2)";
  footer["chi"] = number(t.minus_z0_half);
  r.rows.push_back(footer);
  return r;
}

Report cmd_verify(const RunConfig& config) {
  validate(config);
  const potentials::PotentialSpec q = require_potential(config);
  Report r = start(config, {"theorem", "n", "s", "lhs", "rhs", "slack", "tolerance", "verdict", "note", "basis_size",
                            "potential"});
  const solver::EigenResult eig = bounds::solve_for(q, config.n_max, solver_options(config));
  for (const auto& w : eig.warnings) add_warning(r, w);
  r.meta["basis_size"] = eig.basis_size;
  r.meta["previous_basis_size"] = eig.previous_basis_size;
  r.meta["converged"] = eig.converged;
  const std::string name = q.to_string();
  const int n_max = config.n_max;
  const int n_coeff = std::min(n_max, kCoefficientLimit);

  run_series(r, TheoremId::thm31, std::nullopt, n_max, eig, name, [&](int n) { return bounds::check_thm31(q, n, eig); });
  run_series(r, TheoremId::thm41, std::nullopt, n_max, eig, name, [&](int n) { return bounds::check_thm41(q, n, eig); });
  const potentials::FullPotential v{1.0, 0.0, q};
  run_series(r, TheoremId::thm51, std::nullopt, n_coeff, eig, name,
             [&](int n) { return bounds::check_thm51(v, n, eig); });
  if (n_max > kCoefficientLimit)
    r.rows.push_back(other_row(TheoremId::thm51, kCoefficientLimit + 1, std::nullopt, "skipped",
                               "skipped: coefficient checks support n <= 50", eig, name));
  run_series(r, TheoremId::cor53, std::nullopt, n_coeff, eig, name, [&](int n) { return bounds::check_cor53(q, n, eig); });
  if (n_max > kCoefficientLimit)
    r.rows.push_back(other_row(TheoremId::cor53, kCoefficientLimit + 1, std::nullopt, "skipped",
                               "skipped: coefficient checks support n <= 50", eig, name));

  std::vector<double> s_values = config.s_values;
  std::sort(s_values.begin(), s_values.end());
  s_values.erase(std::unique(s_values.begin(), s_values.end()), s_values.end());
  for (double s : s_values)
    run_series(r, TheoremId::power1, s, n_max, eig, name, [&](int n) { return bounds::check_power1(q, n, s, eig); });
  for (double s : s_values)
    run_series(r, TheoremId::power1a, s, n_max, eig, name, [&](int n) { return bounds::check_power1a(q, n, s, eig); });
  for (double s : s_values)
    run_series(r, TheoremId::powerzeromean, s, n_max, eig, name,
               [&](int n) { return bounds::check_powerzeromean(q, n, s, eig); });

  // (theorem, n, s) order: within a theorem the power rows are grouped by s,
  // so regroup them by n.
  std::stable_sort(r.rows.begin(), r.rows.end(), [](const json& a, const json& b) {
    auto rank = [](const json& row) {
      const std::string t = row["theorem"];
      for (int id = 0; id <= static_cast<int>(TheoremId::prop34); ++id)
        if (bounds::theorem_name(static_cast<TheoremId>(id)) == t) return id;
      return 99;
    };
    const int ra = rank(a);
    const int rb = rank(b);
    if (ra != rb) return ra < rb;
    if (a["n"] != b["n"]) return a["n"].get<int>() < b["n"].get<int>();
    const double sa = a["s"].is_null() ? 0.0 : a["s"].get<double>();
    const double sb = b["s"].is_null() ? 0.0 : b["s"].get<double>();
    return sa < sb;
  });
  return r;
}

Report cmd_trace(const RunConfig& config) {
  validate(config);
  const potentials::PotentialSpec q = require_potential(config);
  if (!potentials::certified_nonnegative(q))
    throw bounds::HypothesisError("trace requires q >= 0; " + q.to_string() + " is not certified non-negative");
  Report r = start(config, {"n", "regularized_sum", "rhs_chi", "trace_target", "gap_to_target"});
  const solver::EigenResult eig = bounds::solve_for(q, config.n_max, solver_options(config));
  for (const auto& w : eig.warnings) add_warning(r, w);
  r.meta["basis_size"] = eig.basis_size;
  r.meta["converged"] = eig.converged;
  const double I = potentials::integral(q);
  const sequences::SequenceTable t = sequences::build_table(config.n_max);
  const double target = t.minus_z0_half * I / kPi;
  r.meta["trace_target"] = number(target);
  for (int n = 0; n <= config.n_max; ++n) {
    const double reg = bounds::regularized_sum(eig.eigenvalues, I, n);
    json row = json::object();
    row["n"] = n;
    row["regularized_sum"] = number(reg);
    row["rhs_chi"] = number(t.chi[static_cast<std::size_t>(n)] * I / kPi);
    row["trace_target"] = number(target);
    row["gap_to_target"] = number(reg - target);
    r.rows.push_back(row);
  }
  return r;
}

Report cmd_counterexample(const RunConfig& config) {
  if (config.n < 0) throw std::invalid_argument("--n must be non-negative");
  if (!(config.N > 0.0)) throw std::invalid_argument("--N must be positive");
  Report r = start(config, {"kind", "delta", "K", "regularized_sum", "target", "basis_size", "largest_estimate",
                            "verdict"});
  const bounds::Counterexample ce = bounds::counterexample(config.n, config.N);
  for (const auto& a : ce.attempts) {
    json row = json::object();
    row["kind"] = "attempt";
    row["delta"] = number(a.delta);
    row["K"] = number(ce.K);
    row["regularized_sum"] = number(a.regularized);
    row["target"] = number(-config.N);
    row["basis_size"] = a.basis_size;
    row["largest_estimate"] = number(a.largest_estimate);
    row["verdict"] = a.regularized <= -config.N ? "pass" : "fail";
    r.rows.push_back(row);
  }
  json result = json::object();
  result["kind"] = "result";
  result["delta"] = number(ce.report.diagnostics.count("delta") ? ce.report.diagnostics.at("delta") : 0.0);
  result["K"] = number(ce.K);
  result["regularized_sum"] = number(ce.report.lhs);
  result["target"] = number(ce.report.rhs);
  result["basis_size"] = ce.report.inputs.basis_size;
  result["largest_estimate"] = ce.attempts.empty() ? json(nullptr) : number(ce.attempts.back().largest_estimate);
  result["verdict"] = ce.found ? "pass" : "fail";
  r.rows.push_back(result);
  r.meta["potential"] = ce.potential.to_string();
  r.meta["C_n"] = number(ce.C_n);
  for (const auto& w : ce.report.warnings) add_warning(r, w);
  r.ok = ce.found;
  return r;
}

Report cmd_hermite_check(const RunConfig& config) {
  Report r = start(config, {"check", "max_residual", "threshold", "verdict"});
  struct Item {
    const char* name;
    double (*residual)();
    double threshold;
  };
  const Item items[] = {
      {"recurrence", recurrence_residual, 1e-10},
      {"derivative_fd", derivative_residual, 1e-5},
      {"gram_n60", gram_residual, 1e-10},
      {"sumH", turan_residual, 1e-10},
      {"h_n_identity", h_n_identity_residual, 1e-10},
      {"h_n_bound", h_n_bound_residual, 1e-12},
      {"h_n_attained_even", h_n_attained_residual, 1e-10},
      {"moment_double", moment_double_residual, 1e-10},
      {"moment_triple", moment_triple_residual, 1e-10},
      {"gaussian_squared_moment", gaussian_squared_residual, 1e-10},
  };
  for (const Item& item : items) {
    const double res = item.residual();
    json row = json::object();
    row["check"] = item.name;
    row["max_residual"] = number(res);
    row["threshold"] = number(item.threshold);
    const bool pass = res < item.threshold;
    row["verdict"] = pass ? "pass" : "fail";
    if (!pass) r.ok = false;
    r.rows.push_back(row);
  }
  return r;
}

Report run(const RunConfig& config) {
  switch (config.command) {
    case Command::sequences: return cmd_sequences(config);
    case Command::verify: return cmd_verify(config);
    case Command::trace: return cmd_trace(config);
    case Command::counterexample: return cmd_counterexample(config);
    case Command::hermite_check: return cmd_hermite_check(config);
  }
  throw std::invalid_argument("unknown command");
}

int execute(const RunConfig& config, std::ostream& stdout_stream, std::ostream& err) {
  Report report;
  try {
    report = run(config);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  const std::string text = render(report, config.format);
  if (config.out && !config.out->empty()) {
    try {
      std::ofstream file;
      open_output(*config.out, file);
      file << text;
      file.close();
      if (!file) throw std::runtime_error("write to '" + *config.out + "' failed");
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    }
  } else {
    stdout_stream << text;
  }
  if (report.meta.contains("warnings"))
    for (const auto& w : report.meta["warnings"]) err << "warning: " << w.get<std::string>() << '\n';
  return report.ok ? kExitPass : kExitFail;
}

}  // namespace hosc::cli
