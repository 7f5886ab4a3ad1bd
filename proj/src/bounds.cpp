#include "hosc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hosc/hermite.hpp"
#include "hosc/sequences.hpp"
#include "hosc/special.hpp"

namespace hosc::bounds {

namespace {

using potentials::PotentialSpec;
using special::CompensatedSum;

constexpr double kPi = std::numbers::pi;
constexpr double kMinTolerance = 1e-8;
constexpr int kCoefficientNodes = 240;

void require_values(const solver::EigenResult& eig, int n) {
  if (n < 0) throw std::invalid_argument("n must be non-negative");
  if (static_cast<int>(eig.eigenvalues.size()) < n + 1)
    throw std::invalid_argument("need " + std::to_string(n + 1) + " eigenvalues, have " +
                                std::to_string(eig.eigenvalues.size()));
}

std::vector<double> estimates_upto(const solver::EigenResult& eig, int n) {
  std::vector<double> e(static_cast<std::size_t>(n + 1), 0.0);
  for (std::size_t k = 0; k < e.size() && k < eig.convergence_estimate.size(); ++k) e[k] = eig.convergence_estimate[k];
  return e;
}

BoundReport start(TheoremId id, int n, const std::string& potential, const solver::EigenResult& eig) {
  BoundReport r;
  r.theorem = id;
  r.n = n;
  r.inputs.potential = potential;
  r.inputs.basis_size = eig.basis_size;
  r.inputs.convergence_estimate = eig.estimate_sum(n + 1);
  r.warnings = eig.warnings;
  return r;
}

void finish_upper(BoundReport& r, double tol) {
  r.slack = r.rhs - r.lhs;
  r.inputs.verdict_tol = tol;
  r.verdict = r.slack >= -tol;
}

void finish_lower(BoundReport& r, double tol) {
  r.slack = r.lhs - r.rhs;
  r.inputs.verdict_tol = tol;
  r.verdict = r.slack >= -tol;
}

double sum_tolerance(const solver::EigenResult& eig, int n) {
  return verdict_tolerance(std::vector<double>(static_cast<std::size_t>(n + 1), 1.0), estimates_upto(eig, n));
}

// sqrt((2k)!) / (k! pi^{1/4}) C(n+1, k+1) in log form: 2^k (2k)!/k! C(n+1,k+1) v_{2k}
// written against the orthonormal projection c_{2k}.
double log_projection_factor(int n, int k) {
  const double log_binom = special::log_factorial(n + 1) - special::log_factorial(k + 1) - special::log_factorial(n - k);
  return 0.5 * special::log_factorial(2 * k) - special::log_factorial(k) + log_binom - 0.25 * std::log(kPi);
}

double coefficient_sum(const std::vector<double>& projections, int n) {
  CompensatedSum sum;
  for (int k = 0; k <= n; ++k) {
    const double c = projections[static_cast<std::size_t>(2 * k)];
    if (c == 0.0) continue;
    sum += c * std::exp(log_projection_factor(n, k));
  }
  return sum.value();
}

double integral_term_sum(double q_integral, int n) {
  CompensatedSum sum;
  for (int k = 0; k <= n; ++k) sum += q_integral / (kPi * std::sqrt(2.0 * k + 1.0));
  return sum.value();
}

double rayleigh_regularized(const PotentialSpec& q, int n, double q_integral) {
  const hermite::QuadratureRule rule = solver::default_quadrature(q, std::max(n + 1, 40));
  CompensatedSum sum;
  for (int k = 0; k <= n; ++k)
    sum += solver::rayleigh_quotient(q, k, rule) - (2.0 * k + 1.0) - q_integral / (kPi * std::sqrt(2.0 * k + 1.0));
  return sum.value();
}

}  // namespace

std::string theorem_name(TheoremId id) {
  switch (id) {
    case TheoremId::thm31: return "thm31";
    case TheoremId::thm41: return "thm41";
    case TheoremId::thm51: return "thm51";
    case TheoremId::cor53: return "cor53";
    case TheoremId::power1: return "power1";
    case TheoremId::power1a: return "power1a";
    case TheoremId::powerzeromean: return "powerzeromean";
    case TheoremId::prop34: return "prop34";
  }
  return "unknown";
}

double regularized_sum(const std::vector<double>& lambdas, double q_integral, int n) {
  if (n < 0 || static_cast<int>(lambdas.size()) < n + 1) throw std::invalid_argument("need n + 1 eigenvalues");
  CompensatedSum sum;
  for (int k = 0; k <= n; ++k) {
    const double l0 = 2.0 * k + 1.0;
    sum += lambdas[static_cast<std::size_t>(k)] - l0;
    sum += -q_integral / (kPi * std::sqrt(l0));
  }
  return sum.value();
}

double verdict_tolerance(const std::vector<double>& sensitivity, const std::vector<double>& estimate) {
  CompensatedSum sum;
  for (std::size_t k = 0; k < sensitivity.size() && k < estimate.size(); ++k)
    sum += std::abs(sensitivity[k]) * estimate[k];
  return std::max(kMinTolerance, 2.0 * sum.value());
}

solver::EigenResult solve_for(const PotentialSpec& q, int n_max, const solver::SolverOptions& options) {
  if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
  return solver::solve(q, n_max + 1, options);
}

BoundReport check_thm31(const PotentialSpec& q, int n, const solver::EigenResult& eig) {
  if (!potentials::certified_nonnegative(q))
    throw HypothesisError("thm31 needs q >= 0; " + q.to_string() + " is not certified non-negative");
  require_values(eig, n);
  BoundReport r = start(TheoremId::thm31, n, q.to_string(), eig);
  const double I = potentials::integral(q);
  r.lhs = regularized_sum(eig.eigenvalues, I, n);
  r.rhs = sequences::chi(n) * I / kPi;
  r.diagnostics["q_integral"] = I;
  r.diagnostics["intermediate"] = rayleigh_regularized(q, n, I);
  finish_upper(r, sum_tolerance(eig, n));
  return r;
}

BoundReport check_thm41(const PotentialSpec& q, int n, const solver::EigenResult& eig) {
  require_values(eig, n);
  const double qm = potentials::q_m(q);
  BoundReport r = start(TheoremId::thm41, n, q.to_string(), eig);
  const double I = potentials::integral(q);
  r.lhs = regularized_sum(eig.eigenvalues, I, n);
  r.rhs = sequences::chi(n) * I / kPi + sequences::epsilon(n) * qm / std::sqrt(kPi);
  r.diagnostics["q_integral"] = I;
  r.diagnostics["q_m"] = qm;
  finish_upper(r, sum_tolerance(eig, n));
  return r;
}

BoundReport check_thm51(const potentials::FullPotential& v, int n, const solver::EigenResult& eig) {
  if (v.harmonic != 1.0) throw std::invalid_argument("the solver handles V = x^2 + constant + q only");
  require_values(eig, n);
  if (2 * n > 100) throw std::invalid_argument("thm51 check supports n <= 50");
  std::string name = v.q.to_string();
  if (v.constant != 0.0) name = "x^2+" + std::to_string(v.constant) + "+" + name;
  BoundReport r = start(TheoremId::thm51, n, name, eig);
  const potentials::HermiteCoefficients coeff = potentials::hermite_coefficients(v, std::max(2 * n, 2), kCoefficientNodes);
  CompensatedSum lhs;
  for (int k = 0; k <= n; ++k) lhs += eig.eigenvalues[static_cast<std::size_t>(k)];
  r.lhs = lhs.value();
  r.rhs = coefficient_sum(coeff.projections, n) + 0.5 * (n + 1.0) * (n + 1.0);
  r.diagnostics["tail_estimate"] = coeff.tail_estimate;
  for (const auto& w : coeff.warnings)
    if (w.find("dropped-coefficient") == std::string::npos) r.warnings.push_back(w);
  finish_upper(r, sum_tolerance(eig, n));
  return r;
}

BoundReport check_cor53(const PotentialSpec& q, int n, const solver::EigenResult& eig) {
  require_values(eig, n);
  if (2 * n > 100) throw std::invalid_argument("cor53 check supports n <= 50");
  BoundReport r = start(TheoremId::cor53, n, q.to_string(), eig);
  const double I = potentials::integral(q);
  const potentials::HermiteCoefficients coeff = potentials::hermite_coefficients(q, std::max(2 * n, 2), kCoefficientNodes);
  r.lhs = regularized_sum(eig.eigenvalues, I, n);
  r.rhs = coefficient_sum(coeff.projections, n) - integral_term_sum(I, n);
  r.diagnostics["q_integral"] = I;
  r.diagnostics["tail_estimate"] = coeff.tail_estimate;
  for (const auto& w : coeff.warnings)
    if (w.find("dropped-coefficient") == std::string::npos) r.warnings.push_back(w);
  if (potentials::certified_nonnegative(q)) {
    const double thm31_rhs = sequences::chi(n) * I / kPi;
    r.diagnostics["thm31_rhs"] = thm31_rhs;
    r.diagnostics["chain_ok"] = r.rhs <= thm31_rhs + 1e-8 ? 1.0 : 0.0;
  }
  finish_upper(r, sum_tolerance(eig, n));
  return r;
}

BoundReport check_power1(double q_integral, int n, double s, const std::vector<double>& lambdas,
                         const std::vector<double>& estimate) {
  if (!(s > 0.0)) throw std::invalid_argument("s must be positive");
  if (n < 0 || static_cast<int>(lambdas.size()) < n + 1) throw std::invalid_argument("need n + 1 eigenvalues");
  if (!(q_integral > 0.0)) throw HypothesisError("power bound needs int q > 0");
  BoundReport r;
  r.theorem = TheoremId::power1;
  r.n = n;
  r.s = s;
  CompensatedSum sum;
  std::vector<double> sensitivity;
  for (int k = 0; k <= n; ++k) {
    const double gap = lambdas[static_cast<std::size_t>(k)] - (2.0 * k + 1.0);
    if (!(gap > 0.0))
      throw HypothesisError("degenerate gap lambda_k - lambda_k^0 = " + std::to_string(gap) + " at k = " +
                            std::to_string(k));
    sum += std::pow(gap, -s);
    sensitivity.push_back(s * std::pow(gap, -s - 1.0) / (n + 1.0));
  }
  r.lhs = sum.value() / (n + 1.0);
  const double base = sequences::omega(n) * q_integral / ((n + 1.0) * kPi);
  r.rhs = std::pow(base, -s);
  r.diagnostics["base"] = base;
  std::vector<double> est = estimate;
  est.resize(sensitivity.size(), 0.0);
  finish_lower(r, verdict_tolerance(sensitivity, est));
  return r;
}

BoundReport check_power1(const PotentialSpec& q, int n, double s, const solver::EigenResult& eig) {
  if (!potentials::certified_nonnegative(q))
    throw HypothesisError("power bound needs q >= 0; " + q.to_string() + " is not certified non-negative");
  require_values(eig, n);
  BoundReport r = check_power1(potentials::integral(q), n, s, eig.eigenvalues, estimates_upto(eig, n));
  const BoundReport head = start(TheoremId::power1, n, q.to_string(), eig);
  r.inputs.potential = head.inputs.potential;
  r.inputs.basis_size = head.inputs.basis_size;
  r.inputs.convergence_estimate = head.inputs.convergence_estimate;
  r.warnings = head.warnings;
  return r;
}

BoundReport check_power1a(const PotentialSpec& q, int n, double s, const solver::EigenResult& eig) {
  if (!(s > 0.0)) throw std::invalid_argument("s must be positive");
  if (!potentials::certified_nonnegative(q))
    throw HypothesisError("power bound needs q >= 0; " + q.to_string() + " is not certified non-negative");
  require_values(eig, n);
  const double I = potentials::integral(q);
  const double limit = 32.0 * std::sqrt(kPi);
  if (!(I < limit - 1e-8)) throw HypothesisError("needs int q < 32 sqrt(pi); int q = " + std::to_string(I));
  BoundReport r = start(TheoremId::power1a, n, q.to_string(), eig);
  r.s = s;
  CompensatedSum lhs;
  CompensatedSum rhs;
  CompensatedSum partial_lambda;
  CompensatedSum partial_c;
  bool monotone = true;
  bool partial_ok = true;
  double previous_c = 0.0;
  std::vector<double> sensitivity;
  for (int k = 0; k <= n; ++k) {
    const double lambda = eig.eigenvalues[static_cast<std::size_t>(k)];
    const double c = 2.0 * k + 1.0 + (sequences::omega(k) - sequences::omega(k - 1)) * I / kPi;
    if (!(c > 0.0) || (k > 0 && c < previous_c)) monotone = false;
    previous_c = c;
    partial_lambda += lambda;
    partial_c += c;
    if (partial_lambda.value() > partial_c.value()) partial_ok = false;
    lhs += std::pow(lambda, -s);
    rhs += std::pow(c, -s);
    sensitivity.push_back(s * std::pow(lambda, -s - 1.0));
  }
  r.lhs = lhs.value();
  r.rhs = rhs.value();
  r.diagnostics["q_integral"] = I;
  r.diagnostics["comparison_monotone"] = monotone ? 1.0 : 0.0;
  r.diagnostics["partial_sums_ok"] = partial_ok ? 1.0 : 0.0;
  if (!monotone) r.warnings.push_back("comparison sequence is not non-decreasing (needs int q <= 8 sqrt(pi)/3)");
  finish_lower(r, verdict_tolerance(sensitivity, estimates_upto(eig, n)));
  return r;
}

BoundReport check_powerzeromean(const PotentialSpec& q, int n, double s, const solver::EigenResult& eig) {
  if (!(s > 0.0)) throw std::invalid_argument("s must be positive");
  require_values(eig, n);
  const double I = potentials::integral(q);
  if (!(std::abs(I) < 1e-10)) throw HypothesisError("needs int q = 0; int q = " + std::to_string(I));
  const double qm = potentials::q_m(q);
  BoundReport r = start(TheoremId::powerzeromean, n, q.to_string(), eig);
  r.s = s;
  CompensatedSum lhs;
  CompensatedSum base_sum;
  CompensatedSum correction;
  std::vector<double> sensitivity;
  for (int k = 0; k <= n; ++k) {
    const double lambda = eig.eigenvalues[static_cast<std::size_t>(k)];
    if (!(lambda > 0.0))
      throw HypothesisError("non-positive eigenvalue " + std::to_string(lambda) + " at k = " + std::to_string(k));
    const double l0 = 2.0 * k + 1.0;
    lhs += std::pow(lambda, -s);
    base_sum += std::pow(l0, -s);
    correction += std::pow(l0, -s - 1.0) * (sequences::epsilon(k) - sequences::epsilon(k - 1));
    sensitivity.push_back(s * std::pow(lambda, -s - 1.0));
  }
  r.lhs = lhs.value();
  r.rhs = base_sum.value() - s * qm * correction.value();
  r.diagnostics["q_m"] = qm;
  r.diagnostics["rhs_as_printed"] = (s + 1.0) * base_sum.value() - s * qm * correction.value();
  finish_lower(r, verdict_tolerance(sensitivity, estimates_upto(eig, n)));
  return r;
}

TransformResult power_transform(const std::vector<double>& a, const std::vector<double>& b,
                                const std::vector<double>& c, int n, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("s must be positive");
  const auto count = static_cast<std::size_t>(n + 1);
  if (n < 0 || a.size() < count || b.size() < count || c.size() < count)
    throw std::invalid_argument("sequences shorter than n + 1");
  CompensatedSum sa;
  CompensatedSum sc;
  double scale = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const std::string at = " at index " + std::to_string(k);
    if (!(a[k] > 0.0)) throw HypothesisError("a is not positive" + at);
    if (!(b[k] > 0.0)) throw HypothesisError("b is not positive" + at);
    if (k > 0 && b[k] < b[k - 1]) throw HypothesisError("b decreases" + at);
    sa += a[k];
    sc += c[k];
    scale += std::abs(a[k]) + std::abs(c[k]);
    if (sa.value() > sc.value() + 4.0 * std::numeric_limits<double>::epsilon() * scale)
      throw HypothesisError("partial sum of a exceeds that of c" + at);
  }
  TransformResult t;
  CompensatedSum lhs;
  CompensatedSum bound;
  CompensatedSum maximized;
  for (std::size_t k = 0; k < count; ++k) {
    lhs += std::pow(a[k], -s);
    bound += (s + 1.0) * std::pow(b[k], -s) - s * std::pow(b[k], -s - 1.0) * c[k];
    maximized += (s + 1.0) * std::pow(c[k], -s) - s * std::pow(c[k], -s - 1.0) * c[k];
  }
  t.lhs = lhs.value();
  t.bound = bound.value();
  t.slack = t.lhs - t.bound;
  t.maximized = maximized.value();
  return t;
}

double odd_shift_constant(int n) {
  if (n < 0) throw std::invalid_argument("n must be non-negative");
  return (n + 1.0) * (n + 2.0);
}

double counterexample_height(int n, double N) {
  if (!(N > 0.0)) throw std::invalid_argument("N must be positive");
  CompensatedSum S;
  for (int k = 0; k <= n; ++k) S += 1.0 / (kPi * std::sqrt(2.0 * k + 1.0));
  return 2.0 * (odd_shift_constant(n) + 1.0 + N) / S.value();
}

Counterexample counterexample(int n, double N) {
  Counterexample out;
  out.C_n = odd_shift_constant(n);
  out.K = counterexample_height(n, N);
  solver::SolverOptions options;
  options.tol = 1e-6;
  options.max_basis = 4096;
  double delta = 0.5;
  for (int j = 1; j <= 20; ++j, delta *= 0.5) {
    const PotentialSpec q = potentials::make_box(out.K, delta);
    const solver::EigenResult eig = solver::solve(q, n + 1, options);
    const double reg = regularized_sum(eig.eigenvalues, out.K, n);
    CounterexampleAttempt attempt;
    attempt.delta = delta;
    attempt.regularized = reg;
    attempt.basis_size = eig.basis_size;
    attempt.largest_estimate = *std::max_element(eig.convergence_estimate.begin(), eig.convergence_estimate.end());
    out.attempts.push_back(attempt);
    out.potential = q;
    out.report = start(TheoremId::prop34, n, q.to_string(), eig);
    out.report.lhs = reg;
    out.report.rhs = -N;
    out.report.diagnostics["K"] = out.K;
    out.report.diagnostics["delta"] = delta;
    out.report.diagnostics["C_n"] = out.C_n;
    finish_upper(out.report, 0.0);
    if (out.report.verdict) {
      out.found = true;
      return out;
    }
  }
  out.report.warnings.push_back("delta floor 2^-20 reached without reaching -N");
  return out;
}

}  // namespace hosc::bounds
