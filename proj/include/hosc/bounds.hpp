#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hosc/potentials.hpp"
#include "hosc/solver.hpp"

namespace hosc::bounds {

enum class TheoremId { thm31, thm41, thm51, cor53, power1, power1a, powerzeromean, prop34 };

std::string theorem_name(TheoremId id);

/// A check whose hypotheses do not hold for the given input.
class HypothesisError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct InputsDigest {
  std::string potential;
  int basis_size = 0;
  double convergence_estimate = 0.0;  ///< solver estimates summed over k <= n
  double verdict_tol = 0.0;
};

/// lhs and rhs are the two sides as written in the inequality. slack is
/// oriented so that slack >= 0 means it holds: rhs - lhs for the upper bounds
/// (thm31, thm41, thm51, cor53, prop34), lhs - rhs for the power bounds.
struct BoundReport {
  TheoremId theorem = TheoremId::thm31;
  int n = 0;
  double s = 0.0;  ///< exponent for power bounds, 0 otherwise
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  InputsDigest inputs;
  bool verdict = false;
  std::map<std::string, double> diagnostics;
  std::vector<std::string> warnings;
};

/// sum_{k<=n} [lambda_k - (2k+1) - q_integral / (pi sqrt(2k+1))]
double regularized_sum(const std::vector<double>& lambdas, double q_integral, int n);

/// max(1e-8, 2 sum_k sensitivity_k * estimate_k)
double verdict_tolerance(const std::vector<double>& sensitivity, const std::vector<double>& estimate);

/// Eigenvalues used by the checks: solver output for x^2 + shift + q with at
/// least n_max + 1 values.
solver::EigenResult solve_for(const potentials::PotentialSpec& q, int n_max, const solver::SolverOptions& options = {});

/// thm31: sum bound for q certified non-negative. Diagnostics: "intermediate",
/// the regularized sum of Rayleigh quotients sum_k <psi_k, H psi_k>, which
/// lies between lhs and rhs.
BoundReport check_thm31(const potentials::PotentialSpec& q, int n, const solver::EigenResult& eig);
/// thm41: the same bound for any q; rhs adds epsilon_n q_m / sqrt(pi). Propagates UnboundedError.
BoundReport check_thm41(const potentials::PotentialSpec& q, int n, const solver::EigenResult& eig);

/// thm51: coefficient bound for V = x^2 + constant + q (eig solved with shift = constant).
/// rhs = sum_k 2^k (2k)!/k! C(n+1, k+1) v_{2k} + (n+1)^2 / 2.
BoundReport check_thm51(const potentials::FullPotential& v, int n, const solver::EigenResult& eig);
/// cor53: coefficient form of thm31. Diagnostics: "thm31_rhs" (for q >= 0) and
/// "chain_ok" = 1 when rhs <= thm31_rhs + 1e-8.
BoundReport check_cor53(const potentials::PotentialSpec& q, int n, const solver::EigenResult& eig);

/// (n+1)^{-1} sum (lambda_k - lambda_k^0)^{-s} >= [omega_n int q / ((n+1) pi)]^{-s}
BoundReport check_power1(const potentials::PotentialSpec& q, int n, double s, const solver::EigenResult& eig);
/// Same check on explicit eigenvalues (used for synthetic inputs).
BoundReport check_power1(double q_integral, int n, double s, const std::vector<double>& lambdas,
                         const std::vector<double>& estimate = {});

/// sum lambda_k^{-s} >= sum c_k^{-s}, c_k = lambda_k^0 + (omega_k - omega_{k-1}) int q / pi.
/// Diagnostics: "comparison_monotone" (c positive and non-decreasing up to n),
/// "partial_sums_ok" (sum_{k<=m} lambda_k <= sum_{k<=m} c_k for m <= n).
BoundReport check_power1a(const potentials::PotentialSpec& q, int n, double s, const solver::EigenResult& eig);

/// Zero-mean power bound, in the form the comparison lemma yields with
/// a = lambda, b = lambda^0, c = lambda^0 + (eps_k - eps_{k-1}) q_m:
///   sum lambda_k^{-s} >= sum (lambda_k^0)^{-s} - s q_m sum (lambda_k^0)^{-s-1} (eps_k - eps_{k-1}).
/// Diagnostics: "rhs_as_printed" with leading factor (s + 1).
BoundReport check_powerzeromean(const potentials::PotentialSpec& q, int n, double s, const solver::EigenResult& eig);

struct TransformResult {
  double lhs = 0.0;        ///< sum a_k^{-s}
  double bound = 0.0;      ///< sum (s+1) b_k^{-s} - s b_k^{-s-1} c_k
  double slack = 0.0;      ///< lhs - bound
  double maximized = 0.0;  ///< bound at b = c, i.e. sum c_k^{-s}
};

/// Comparison lemma for negative powers. Throws HypothesisError naming the
/// offending index when a or b is not positive, b decreases, or a partial sum
/// of a exceeds that of c.
TransformResult power_transform(const std::vector<double>& a, const std::vector<double>& b,
                                const std::vector<double>& c, int n, double s);

struct CounterexampleAttempt {
  double delta = 0.0;
  double regularized = 0.0;
  int basis_size = 0;
  double largest_estimate = 0.0;
};

struct Counterexample {
  potentials::PotentialSpec potential;
  BoundReport report;  ///< theorem prop34: lhs = regularized sum, rhs = -N
  double K = 0.0;
  double C_n = 0.0;
  std::vector<CounterexampleAttempt> attempts;
  bool found = false;
};

/// (n+1)(n+2) = sum_{k<=n} (lambda_{2k+1}^0 - lambda_k^0)
double odd_shift_constant(int n);
/// Twice the smallest K with C_n + 1 - K sum_k (pi sqrt(lambda_k^0))^{-1} < -N.
double counterexample_height(int n, double N);

/// box(K, delta) for delta = 1/2, 1/4, ... down to 2^-20, stopping at the
/// first delta whose Ritz regularized sum is <= -N. Ritz values bound the
/// eigenvalues from above, so the certificate is one-sided in the right
/// direction.
Counterexample counterexample(int n, double N);

}  // namespace hosc::bounds
