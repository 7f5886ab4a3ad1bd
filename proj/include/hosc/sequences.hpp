#pragma once

#include <cstdint>
#include <vector>

namespace hosc::sequences {

/// lambda_k^0 = 2k + 1.
inline double unperturbed_eigenvalue(std::int64_t k) noexcept { return 2.0 * static_cast<double>(k) + 1.0; }

/// omega_{-1} = 0;
/// odd n:  ((2n+3)/(n+1)) Gamma(n/2 + 1) / Gamma((n+1)/2)
/// even n: (n+1) Gamma((n+1)/2) / Gamma(n/2 + 1)
double omega(std::int64_t n);

/// chi_n = omega_n - sum_{k<=n} (2k+1)^{-1/2}.
double chi(std::int64_t n);

/// epsilon_{-1} = 0, epsilon_n = omega_n - sqrt(2) Gamma(n + 3/2) / Gamma(n + 1).
double epsilon(std::int64_t n);

/// tau_n = omega_{n+1} - omega_n.
double tau(std::int64_t n);

/// C_n = (n+1) Gamma((n+1)/2) / Gamma(n/2 + 1) for even n (equal to omega_n).
double c_even(std::int64_t n);

struct SequenceTable {
  std::vector<std::int64_t> n_values;  ///< 0 .. n_max; omega_{-1} = epsilon_{-1} = 0 by convention
  std::vector<double> omega;
  std::vector<double> chi;
  std::vector<double> epsilon;
  std::vector<double> tau;
  std::vector<double> chi_residual;  ///< chi_n + Z0(1/2)
  std::vector<double> unperturbed_eigs;
  double minus_z0_half = 0.0;        ///< -Z0(1/2), the limit of chi_n
  double max_increment_deviation = 0.0;  ///< incremental vs direct omega, relative
};

/// Builds the table for n = 0..n_max. Odd-index omegas come from the closed-form
/// increment omega_{n+1} = omega_n (1 + 1/(2(n+2))) at even n and are checked
/// against the direct formula; std::runtime_error if they differ by more than
/// 1e-12 relative.
SequenceTable build_table(std::int64_t n_max);

struct SecondDifferenceCheck {
  double minimum = 0.0;        ///< min_k (omega_{k+2} - 2 omega_{k+1} + omega_k)
  std::int64_t argmin = 0;
  double expected = 0.0;       ///< -sqrt(pi)/16
  double even_residual = 0.0;  ///< max |second difference| over even k, zero in exact arithmetic
  bool passed = false;
};

/// Second differences of omega over k = 0..k_max.
SecondDifferenceCheck second_difference_bound_check(std::int64_t k_max = 1000);

}  // namespace hosc::sequences
