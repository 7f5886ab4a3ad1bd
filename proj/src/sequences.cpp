#include "hosc/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "hosc/special.hpp"

namespace hosc::sequences {

namespace {

void require_index(std::int64_t n, std::int64_t lowest, const char* what) {
  if (n < lowest) {
    throw std::domain_error(std::string(what) + ": index " + std::to_string(n) + " out of range");
  }
}

double omega_direct(std::int64_t n) {
  const double nd = static_cast<double>(n);
  const double ratio = std::exp(special::log_gamma_ratio(0.5 * (nd + 1.0), 0.5));  // Gamma(n/2+1)/Gamma((n+1)/2)
  if (n % 2 != 0) return (2.0 * nd + 3.0) / (nd + 1.0) * ratio;
  return (nd + 1.0) / ratio;
}

}  // namespace

double omega(std::int64_t n) {
  require_index(n, -1, "omega");
  if (n == -1) return 0.0;
  return omega_direct(n);
}

double c_even(std::int64_t n) {
  require_index(n, 0, "c_even");
  if (n % 2 != 0) throw std::domain_error("c_even: n must be even");
  return omega_direct(n);
}

double chi(std::int64_t n) {
  require_index(n, 0, "chi");
  special::CompensatedSum acc;
  acc += omega_direct(n);
  for (std::int64_t k = 0; k <= n; ++k) acc += -1.0 / std::sqrt(unperturbed_eigenvalue(k));
  return acc.value();
}

double epsilon(std::int64_t n) {
  require_index(n, -1, "epsilon");
  if (n == -1) return 0.0;
  const double nd = static_cast<double>(n);
  return omega_direct(n) - std::numbers::sqrt2 * std::exp(special::log_gamma_ratio(nd + 1.0, 0.5));
}

double tau(std::int64_t n) {
  require_index(n, 0, "tau");
  return omega_direct(n + 1) - omega_direct(n);
}

SequenceTable build_table(std::int64_t n_max) {
  require_index(n_max, 0, "build_table");
  const auto rows = static_cast<std::size_t>(n_max + 1);
  // omega_0 .. omega_{n_max+1}; tau_n needs one extra term.
  std::vector<double> om(rows + 1);
  double worst = 0.0;
  for (std::size_t i = 0; i < om.size(); ++i) {
    const auto n = static_cast<std::int64_t>(i);
    if (n % 2 == 0) {
      om[i] = omega_direct(n);
    } else {
      om[i] = om[i - 1] * (1.0 + 1.0 / (2.0 * (static_cast<double>(n) + 1.0)));
      const double direct = omega_direct(n);
      worst = std::max(worst, std::abs(om[i] - direct) / direct);
    }
  }
  if (worst > 1e-12) {
    throw std::runtime_error("build_table: incremental omega deviates from the direct formula by " +
                             std::to_string(worst));
  }

  SequenceTable t;
  t.minus_z0_half = -special::z0(0.5);
  t.max_increment_deviation = worst;
  t.n_values.reserve(rows);
  special::CompensatedSum inverse_roots;
  for (std::size_t i = 0; i < rows; ++i) {
    const auto n = static_cast<std::int64_t>(i);
    const double lam = unperturbed_eigenvalue(n);
    inverse_roots += 1.0 / std::sqrt(lam);
    const double c = om[i] - inverse_roots.value();
    t.n_values.push_back(n);
    t.omega.push_back(om[i]);
    t.chi.push_back(c);
    t.epsilon.push_back(epsilon(n));
    t.tau.push_back(om[i + 1] - om[i]);
    t.chi_residual.push_back(c - t.minus_z0_half);
    t.unperturbed_eigs.push_back(lam);
  }
  return t;
}

SecondDifferenceCheck second_difference_bound_check(std::int64_t k_max) {
  require_index(k_max, 1, "second_difference_bound_check");
  SecondDifferenceCheck out;
  out.expected = -std::sqrt(std::numbers::pi) / 16.0;
  out.minimum = std::numeric_limits<double>::infinity();
  bool above = true;
  for (std::int64_t k = 0; k <= k_max; ++k) {
    const double d = tau(k + 1) - tau(k);
    if (d < out.minimum) {
      out.minimum = d;
      out.argmin = k;
    }
    if (d < out.expected - 1e-12) above = false;
    if (k % 2 == 0) out.even_residual = std::max(out.even_residual, std::abs(d));
  }
  out.passed = above && std::abs(out.minimum - out.expected) <= 1e-12 && out.even_residual <= 1e-12;
  return out;
}

}  // namespace hosc::sequences
