#pragma once

#include <cstdint>

namespace hosc::special {

/// Neumaier-compensated accumulator. Every series in the library that can
/// cancel goes through this.
class CompensatedSum {
 public:
  CompensatedSum& operator+=(double term) noexcept;
  [[nodiscard]] double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// ln Gamma(z) for z > 0. Throws std::domain_error otherwise.
double log_gamma(double z);

/// ln Gamma(z + a) - ln Gamma(z) for z > 0, z + a > 0, evaluated without
/// subtracting two large logarithms.
double log_gamma_ratio(double z, double a);

/// Gamma(z + 1/2) / Gamma(z); tends to sqrt(z) for large z.
double gamma_half_ratio(double z);

/// ln k! via log_gamma.
double log_factorial(std::int64_t k);

struct ZetaValue {
  double s = 0.0;
  double value = 0.0;
  double abs_error_bound = 0.0;
  std::int64_t truncation = 0;  ///< n: terms summed directly
  std::int64_t cutoff = 0;      ///< M: last unit interval integrated exactly
};

struct ZetaOptions {
  std::int64_t truncation = 10;  ///< 0 picks the default
  std::int64_t cutoff = 0;       ///< 0 picks M adaptively from target_error
  double target_error = 1e-9;
};

/// Riemann zeta for real s > 0, s != 1, from the sawtooth-remainder
/// representation
///
///   zeta(s) = sum_{k<=n} k^-s + s int_n^inf (floor(x) - x + 1/2) x^(-s-1) dx
///             + n^(1-s)/(s-1) - 1/(2 n^s).
///
/// The remainder is integrated in closed form on each unit interval
/// [m, m+1), n <= m < M. Past M the periodic antiderivative of the sawtooth
/// (which lies in [0, 1/8] and vanishes at integers) gives
/// 0 <= s * tail <= s M^(-s-1) / 8, which is what abs_error_bound reports
/// together with an accumulated rounding allowance.
ZetaValue zeta(double s, const ZetaOptions& options = {});

/// Spectral zeta of the harmonic oscillator, (1 - 2^-s) zeta(s), which equals
/// sum_k (2k+1)^-s for s > 1.
double z0(double s);
ZetaValue z0_value(double s, const ZetaOptions& options = {});

/// a_n = 2 sqrt(n) - sum_{k=1}^n k^-1/2, n >= 1. -a_n decreases to zeta(1/2).
double a_n(std::int64_t n);

}  // namespace hosc::special
