#include "hosc/special.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hosc::special {

CompensatedSum& CompensatedSum::operator+=(double term) noexcept {
  const double t = sum_ + term;
  if (std::abs(sum_) >= std::abs(term)) {
    compensation_ += (sum_ - t) + term;
  } else {
    compensation_ += (term - t) + sum_;
  }
  sum_ = t;
  return *this;
}

namespace {

// Stirling series coefficients B_{2k} / (2k (2k-1)), k = 1..8
// (Abramowitz & Stegun 6.1.40). With the argument shifted to z >= 15 the
// first omitted term is below 1e-21 relative.
constexpr std::array<double, 8> kStirling = {
    1.0 / 12.0,        -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0,
    1.0 / 1188.0,      -691.0 / 360360.0, 1.0 / 156.0,
    -3617.0 / 122400.0};

constexpr double kShiftThreshold = 15.0;

double stirling_correction(double z) {
  const double inv = 1.0 / z;
  const double inv2 = inv * inv;
  double acc = 0.0;
  for (auto it = kStirling.rbegin(); it != kStirling.rend(); ++it) {
    acc = acc * inv2 + *it;
  }
  return acc * inv;
}

void require_positive(double z, const char* what) {
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw std::domain_error(std::string(what) + ": argument must be finite and > 0, got " +
                            std::to_string(z));
  }
}

}  // namespace

double log_gamma(double z) {
  require_positive(z, "log_gamma");
  if (z == 1.0 || z == 2.0) return 0.0;

  double shift_log = 0.0;
  if (z < kShiftThreshold) {
    // Gamma(z) = Gamma(z + k) / (z (z+1) ... (z+k-1))
    double product = 1.0;
    while (z < kShiftThreshold) {
      product *= z;
      z += 1.0;
    }
    shift_log = std::log(product);
  }
  constexpr double half_log_two_pi = 0.91893853320467274178032973640562;
  return (z - 0.5) * std::log(z) - z + half_log_two_pi + stirling_correction(z) - shift_log;
}

double log_gamma_ratio(double z, double a) {
  require_positive(z, "log_gamma_ratio");
  require_positive(z + a, "log_gamma_ratio");
  if (a == 0.0) return 0.0;

  CompensatedSum acc;
  // ln Gamma(z+a) - ln Gamma(z) = [same at z+1] - ln((z+a)/z)
  while (z < kShiftThreshold || z + a < kShiftThreshold) {
    acc += -std::log1p(a / z);
    z += 1.0;
  }
  const double rel = std::log1p(a / z);
  acc += (z - 0.5) * rel;
  acc += a * std::log(z + a);
  acc += -a;
  // Stirling tail difference: c_k [(z+a)^(1-2k) - z^(1-2k)]
  const double inv = 1.0 / z;
  const double inv2 = inv * inv;
  double power = inv;
  double tail = 0.0;
  for (std::size_t k = 0; k < kStirling.size(); ++k) {
    const double exponent = 1.0 - 2.0 * static_cast<double>(k + 1);
    tail += kStirling[k] * power * std::expm1(exponent * rel);
    power *= inv2;
  }
  acc += tail;
  return acc.value();
}

double gamma_half_ratio(double z) {
  require_positive(z, "gamma_half_ratio");
  return std::exp(log_gamma_ratio(z, 0.5));
}

double log_factorial(std::int64_t k) {
  if (k < 0) throw std::domain_error("log_factorial: negative argument");
  if (k < 2) return 0.0;
  return log_gamma(static_cast<double>(k) + 1.0);
}

namespace {

std::int64_t adaptive_cutoff(double s, std::int64_t n, double target) {
  // s M^(-s-1) / 8 <= target / 2
  const double m = std::pow(s / (4.0 * target), 1.0 / (s + 1.0));
  constexpr double kMaxCutoff = 2e8;
  if (!(m < kMaxCutoff)) {
    throw std::domain_error("zeta: requested accuracy needs more than 2e8 unit intervals");
  }
  return std::max<std::int64_t>(n + 1, static_cast<std::int64_t>(std::ceil(m)));
}

}  // namespace

ZetaValue zeta(double s, const ZetaOptions& options) {
  if (!(s > 0.0) || s == 1.0 || !std::isfinite(s)) {
    throw std::domain_error("zeta: need s > 0 and s != 1");
  }
  const std::int64_t n = options.truncation > 0 ? options.truncation : 10;
  const std::int64_t cutoff =
      options.cutoff > 0 ? std::max(options.cutoff, n) : adaptive_cutoff(s, n, options.target_error);

  CompensatedSum direct;
  double magnitude = 0.0;
  for (std::int64_t k = 1; k <= n; ++k) {
    const double term = std::pow(static_cast<double>(k), -s);
    direct += term;
    magnitude += term;
  }

  // s * int_m^{m+1} (m - x + 1/2) x^(-s-1) dx
  //   = (m + 1/2) (m^-s - (m+1)^-s) - s ((m+1)^(1-s) - m^(1-s)) / (1 - s)
  CompensatedSum remainder;
  double piece_magnitude = 0.0;
  for (std::int64_t m = n; m < cutoff; ++m) {
    const double md = static_cast<double>(m);
    const double step = std::log1p(1.0 / md);
    const double m_pow = std::pow(md, -s);
    const double first = -(md + 0.5) * m_pow * std::expm1(-s * step);
    const double second = s * md * m_pow * std::expm1((1.0 - s) * step) / (1.0 - s);
    remainder += first - second;
    piece_magnitude += std::abs(first);
  }

  const double nd = static_cast<double>(n);
  CompensatedSum total;
  total += direct.value();
  total += remainder.value();
  total += std::pow(nd, 1.0 - s) / (s - 1.0);
  total += -0.5 * std::pow(nd, -s);

  const double tail_bound = s * std::pow(static_cast<double>(cutoff), -s - 1.0) / 8.0;
  const double eps = std::numeric_limits<double>::epsilon();
  const double rounding = 4.0 * eps * (magnitude + piece_magnitude + std::abs(total.value()));

  ZetaValue out;
  out.s = s;
  out.value = total.value();
  out.abs_error_bound = tail_bound + rounding;
  out.truncation = n;
  out.cutoff = cutoff;
  return out;
}

ZetaValue z0_value(double s, const ZetaOptions& options) {
  ZetaValue z = zeta(s, options);
  const double factor = -std::expm1(-s * std::numbers::ln2);
  z.value *= factor;
  z.abs_error_bound *= factor;
  return z;
}

double z0(double s) { return z0_value(s).value; }

double a_n(std::int64_t n) {
  if (n < 1) throw std::domain_error("a_n: need n >= 1");
  CompensatedSum acc;
  acc += 2.0 * std::sqrt(static_cast<double>(n));
  for (std::int64_t k = 1; k <= n; ++k) {
    acc += -1.0 / std::sqrt(static_cast<double>(k));
  }
  return acc.value();
}

}  // namespace hosc::special
