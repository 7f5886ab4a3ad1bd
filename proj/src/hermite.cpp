#include "hosc/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "hosc/linalg.hpp"
#include "hosc/special.hpp"

namespace hosc::hermite {

namespace {

constexpr double kQuarterLogPi = 0.28618247146235004;  // ln(pi) / 4
constexpr double kRescale = 1e150;
const double kLogRescale = std::log(kRescale);

// Runs the orthonormal three-term recurrence
//   f_{k+1} = x sqrt(2/(k+1)) f_k - sqrt(k/(k+1)) f_{k-1}
// on mantissas with a shared log-scale. The visitor receives
// (k, mantissa_k, log_scale) with f_k = mantissa_k * exp(log_scale).
template <typename Visitor>
void scaled_recurrence(int count, double x, double log_scale, Visitor&& visit) {
  if (count <= 0) return;
  double prev = 0.0;
  double cur = 1.0;
  visit(0, cur, log_scale);
  for (int k = 0; k + 1 < count; ++k) {
    const double kd = static_cast<double>(k);
    const double next = x * std::sqrt(2.0 / (kd + 1.0)) * cur - std::sqrt(kd / (kd + 1.0)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescale) {
      cur /= kRescale;
      prev /= kRescale;
      log_scale += kLogRescale;
    }
    visit(k + 1, cur, log_scale);
  }
}

double rescaled(double mantissa, double log_scale) {
  if (mantissa == 0.0) return 0.0;
  return std::copysign(std::exp(log_scale + std::log(std::abs(mantissa))), mantissa);
}

// ln sum_{k<count} f_k^2 for the recurrence started at log_scale.
double log_sum_squares(int count, double x, double log_scale) {
  double acc = 0.0;
  double acc_scale = log_scale;
  scaled_recurrence(count, x, log_scale, [&](int, double m, double scale) {
    if (scale != acc_scale) {
      acc *= std::exp(2.0 * (acc_scale - scale));
      acc_scale = scale;
    }
    acc += m * m;
  });
  if (acc == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(acc) + 2.0 * acc_scale;
}

void fill_scaled(double x, double log_scale, std::span<double> out) {
  double factor = std::exp(log_scale);
  double factor_scale = log_scale;
  scaled_recurrence(static_cast<int>(out.size()), x, log_scale, [&](int k, double m, double scale) {
    if (scale != factor_scale) {
      factor = std::exp(scale);
      factor_scale = scale;
    }
    const bool direct = scale > -600.0 && scale < 600.0;
    out[static_cast<std::size_t>(k)] = direct ? m * factor : rescaled(m, scale);
  });
}

}  // namespace

double hermite_physicists(int n, double x) {
  if (n < 0) throw std::domain_error("hermite_physicists: negative degree");
  if (n > kMaxRawDegree) {
    throw std::domain_error("hermite_physicists: degree " + std::to_string(n) +
                            " exceeds the raw-evaluation cap of 150");
  }
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * x * cur - 2.0 * static_cast<double>(k) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double hermite_normalized(int n, double x) {
  if (n < 0) throw std::domain_error("hermite_normalized: negative degree");
  double result = 0.0;
  scaled_recurrence(n + 1, x, -0.5 * x * x - kQuarterLogPi, [&](int k, double m, double scale) {
    if (k == n) result = rescaled(m, scale);
  });
  return result;
}

void hermite_normalized_all(double x, std::span<double> out) {
  fill_scaled(x, -0.5 * x * x - kQuarterLogPi, out);
}

void hermite_orthonormal_all(double x, std::span<double> out) { fill_scaled(x, -kQuarterLogPi, out); }

HermiteEval evaluate(int n, double x) {
  HermiteEval e;
  e.degree = n;
  e.x = x;
  e.physicists_value =
      n <= kMaxRawDegree ? hermite_physicists(n, x) : std::numeric_limits<double>::quiet_NaN();
  e.normalized_value = hermite_normalized(n, x);
  return e;
}

double turan_sum(int n, double x) {
  if (n < 0) throw std::domain_error("turan_sum: negative degree");
  return std::exp(0.5 * std::log(std::numbers::pi) + log_sum_squares(n + 1, x, -kQuarterLogPi));
}

double turan_closed_form(int n, double x) {
  if (n < 0) throw std::domain_error("turan_closed_form: negative degree");
  const double h0 = hermite_physicists(n, x);
  const double h1 = hermite_physicists(n + 1, x);
  const double h2 = hermite_physicists(n + 2, x);
  const double log_norm = static_cast<double>(n + 1) * std::numbers::ln2 + special::log_factorial(n);
  return (h1 * h1 - h0 * h2) * std::exp(-log_norm);
}

double log_h_n(int n, double x) {
  if (n < 0) throw std::domain_error("h_n: negative degree");
  return 0.5 * std::log(std::numbers::pi) + static_cast<double>(n + 1) * std::numbers::ln2 +
         special::log_factorial(n) + log_sum_squares(n + 1, x, -0.5 * x * x - kQuarterLogPi);
}

double h_n(int n, double x) {
  const double value = std::exp(log_h_n(n, x));
  if (!std::isfinite(value)) {
    throw std::overflow_error("h_n: value for n = " + std::to_string(n) +
                              " is not representable; use log_h_n");
  }
  return value;
}

double h_n_raw(int n, double x) {
  const double h0 = hermite_physicists(n, x);
  const double h1 = hermite_physicists(n + 1, x);
  const double h2 = hermite_physicists(n + 2, x);
  return std::exp(-x * x) * (h1 * h1 - h0 * h2);
}

double log_h_n_bound(int n) {
  if (n < 0) throw std::domain_error("h_n_bound: negative degree");
  const double nd = static_cast<double>(n);
  const double base = (nd + 1.0) * std::log(4.0) - std::log(2.0 * std::numbers::pi);
  if (n % 2 == 1) {
    return base + std::log((2.0 * nd + 3.0) / (nd + 1.0)) + 2.0 * special::log_gamma(nd / 2.0 + 1.0);
  }
  return base + std::log(nd + 1.0) + 2.0 * special::log_gamma((nd + 1.0) / 2.0);
}

double h_n_bound(int n) { return std::exp(log_h_n_bound(n)); }

double hermite_moment_double(int n, int m) {
  if (n < 0 || m < 0) throw std::domain_error("hermite_moment_double: negative degree");
  if (n != m) return 0.0;
  return std::exp(0.5 * std::log(std::numbers::pi) + n * std::numbers::ln2 + special::log_factorial(n));
}

double hermite_moment_triple(int a, int b, int c) {
  if (a < 0 || b < 0 || c < 0) throw std::domain_error("hermite_moment_triple: negative degree");
  const int total = a + b + c;
  if (total % 2 != 0) return 0.0;
  const int s = total / 2;
  if (s < std::max({a, b, c})) return 0.0;
  using special::log_factorial;
  const double log_value = 0.5 * std::log(std::numbers::pi) + s * std::numbers::ln2 +
                           log_factorial(a) + log_factorial(b) + log_factorial(c) -
                           log_factorial(s - a) - log_factorial(s - b) - log_factorial(s - c);
  return std::exp(log_value);
}

double gaussian_squared_moment(int k) {
  if (k < 0) throw std::domain_error("gaussian_squared_moment: negative degree");
  const double kd = static_cast<double>(k);
  return std::exp((kd - 0.5) * std::numbers::ln2 + special::log_gamma(kd + 0.5));
}

QuadratureRule gauss_hermite_rule(int m) {
  if (m < 1 || m > 10000) {
    throw std::domain_error("gauss_hermite_rule: node count must lie in [1, 10000]");
  }
  std::vector<double> diag(static_cast<std::size_t>(m), 0.0);
  std::vector<double> off(static_cast<std::size_t>(m - 1));
  for (int k = 1; k < m; ++k) off[static_cast<std::size_t>(k - 1)] = std::sqrt(k / 2.0);
  std::vector<double> nodes = linalg::tridiagonal_eigenvalues(diag, off);

  const double md = static_cast<double>(m);
  for (double& x : nodes) {
    // p_m' = sqrt(2m) p_{m-1}; the shared scale cancels in the ratio.
    double pm = 0.0;
    double pm1 = 0.0;
    double scale_m = 0.0;
    double scale_m1 = 0.0;
    scaled_recurrence(m + 1, x, 0.0, [&](int k, double v, double scale) {
      if (k == m - 1) {
        pm1 = v;
        scale_m1 = scale;
      }
      if (k == m) {
        pm = v;
        scale_m = scale;
      }
    });
    if (pm1 != 0.0) {
      const double step = pm / (std::sqrt(2.0 * md) * pm1) * std::exp(scale_m - scale_m1);
      if (std::abs(step) < 1e-6 * std::max(1.0, std::abs(x))) x -= step;
    }
  }
  // Enforce exact symmetry of the node set.
  const std::size_t count = nodes.size();
  for (std::size_t i = 0; i < count / 2; ++i) {
    const double v = 0.5 * (nodes[count - 1 - i] - nodes[i]);
    nodes[i] = -v;
    nodes[count - 1 - i] = v;
  }
  if (count % 2 == 1) nodes[count / 2] = 0.0;

  QuadratureRule rule;
  rule.kind = QuadratureKind::gauss_hermite;
  rule.nodes = nodes;
  rule.weights.resize(count);
  rule.plain_weights.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = nodes[i];
    const double log_sum = log_sum_squares(m, x, -kQuarterLogPi);
    rule.weights[i] = std::exp(-log_sum);
    rule.plain_weights[i] = std::exp(x * x - log_sum);
  }
  return rule;
}

QuadratureRule gauss_legendre_rule(int order, double a, double b) {
  if (order < 1) throw std::domain_error("gauss_legendre_rule: order must be >= 1");
  if (!(b > a)) throw std::domain_error("gauss_legendre_rule: need a < b");
  const auto beta = [](int k) {
    const double kd = static_cast<double>(k);
    return kd / std::sqrt(4.0 * kd * kd - 1.0);
  };
  const std::size_t n = static_cast<std::size_t>(order);
  std::vector<double> diag(n, 0.0);
  std::vector<double> off(n - 1);
  for (int k = 1; k < order; ++k) off[static_cast<std::size_t>(k - 1)] = beta(k);
  std::vector<double> t = linalg::tridiagonal_eigenvalues(diag, off);

  // Orthonormal Legendre recurrence: beta_{k+1} p_{k+1} = x p_k - beta_k p_{k-1}.
  const auto evaluate_all = [&](double x, double& sum_sq, double& pn, double& dpn) {
    double prev = 0.0;
    double cur = std::numbers::sqrt2 / 2.0;
    double dprev = 0.0;
    double dcur = 0.0;
    sum_sq = cur * cur;
    for (int k = 0; k < order; ++k) {
      const double bk = k > 0 ? beta(k) : 0.0;
      const double next = (x * cur - bk * prev) / beta(k + 1);
      const double dnext = (cur + x * dcur - bk * dprev) / beta(k + 1);
      prev = cur;
      cur = next;
      dprev = dcur;
      dcur = dnext;
      if (k + 1 < order) sum_sq += cur * cur;
    }
    pn = cur;
    dpn = dcur;
  };

  for (double& x : t) {
    double sum_sq = 0.0;
    double pn = 0.0;
    double dpn = 0.0;
    evaluate_all(x, sum_sq, pn, dpn);
    if (dpn != 0.0) x -= pn / dpn;
  }
  for (std::size_t i = 0; i < n / 2; ++i) {
    const double v = 0.5 * (t[n - 1 - i] - t[i]);
    t[i] = -v;
    t[n - 1 - i] = v;
  }
  if (n % 2 == 1) t[n / 2] = 0.0;

  QuadratureRule rule;
  rule.kind = QuadratureKind::composite_gauss_legendre;
  rule.lower = a;
  rule.upper = b;
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (double x : t) {
    double sum_sq = 0.0;
    double pn = 0.0;
    double dpn = 0.0;
    evaluate_all(x, sum_sq, pn, dpn);
    rule.nodes.push_back(mid + half * x);
    rule.weights.push_back(half / sum_sq);
  }
  rule.plain_weights = rule.weights;
  return rule;
}

QuadratureRule composite_gauss_legendre(double a, double b, int panels, int order) {
  if (panels < 1) throw std::domain_error("composite_gauss_legendre: need at least one panel");
  if (!(b > a)) throw std::domain_error("composite_gauss_legendre: need a < b");
  const QuadratureRule reference = gauss_legendre_rule(order, -1.0, 1.0);
  QuadratureRule rule;
  rule.kind = QuadratureKind::composite_gauss_legendre;
  rule.lower = a;
  rule.upper = b;
  const double width = (b - a) / panels;
  rule.nodes.reserve(static_cast<std::size_t>(panels * order));
  for (int p = 0; p < panels; ++p) {
    const double left = a + width * p;
    const double right = p + 1 == panels ? b : left + width;
    const double half = 0.5 * (right - left);
    const double mid = 0.5 * (left + right);
    for (std::size_t i = 0; i < reference.size(); ++i) {
      rule.nodes.push_back(mid + half * reference.nodes[i]);
      rule.weights.push_back(half * reference.weights[i]);
    }
  }
  rule.plain_weights = rule.weights;
  return rule;
}

double gauss_hermite_monomial_error(const QuadratureRule& rule, int max_degree) {
  const int m = static_cast<int>(rule.size());
  const int top = std::min(2 * m - 1, max_degree);
  double worst = 0.0;
  for (int j = 0; 2 * j <= top; ++j) {
    special::CompensatedSum acc;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      acc += rule.weights[i] * std::pow(rule.nodes[i], 2 * j);
    }
    const double exact = std::exp(special::log_gamma(j + 0.5));
    worst = std::max(worst, std::abs(acc.value() - exact) / exact);
  }
  return worst;
}

}  // namespace hosc::hermite
