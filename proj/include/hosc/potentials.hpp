#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hosc::potentials {

enum class Family { zero, gauss, box, sech2, meanzero, custom_samples };

/// Perturbation q, one of
///   gauss(a, s)   a exp(-(x/s)^2)
///   box(k, d)     (k/d) on [-d/2, d/2]
///   sech2(a, s)   a / cosh(x/s)^2
///   meanzero(a)   a (2x^2 - 1) exp(-x^2)
///   zero()
///   custom_samples: linear interpolation of (x, q) pairs, zero outside.
struct PotentialSpec {
  Family family = Family::zero;
  std::map<std::string, double> params;
  double support_lo = 0.0;  ///< |q| < 1e-16 outside [support_lo, support_hi]
  double support_hi = 0.0;
  std::vector<double> sample_x;  ///< custom_samples only
  std::vector<double> sample_q;

  [[nodiscard]] double param(const std::string& name) const;
  /// Canonical grammar form, e.g. "gauss(a=1,s=0.5)".
  [[nodiscard]] std::string to_string() const;
};

class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// q_m does not exist: -q(x) e^{x^2} is unbounded above.
class UnboundedError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Integration failed to meet its tolerance.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

PotentialSpec make_zero();
PotentialSpec make_gauss(double a, double s);
PotentialSpec make_box(double k, double d);
PotentialSpec make_sech2(double a, double s);
PotentialSpec make_meanzero(double a);
/// Strictly increasing x, at least two samples.
PotentialSpec make_custom(std::vector<double> x, std::vector<double> q);

/// `family(name=value,...)`, whitespace-insensitive, parameters in any order.
/// Throws ParseError naming the offending token, std::invalid_argument for
/// parameter values out of range.
PotentialSpec parse(std::string_view text);

std::string family_name(Family family);

double evaluate(const PotentialSpec& spec, double x);

/// t q for t > 0 (amplitude scaling within the same family).
PotentialSpec scaled(const PotentialSpec& spec, double t);

/// Points where q jumps (box edges, custom sample ends/knots); empty for
/// smooth families.
std::vector<double> breakpoints(const PotentialSpec& spec);
bool is_smooth(const PotentialSpec& spec);
bool is_even(const PotentialSpec& spec);
/// q >= 0 everywhere, certified from the family formula.
bool certified_nonnegative(const PotentialSpec& spec);
/// Preset families carry closed-form integrals and q_m certificates;
/// custom_samples does not.
bool has_closed_form(const PotentialSpec& spec);

/// int_a^b f by adaptive bisection of 20-point Gauss-Legendre panels, with
/// the interval first split at `splits`. Throws IntegrationError when the
/// relative tolerance is not met within the depth limit.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-10, const std::vector<double>& splits = {});

double integral(const PotentialSpec& spec);
double l1_norm(const PotentialSpec& spec);

struct QmResult {
  double value = 0.0;
  double argmax = 0.0;
  bool closed_form = false;
};

/// max(0, sup_x -q(x) e^{x^2}). Dense sampling over the support followed by
/// golden-section refinement; closed forms are reported alongside.
/// Throws UnboundedError when the family's tail makes the supremum infinite.
QmResult q_m_detail(const PotentialSpec& spec);
double q_m(const PotentialSpec& spec);

/// V = harmonic * x^2 + constant + q.
struct FullPotential {
  double harmonic = 1.0;
  double constant = 0.0;
  PotentialSpec q = make_zero();
};

struct HermiteCoefficients {
  /// v_j = int e^{-x^2} V H_j dx / (sqrt(pi) 2^j j!), j = 0..J
  std::vector<double> values;
  /// c_j = int e^{-x^2} V p_j dx with p_j orthonormal; v_j = c_j / sqrt(sqrt(pi) 2^j j!).
  std::vector<double> projections;
  int J = 0;
  /// int e^{-x^2} q^2 - sum_{j<=J} c_j^2 for the q part (the polynomial
  /// part of V is represented exactly).
  double tail_estimate = 0.0;
  std::vector<std::string> warnings;
};

/// Coefficients up to degree J <= 100. q-integrals use Gauss-Hermite with
/// 2J + 40 nodes for smooth families (or `quad_nodes` when larger), and
/// jump-split composite Gauss-Legendre otherwise.
HermiteCoefficients hermite_coefficients(const FullPotential& v, int J, int quad_nodes = 0);
HermiteCoefficients hermite_coefficients(const PotentialSpec& q, int J, int quad_nodes = 0);

}  // namespace hosc::potentials
