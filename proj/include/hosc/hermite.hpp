#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hosc::hermite {

/// Degree cap for raw physicists' polynomials; H_n(x) overflows double
/// precision near n = 150 for moderate |x|.
inline constexpr int kMaxRawDegree = 150;

struct HermiteEval {
  int degree = 0;
  double x = 0.0;
  double physicists_value = 0.0;  ///< H_n(x); NaN when degree > kMaxRawDegree
  double normalized_value = 0.0;  ///< e^{-x^2/2} H_n(x) / sqrt(2^n n! sqrt(pi))
};

/// H_n(x) by the three-term recurrence. Throws std::domain_error for
/// n > kMaxRawDegree or n < 0.
double hermite_physicists(int n, double x);

/// Normalized oscillator eigenfunction psi_n(x). Carries an exponent
/// separately so that neither e^{-x^2/2} underflow nor growth of the
/// recurrence loses information.
double hermite_normalized(int n, double x);

/// psi_0(x) .. psi_{out.size()-1}(x).
void hermite_normalized_all(double x, std::span<double> out);

/// p_0(x) .. p_{out.size()-1}(x) with p_k = H_k / sqrt(2^k k! sqrt(pi)),
/// orthonormal under the weight e^{-x^2}.
void hermite_orthonormal_all(double x, std::span<double> out);

HermiteEval evaluate(int n, double x);

/// sum_{k=0}^n H_k(x)^2 / (2^k k!), evaluated as sqrt(pi) sum_k p_k(x)^2.
double turan_sum(int n, double x);

/// Closed form of the same sum, [H_{n+1}^2 - H_n H_{n+2}] / (2^{n+1} n!),
/// from raw polynomials (n + 2 <= kMaxRawDegree).
double turan_closed_form(int n, double x);

/// ln h_n(x) where h_n(x) = e^{-x^2} [H_{n+1}^2 - H_n H_{n+2}]
///                        = sqrt(pi) 2^{n+1} n! sum_{k<=n} psi_k(x)^2.
double log_h_n(int n, double x);

/// h_n(x); throws std::overflow_error when the value is not representable.
double h_n(int n, double x);

/// h_n from raw polynomials, for cross-checks (n + 2 <= kMaxRawDegree).
double h_n_raw(int n, double x);

/// Upper bound for sup_x h_n(x):
///   odd n:  (4^{n+1} / 2pi) (2n+3)/(n+1) Gamma(n/2 + 1)^2
///   even n: (4^{n+1} / 2pi) (n+1) Gamma((n+1)/2)^2   (attained at x = 0)
double log_h_n_bound(int n);
double h_n_bound(int n);

/// int e^{-x^2} H_n H_m dx = delta_nm sqrt(pi) 2^n n!
double hermite_moment_double(int n, int m);

/// int e^{-x^2} H_a H_b H_c dx; zero unless a+b+c = 2s is even and
/// s >= max(a,b,c), else sqrt(pi) 2^s a! b! c! / ((s-a)! (s-b)! (s-c)!).
double hermite_moment_triple(int a, int b, int c);

/// int e^{-2x^2} H_k(x)^2 dx = 2^{k-1/2} Gamma(k + 1/2).
double gaussian_squared_moment(int k);

enum class QuadratureKind { gauss_hermite, composite_gauss_legendre };

struct QuadratureRule {
  QuadratureKind kind = QuadratureKind::gauss_hermite;
  std::vector<double> nodes;    ///< strictly increasing
  std::vector<double> weights;  ///< gauss_hermite: for int e^{-x^2} f; may underflow to 0 for large m
  /// Weights for plain integrals int f dx. For gauss_hermite these are
  /// weights * e^{x^2} = 1 / sum_k psi_k(x_i)^2, always positive and finite;
  /// for Gauss-Legendre they equal `weights`.
  std::vector<double> plain_weights;
  double lower = 0.0;  ///< interval, composite rules only
  double upper = 0.0;

  [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
};

/// m-point Gauss-Hermite rule for int e^{-x^2} f(x) dx. Nodes are the
/// eigenvalues of the Jacobi matrix (zero diagonal, off-diagonals sqrt(k/2))
/// polished by one Newton step; weights are the Christoffel numbers
/// 1 / sum_k p_k(x_i)^2, which equal sqrt(pi) times the squared first
/// eigenvector components.
QuadratureRule gauss_hermite_rule(int m);

/// Gauss-Legendre rule with `order` points on [a, b], built the same way
/// from the Legendre Jacobi matrix.
QuadratureRule gauss_legendre_rule(int order, double a, double b);

/// `panels` equal panels of `order`-point Gauss-Legendre on [a, b].
QuadratureRule composite_gauss_legendre(double a, double b, int panels, int order = 20);

/// Largest relative error of the rule on e^{-x^2} x^{2j}, 2j <= min(2m-1, max_degree),
/// against the closed form Gamma(j + 1/2).
double gauss_hermite_monomial_error(const QuadratureRule& rule, int max_degree);

}  // namespace hosc::hermite
