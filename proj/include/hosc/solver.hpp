#pragma once

#include <string>
#include <vector>

#include "hosc/hermite.hpp"
#include "hosc/linalg.hpp"
#include "hosc/potentials.hpp"

namespace hosc::solver {

/// Galerkin matrix of -u'' + (x^2 + shift + q) u in psi_0..psi_{N-1}.
struct GalerkinProblem {
  potentials::PotentialSpec perturbation;
  double shift = 0.0;
  int basis_size = 0;
  hermite::QuadratureRule quadrature;
  linalg::SquareMatrix matrix;
  double largest_entry = 0.0;
  std::vector<std::string> warnings;
};

/// Quadrature used for the q-integrals at basis size N: Gauss-Hermite with
/// max(2N + 40, quad_nodes) nodes for smooth q; composite Gauss-Legendre
/// split at the jumps otherwise, with enough 20-point panels that each spans
/// at most about 4 radians of the fastest psi_j psi_k oscillation.
hermite::QuadratureRule default_quadrature(const potentials::PotentialSpec& q, int N, int quad_nodes = 0);

/// matrix[j][k] = (2j + 1 + shift) delta_jk + int q psi_j psi_k. Warns when an
/// entry exceeds 1e12; throws std::runtime_error on non-finite entries.
GalerkinProblem assemble(const potentials::PotentialSpec& q, int N, const hermite::QuadratureRule& rule,
                         double shift = 0.0);

/// (2k + 1 + shift) + int q psi_k^2, evaluated with `rule`.
double rayleigh_quotient(const potentials::PotentialSpec& q, int k, const hermite::QuadratureRule& rule,
                         double shift = 0.0);

/// Lowest `count` eigenvalues of the assembled matrix.
std::vector<double> ritz_values(const GalerkinProblem& problem, int count);

struct EigenResult {
  std::vector<double> eigenvalues;           ///< ascending Ritz values at basis_size
  int basis_size = 0;
  int previous_basis_size = 0;               ///< basis of the comparison solve
  std::vector<double> convergence_estimate;  ///< |change| between the two bases, per eigenvalue
  int requested_count = 0;
  bool converged = false;                    ///< largest change below tolerance
  std::vector<std::string> warnings;

  [[nodiscard]] double estimate_sum(int upto) const;
};

/// Ritz values at the problem's basis plus the comparison solve at 2N.
EigenResult eigenvalues(const GalerkinProblem& problem, int count);

struct SolverOptions {
  int basis_size = 0;   ///< > 0: fixed basis N compared with 2N; 0: doubling
  int quad_nodes = 0;   ///< lower bound on Gauss-Hermite nodes
  double tol = 1e-8;    ///< doubling stops when every requested value moves less
  int max_basis = 16384;
  double shift = 0.0;
};

/// Lowest `count` Ritz values of x^2 + shift + q. Doubling runs from
/// N = max(4 count, 120) until the change drops below tol or N would exceed
/// max_basis; values are those of the largest basis. Dense assembly up to
/// N = 480 (960 for smooth q); above that non-negative q uses an exact
/// reduction of the high-index block (see ritz_values_reduced).
EigenResult solve(const potentials::PotentialSpec& q, int count, const SolverOptions& options = {});

/// Ritz values at basis N for q >= 0 without forming the N x N matrix. With
/// Q = B^T B (B = diag(sqrt(w q)) Psi over the quadrature nodes) and the
/// split into a low block L and tail T, each Ritz value solves
///   lambda = eig_k( D_L + B_L^T (I + B_T (D_T - lambda)^{-1} B_T^T)^{-1} B_L ),
/// a fixed point that is unique because the right side decreases in lambda.
/// The tail resolvent is summed as a power series in lambda.
std::vector<double> ritz_values_reduced(const potentials::PotentialSpec& q, int N, int count,
                                        const hermite::QuadratureRule& rule, double shift = 0.0);

struct FdResult {
  std::vector<double> eigenvalues;    ///< grid M
  std::vector<double> refined;        ///< grid 2M + 1 (half the spacing)
  std::vector<double> extrapolated;   ///< Richardson (4 refined - eigenvalues) / 3
  std::vector<double> change;         ///< |refined - eigenvalues|
  double L = 0.0;
  int M = 0;
  bool resolved = true;               ///< every change within tol
};

/// Central differences for -u'' + (x^2 + shift + q) u on [-L, L], M interior
/// points, Dirichlet ends. q is averaged over each cell (split at its jumps),
/// so piecewise constant q keeps the O(h^2) error expansion. Lowest `count`
/// eigenvalues by Sturm bisection, at M and 2M + 1 points.
FdResult fd_oracle(const potentials::PotentialSpec& q, double L, int M, int count, double tol = 1e-4,
                   double shift = 0.0);

}  // namespace hosc::solver
