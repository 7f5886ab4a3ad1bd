#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace hosc::linalg {

/// Raised when an iterative eigensolver exceeds its iteration cap.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense square matrix, row-major.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }
  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * n_, n_}; }
  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * n_, n_}; }

  /// max |A(i,j) - A(j,i)|
  [[nodiscard]] double asymmetry() const noexcept;
  /// Replace A by (A + A^T) / 2.
  void symmetrize() noexcept;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Eigenvalues (ascending) of the symmetric tridiagonal matrix with diagonal
/// `diag` and sub-diagonal `offdiag` (size n-1), by the QL algorithm with
/// implicit Wilkinson shifts. At most 50 iterations per eigenvalue.
std::vector<double> tridiagonal_eigenvalues(std::span<const double> diag,
                                            std::span<const double> offdiag);

/// The `count` smallest eigenvalues of a symmetric tridiagonal matrix by
/// Sturm-sequence bisection, ascending.
std::vector<double> tridiagonal_lowest_eigenvalues(std::span<const double> diag,
                                                   std::span<const double> offdiag,
                                                   std::size_t count);

/// Cyclic Jacobi rotations; eigenvalues ascending.
std::vector<double> jacobi_eigenvalues(SquareMatrix a);

/// Householder reduction to tridiagonal form, then QL. Eigenvalues ascending.
std::vector<double> householder_ql_eigenvalues(SquareMatrix a);

/// Jacobi up to this size, Householder + QL above.
inline constexpr std::size_t kJacobiMaxSize = 200;

/// Dispatches on size per kJacobiMaxSize.
std::vector<double> symmetric_eigenvalues(const SquareMatrix& a);

}  // namespace hosc::linalg
