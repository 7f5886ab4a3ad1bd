#include "hosc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hosc::linalg {

double SquareMatrix::asymmetry() const noexcept {
  double worst = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
    }
  }
  return worst;
}

void SquareMatrix::symmetrize() noexcept {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double avg = 0.5 * ((*this)(i, j) + (*this)(j, i));
      (*this)(i, j) = avg;
      (*this)(j, i) = avg;
    }
  }
}

std::vector<double> tridiagonal_eigenvalues(std::span<const double> diag,
                                            std::span<const double> offdiag) {
  const std::size_t n = diag.size();
  if (n == 0) return {};
  if (offdiag.size() + 1 != n) {
    throw std::invalid_argument("tridiagonal_eigenvalues: offdiag must have size n-1");
  }
  std::vector<double> d(diag.begin(), diag.end());
  // e[i] couples d[i] and d[i+1]; e[n-1] is scratch.
  std::vector<double> e(n, 0.0);
  std::copy(offdiag.begin(), offdiag.end(), e.begin());

  constexpr int kMaxIterations = 50;
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t l = 0; l < n; ++l) {
    int iterations = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iterations++ == kMaxIterations) {
          throw ConvergenceError("tridiagonal QL: no convergence for eigenvalue " +
                                 std::to_string(l) + " after 50 iterations");
        }
        // Wilkinson shift from the leading 2x2 block.
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0;
        double c = 1.0;
        double p = 0.0;
        std::size_t i = m;
        bool underflow = false;
        while (i-- > l) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  std::sort(d.begin(), d.end());
  return d;
}

namespace {

// Number of eigenvalues strictly below x.
std::size_t sturm_count(std::span<const double> d, std::span<const double> e2, double x) {
  const double tiny = std::numeric_limits<double>::min() * 4.0;
  std::size_t count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    q = d[i] - x - (i > 0 ? e2[i - 1] / q : 0.0);
    if (std::abs(q) < tiny) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

}  // namespace

std::vector<double> tridiagonal_lowest_eigenvalues(std::span<const double> diag,
                                                   std::span<const double> offdiag,
                                                   std::size_t count) {
  const std::size_t n = diag.size();
  if (count > n) throw std::invalid_argument("tridiagonal_lowest_eigenvalues: count > n");
  if (offdiag.size() + 1 != n) {
    throw std::invalid_argument("tridiagonal_lowest_eigenvalues: offdiag must have size n-1");
  }
  std::vector<double> e2(offdiag.size());
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? std::abs(offdiag[i - 1]) : 0.0;
    const double right = i + 1 < n ? std::abs(offdiag[i]) : 0.0;
    lo = std::min(lo, diag[i] - left - right);
    hi = std::max(hi, diag[i] + left + right);
  }
  for (std::size_t i = 0; i < e2.size(); ++i) e2[i] = offdiag[i] * offdiag[i];

  const double eps = std::numeric_limits<double>::epsilon();
  const double scale = std::max(std::abs(lo), std::abs(hi));
  std::vector<double> out(count);
  double left = lo;
  for (std::size_t k = 0; k < count; ++k) {
    double a = left;
    double b = hi;
    // invariant: count(a) <= k < count(b)
    for (int it = 0; it < 200 && b - a > 2.0 * eps * std::max(scale, 1.0); ++it) {
      const double mid = 0.5 * (a + b);
      if (sturm_count(diag, e2, mid) > k) {
        b = mid;
      } else {
        a = mid;
      }
    }
    out[k] = 0.5 * (a + b);
    left = a;
  }
  return out;
}

std::vector<double> jacobi_eigenvalues(SquareMatrix a) {
  const std::size_t n = a.size();
  std::vector<double> out(n);
  if (n == 0) return out;
  constexpr int kMaxSweeps = 60;
  const double eps = std::numeric_limits<double>::epsilon();

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) total += a(i, j) * a(i, j);
  }
  const double threshold = eps * eps * std::max(total, std::numeric_limits<double>::min());

  for (int sweep = 0; sweep <= kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    }
    if (off <= threshold) {
      for (std::size_t i = 0; i < n; ++i) out[i] = a(i, i);
      std::sort(out.begin(), out.end());
      return out;
    }
    if (sweep == kMaxSweeps) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        if (std::abs(apq) < eps * 1e-3 * std::sqrt(std::abs(app * aqq))) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
  }
  throw ConvergenceError("cyclic Jacobi: off-diagonal mass did not vanish in 60 sweeps");
}

std::vector<double> householder_ql_eigenvalues(SquareMatrix a) {
  const std::size_t n = a.size();
  if (n == 0) return {};
  std::vector<double> d(n);
  std::vector<double> e(n, 0.0);
  std::vector<double> p(n);

  // Reduce rows n-1 .. 1; works on the lower triangle.
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t l = i - 1;
    double scale = 0.0;
    for (std::size_t k = 0; k <= l; ++k) scale += std::abs(a(i, k));
    if (l == 0 || scale == 0.0) {
      e[i] = a(i, l);
      d[i] = 0.0;
      continue;
    }
    double h = 0.0;
    for (std::size_t k = 0; k <= l; ++k) {
      a(i, k) /= scale;
      h += a(i, k) * a(i, k);
    }
    double f = a(i, l);
    const double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
    e[i] = scale * g;
    h -= f * g;
    a(i, l) = f - g;
    // p = A u / h over the leading (l+1) block, using symmetry of the lower triangle.
    f = 0.0;
    for (std::size_t j = 0; j <= l; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k <= j; ++k) acc += a(j, k) * a(i, k);
      for (std::size_t k = j + 1; k <= l; ++k) acc += a(k, j) * a(i, k);
      p[j] = acc / h;
      f += p[j] * a(i, j);
    }
    const double hh = f / (h + h);
    for (std::size_t j = 0; j <= l; ++j) p[j] -= hh * a(i, j);
    for (std::size_t j = 0; j <= l; ++j) {
      const double uj = a(i, j);
      const double pj = p[j];
      double* row = &a(j, 0);
      const double* u = &a(i, 0);
      for (std::size_t k = 0; k <= j; ++k) row[k] -= uj * p[k] + pj * u[k];
    }
    d[i] = h;
  }
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);

  std::vector<double> off(n - 1);
  for (std::size_t i = 1; i < n; ++i) off[i - 1] = e[i];
  return tridiagonal_eigenvalues(d, off);
}

std::vector<double> symmetric_eigenvalues(const SquareMatrix& a) {
  if (a.size() <= kJacobiMaxSize) return jacobi_eigenvalues(a);
  return householder_ql_eigenvalues(a);
}

}  // namespace hosc::linalg
