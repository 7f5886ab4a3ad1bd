#include "hosc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hosc::solver {

namespace {

using potentials::PotentialSpec;

constexpr int kDenseMaxJump = 480;
constexpr int kDenseMaxSmooth = 960;
constexpr int kMaxHermiteNodes = 10000;
constexpr double kEntryWarning = 1e12;

bool nonnegative_at_nodes(const PotentialSpec& q, const hermite::QuadratureRule& rule) {
  if (potentials::certified_nonnegative(q)) return true;
  for (double x : rule.nodes)
    if (potentials::evaluate(q, x) < 0.0) return false;
  return true;
}

int dense_cap(const PotentialSpec& q) { return potentials::is_smooth(q) ? kDenseMaxSmooth : kDenseMaxJump; }

bool reducible(const PotentialSpec& q) { return !potentials::is_smooth(q) && potentials::certified_nonnegative(q); }

std::string format_entry_warning(double value, int N) {
  std::ostringstream os;
  os << "assembled matrix entry " << value << " exceeds 1e12 at basis " << N;
  return os.str();
}

// In-place Cholesky of a symmetric positive definite m x m matrix (lower part).
void cholesky(std::vector<double>& a, std::size_t m) {
  for (std::size_t j = 0; j < m; ++j) {
    double d = a[j * m + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * m + k] * a[j * m + k];
    if (!(d > 0.0)) throw std::runtime_error("tail resolvent lost positive definiteness");
    d = std::sqrt(d);
    a[j * m + j] = d;
    for (std::size_t i = j + 1; i < m; ++i) {
      double s = a[i * m + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * m + k] * a[j * m + k];
      a[i * m + j] = s / d;
    }
  }
}

}  // namespace

double EigenResult::estimate_sum(int upto) const {
  double s = 0.0;
  const int n = std::min<int>(upto, static_cast<int>(convergence_estimate.size()));
  for (int k = 0; k < n; ++k) s += convergence_estimate[static_cast<std::size_t>(k)];
  return s;
}

hermite::QuadratureRule default_quadrature(const PotentialSpec& q, int N, int quad_nodes) {
  if (N < 1) throw std::invalid_argument("basis size must be positive");
  if (potentials::is_smooth(q)) {
    const int m = std::max(2 * N + 40, quad_nodes);
    if (m > kMaxHermiteNodes) throw std::invalid_argument("Gauss-Hermite node count exceeds 10000");
    return hermite::gauss_hermite_rule(m);
  }
  std::vector<double> cuts = potentials::breakpoints(q);
  cuts.push_back(q.support_lo);
  cuts.push_back(q.support_hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const double lo = std::max(q.support_lo, -40.0);
  const double hi = std::min(q.support_hi, 40.0);
  hermite::QuadratureRule rule;
  rule.kind = hermite::QuadratureKind::composite_gauss_legendre;
  rule.lower = lo;
  rule.upper = hi;
  const double freq = std::sqrt(2.0 * N);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = std::max(cuts[i], lo);
    const double b = std::min(cuts[i + 1], hi);
    if (!(b > a)) continue;
    const int panels = static_cast<int>(std::ceil((b - a) * freq / 8.0)) + 2;
    const hermite::QuadratureRule part = hermite::composite_gauss_legendre(a, b, panels);
    rule.nodes.insert(rule.nodes.end(), part.nodes.begin(), part.nodes.end());
    rule.weights.insert(rule.weights.end(), part.weights.begin(), part.weights.end());
    rule.plain_weights.insert(rule.plain_weights.end(), part.plain_weights.begin(), part.plain_weights.end());
  }
  return rule;
}

GalerkinProblem assemble(const PotentialSpec& q, int N, const hermite::QuadratureRule& rule, double shift) {
  if (N < 1) throw std::invalid_argument("basis size must be positive");
  GalerkinProblem p;
  p.perturbation = q;
  p.shift = shift;
  p.basis_size = N;
  p.quadrature = rule;
  const auto n = static_cast<std::size_t>(N);
  p.matrix = linalg::SquareMatrix(n);
  std::vector<double> psi(n);
  if (q.family != potentials::Family::zero) {
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double wq = rule.plain_weights[i] * potentials::evaluate(q, rule.nodes[i]);
      if (wq == 0.0) continue;
      hermite::hermite_normalized_all(rule.nodes[i], psi);
      for (std::size_t j = 0; j < n; ++j) {
        const double t = wq * psi[j];
        double* row = &p.matrix(j, 0);
        for (std::size_t k = 0; k <= j; ++k) row[k] += t * psi[k];
      }
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < j; ++k) p.matrix(k, j) = p.matrix(j, k);
    p.matrix(j, j) += 2.0 * static_cast<double>(j) + 1.0 + shift;
  }
  double largest = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k <= j; ++k) {
      const double v = std::abs(p.matrix(j, k));
      if (!std::isfinite(v)) throw std::runtime_error("non-finite entry in assembled matrix");
      largest = std::max(largest, v);
    }
  p.largest_entry = largest;
  if (largest > kEntryWarning) p.warnings.push_back(format_entry_warning(largest, N));
  return p;
}

double rayleigh_quotient(const PotentialSpec& q, int k, const hermite::QuadratureRule& rule, double shift) {
  if (k < 0) throw std::invalid_argument("negative index");
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double psi = hermite::hermite_normalized(k, rule.nodes[i]);
    s += rule.plain_weights[i] * potentials::evaluate(q, rule.nodes[i]) * psi * psi;
  }
  return 2.0 * k + 1.0 + shift + s;
}

std::vector<double> ritz_values(const GalerkinProblem& problem, int count) {
  if (count < 1 || count > problem.basis_size) throw std::invalid_argument("eigenvalue count out of range");
  std::vector<double> all = linalg::symmetric_eigenvalues(problem.matrix);
  all.resize(static_cast<std::size_t>(count));
  return all;
}

std::vector<double> ritz_values_reduced(const PotentialSpec& q, int N, int count,
                                        const hermite::QuadratureRule& rule, double shift) {
  if (count < 1 || count > N) throw std::invalid_argument("eigenvalue count out of range");
  if (!nonnegative_at_nodes(q, rule)) throw std::invalid_argument("reduced solve needs q >= 0");

  const auto n = static_cast<std::size_t>(N);
  std::vector<double> scale;
  std::vector<double> xs;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double wq = rule.plain_weights[i] * potentials::evaluate(q, rule.nodes[i]);
    if (wq > 0.0) {
      scale.push_back(std::sqrt(wq));
      xs.push_back(rule.nodes[i]);
    }
  }
  const std::size_t m = xs.size();
  auto diag = [&](std::size_t j) { return 2.0 * static_cast<double>(j) + 1.0 + shift; };
  if (m == 0) {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = diag(k);
    return out;
  }

  // B[a][j] = sqrt(w_a q_a) psi_j(x_a), row-major m x N
  std::vector<double> B(m * n);
  for (std::size_t a = 0; a < m; ++a) {
    std::span<double> row(B.data() + a * n, n);
    hermite::hermite_normalized_all(xs[a], row);
    for (double& v : row) v *= scale[a];
  }

  auto low_block = [&](std::size_t nl) {
    linalg::SquareMatrix low(nl);
    for (std::size_t a = 0; a < m; ++a) {
      const double* r = B.data() + a * n;
      for (std::size_t j = 0; j < nl; ++j) {
        double* out = &low(j, 0);
        for (std::size_t k = 0; k <= j; ++k) out[k] += r[j] * r[k];
      }
    }
    for (std::size_t j = 0; j < nl; ++j) {
      for (std::size_t k = 0; k < j; ++k) low(k, j) = low(j, k);
      low(j, j) += diag(j);
    }
    return low;
  };

  const auto cnt = static_cast<std::size_t>(count);
  std::size_t nl = std::min(n, std::max<std::size_t>(128, 4 * cnt));
  std::vector<double> upper;
  double lo = 1.0 + shift;
  double c = 0.0;
  double rho = 0.0;
  for (;;) {
    upper = linalg::householder_ql_eigenvalues(low_block(nl));
    if (nl == n) {
      upper.resize(cnt);
      return upper;
    }
    const double hi = upper[cnt - 1];
    c = 0.5 * (lo + hi);
    rho = 0.5 * (hi - lo) + 1.0;
    if (diag(nl) - c >= 2.0 * rho) break;
    nl = std::min(n, static_cast<std::size_t>(std::ceil((c + 2.0 * rho - 1.0 - shift) / 2.0)) + 1);
  }

  // S_p = sum_{j >= nl} b_j b_j^T / (d_j - c)^{p+1}; terms with
  // (rho / (d_j - c))^p below 1e-18 are dropped.
  const double r0 = rho / (diag(nl) - c);
  const int terms = std::max(1, static_cast<int>(std::ceil(std::log(1e-18) / std::log(r0))) + 1);
  std::vector<std::vector<double>> S(static_cast<std::size_t>(terms), std::vector<double>(m * m, 0.0));
  std::vector<double> w(n, 0.0);
  std::vector<double> g(n, 0.0);
  for (std::size_t j = nl; j < n; ++j) {
    g[j] = 1.0 / (diag(j) - c);
    w[j] = g[j];
  }
  std::vector<double> tmp(n);
  std::size_t end = n;
  for (int p = 0; p < terms; ++p) {
    if (p > 0) {
      while (end > nl && std::pow(rho * g[end - 1], p) < 1e-18) --end;
      for (std::size_t j = nl; j < end; ++j) w[j] *= g[j];
    }
    if (end == nl) break;
    auto& Sp = S[static_cast<std::size_t>(p)];
    for (std::size_t a = 0; a < m; ++a) {
      const double* ra = B.data() + a * n;
      for (std::size_t j = nl; j < end; ++j) tmp[j] = ra[j] * w[j];
      for (std::size_t b = 0; b <= a; ++b) {
        const double* rb = B.data() + b * n;
        double s = 0.0;
        for (std::size_t j = nl; j < end; ++j) s += tmp[j] * rb[j];
        Sp[a * m + b] = s;
        Sp[b * m + a] = s;
      }
    }
  }

  std::vector<double> F(m * m);
  std::vector<double> Y(m * nl);
  auto eigs_at = [&](double lambda) {
    const double t = lambda - c;
    for (std::size_t i = 0; i < m * m; ++i) {
      double v = 0.0;
      for (int p = terms - 1; p >= 0; --p) v = v * t + S[static_cast<std::size_t>(p)][i];
      F[i] = v;
    }
    for (std::size_t a = 0; a < m; ++a) F[a * m + a] += 1.0;
    cholesky(F, m);
    // Y = L^{-1} B_L
    for (std::size_t a = 0; a < m; ++a) {
      const double* ra = B.data() + a * n;
      double* ya = Y.data() + a * nl;
      for (std::size_t j = 0; j < nl; ++j) ya[j] = ra[j];
      for (std::size_t b = 0; b < a; ++b) {
        const double l = F[a * m + b];
        const double* yb = Y.data() + b * nl;
        for (std::size_t j = 0; j < nl; ++j) ya[j] -= l * yb[j];
      }
      const double d = F[a * m + a];
      for (std::size_t j = 0; j < nl; ++j) ya[j] /= d;
    }
    linalg::SquareMatrix M(nl);
    for (std::size_t a = 0; a < m; ++a) {
      const double* ya = Y.data() + a * nl;
      for (std::size_t j = 0; j < nl; ++j) {
        double* out = &M(j, 0);
        for (std::size_t k = 0; k <= j; ++k) out[k] += ya[j] * ya[k];
      }
    }
    for (std::size_t j = 0; j < nl; ++j) {
      for (std::size_t k = 0; k < j; ++k) M(k, j) = M(j, k);
      M(j, j) += diag(j);
    }
    return linalg::householder_ql_eigenvalues(std::move(M));
  };

  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * diag(nl - 1);
  std::vector<double> out(cnt);
  for (std::size_t k = 0; k < cnt; ++k) {
    double lambda = upper[k];
    bool done = false;
    for (int it = 0; it < 100 && !done; ++it) {
      const double mu = eigs_at(lambda)[k];
      done = std::abs(mu - lambda) <= noise;
      lambda = mu;
    }
    if (!done) throw linalg::ConvergenceError("reduced Ritz iteration did not converge");
    out[k] = lambda;
  }
  return out;
}

namespace {

struct Level {
  std::vector<double> values;
  std::vector<std::string> warnings;
};

Level solve_at(const PotentialSpec& q, int N, int count, int quad_nodes, double shift) {
  const hermite::QuadratureRule rule = default_quadrature(q, N, quad_nodes);
  Level out;
  if (N <= dense_cap(q) || !reducible(q)) {
    if (N > dense_cap(q)) throw std::invalid_argument("basis size exceeds the dense limit for this potential");
    const GalerkinProblem p = assemble(q, N, rule, shift);
    out.values = ritz_values(p, count);
    out.warnings = p.warnings;
  } else {
    out.values = ritz_values_reduced(q, N, count, rule, shift);
  }
  return out;
}

int basis_limit(const PotentialSpec& q, int max_basis) {
  return reducible(q) ? max_basis : std::min(max_basis, dense_cap(q));
}

void append_unique(std::vector<std::string>& to, const std::vector<std::string>& from) {
  for (const auto& w : from)
    if (std::find(to.begin(), to.end(), w) == to.end()) to.push_back(w);
}

EigenResult compare(const Level& main, int N, const Level& other, int other_N, int count, double tol) {
  EigenResult r;
  r.eigenvalues = main.values;
  r.basis_size = N;
  r.previous_basis_size = other_N;
  r.requested_count = count;
  r.convergence_estimate.resize(static_cast<std::size_t>(count));
  double worst = 0.0;
  for (std::size_t k = 0; k < r.convergence_estimate.size(); ++k) {
    r.convergence_estimate[k] = std::abs(main.values[k] - other.values[k]);
    worst = std::max(worst, r.convergence_estimate[k]);
  }
  r.converged = worst < tol;
  append_unique(r.warnings, main.warnings);
  append_unique(r.warnings, other.warnings);
  return r;
}

}  // namespace

EigenResult eigenvalues(const GalerkinProblem& problem, int count) {
  Level main{ritz_values(problem, count), problem.warnings};
  const int N = problem.basis_size;
  const PotentialSpec& q = problem.perturbation;
  const int other_N = 2 * N <= basis_limit(q, 2 * N) ? 2 * N : N / 2;
  if (other_N < count) throw std::invalid_argument("no comparison basis available");
  const Level other = solve_at(q, other_N, count, 0, problem.shift);
  return compare(main, N, other, other_N, count, 1e-8);
}

EigenResult solve(const PotentialSpec& q, int count, const SolverOptions& options) {
  if (count < 1) throw std::invalid_argument("eigenvalue count must be positive");
  const int limit = basis_limit(q, options.max_basis);
  if (options.basis_size > 0) {
    const int N = options.basis_size;
    if (N < count) throw std::invalid_argument("basis size smaller than the eigenvalue count");
    if (N > limit) throw std::invalid_argument("basis size exceeds the solver limit for this potential");
    const int other_N = 2 * N <= limit ? 2 * N : N / 2;
    if (other_N < count) throw std::invalid_argument("no comparison basis available");
    const Level main = solve_at(q, N, count, options.quad_nodes, options.shift);
    const Level other = solve_at(q, other_N, count, options.quad_nodes, options.shift);
    return compare(main, N, other, other_N, count, options.tol);
  }

  int N = std::max(4 * count, 120);
  if (N > limit) throw std::invalid_argument("eigenvalue count too large for the solver limit");
  int prev_N = N;
  Level prev = solve_at(q, N, count, options.quad_nodes, options.shift);
  if (2 * N > limit) {
    prev_N = N / 2;
    if (prev_N < count) throw std::invalid_argument("no comparison basis available");
    const Level other = solve_at(q, prev_N, count, options.quad_nodes, options.shift);
    EigenResult r = compare(prev, N, other, prev_N, count, options.tol);
    if (!r.converged) r.warnings.push_back("basis limit reached before convergence");
    return r;
  }
  for (;;) {
    const int next_N = 2 * N;
    Level next = solve_at(q, next_N, count, options.quad_nodes, options.shift);
    EigenResult r = compare(next, next_N, prev, N, count, options.tol);
    if (r.converged) return r;
    if (2 * next_N > limit) {
      r.warnings.push_back("basis limit reached before convergence");
      return r;
    }
    prev_N = N;
    N = next_N;
    prev = std::move(next);
  }
}

FdResult fd_oracle(const PotentialSpec& q, double L, int M, int count, double tol, double shift) {
  if (!(L > 0.0) || M < 2 || count < 1 || count > M) throw std::invalid_argument("invalid grid");
  std::vector<double> cuts = potentials::breakpoints(q);
  std::sort(cuts.begin(), cuts.end());
  const hermite::QuadratureRule gl = hermite::gauss_legendre_rule(4, -1.0, 1.0);

  auto piece = [&](double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < gl.size(); ++i) s += gl.weights[i] * potentials::evaluate(q, mid + half * gl.nodes[i]);
    return s * half;
  };
  auto cell_average = [&](double a, double b) {
    double s = 0.0;
    double left = a;
    for (auto it = std::upper_bound(cuts.begin(), cuts.end(), a); it != cuts.end() && *it < b; ++it) {
      s += piece(left, *it);
      left = *it;
    }
    s += piece(left, b);
    return s / (b - a);
  };
  auto run = [&](int points) {
    const double h = 2.0 * L / (points + 1);
    std::vector<double> d(static_cast<std::size_t>(points));
    std::vector<double> e(static_cast<std::size_t>(points - 1), -1.0 / (h * h));
    for (int i = 0; i < points; ++i) {
      const double x = -L + (i + 1) * h;
      const double v = q.family == potentials::Family::zero ? 0.0 : cell_average(x - 0.5 * h, x + 0.5 * h);
      d[static_cast<std::size_t>(i)] = 2.0 / (h * h) + x * x + shift + v;
    }
    return linalg::tridiagonal_lowest_eigenvalues(d, e, static_cast<std::size_t>(count));
  };

  FdResult r;
  r.L = L;
  r.M = M;
  r.eigenvalues = run(M);
  r.refined = run(2 * M + 1);
  for (std::size_t k = 0; k < r.eigenvalues.size(); ++k) {
    r.extrapolated.push_back((4.0 * r.refined[k] - r.eigenvalues[k]) / 3.0);
    r.change.push_back(std::abs(r.refined[k] - r.eigenvalues[k]));
    if (r.change.back() > tol) r.resolved = false;
  }
  return r;
}

}  // namespace hosc::solver
