#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "hosc/solver.hpp"

using namespace hosc;
using namespace hosc::solver;
using potentials::PotentialSpec;

TEST_CASE("zero perturbation is diagonal") {
  const PotentialSpec q = potentials::make_zero();
  const GalerkinProblem p = assemble(q, 30, default_quadrature(q, 30));
  for (std::size_t j = 0; j < 30; ++j)
    for (std::size_t k = 0; k < 30; ++k) CHECK(p.matrix(j, k) == (j == k ? 2.0 * j + 1.0 : 0.0));
  const EigenResult r = solve(q, 10);
  for (int k = 0; k < 10; ++k) {
    CHECK(r.eigenvalues[k] == 2.0 * k + 1.0);
    CHECK(r.convergence_estimate[k] == 0.0);
  }
  CHECK(r.converged);
}

TEST_CASE("assembled matrix is symmetric") {
  for (const char* text : {"gauss(a=1,s=1)", "box(k=1,d=0.1)", "meanzero(a=1)", "sech2(a=-0.5,s=2)"}) {
    const PotentialSpec q = potentials::parse(text);
    const GalerkinProblem p = assemble(q, 60, default_quadrature(q, 60));
    CHECK(p.matrix.asymmetry() == 0.0);
    CHECK(p.warnings.empty());
  }
}

TEST_CASE("box ground-state entry") {
  const PotentialSpec q = potentials::make_box(1.0, 0.1);
  const GalerkinProblem p = assemble(q, 20, default_quadrature(q, 20));
  CHECK(p.matrix(0, 0) - 1.0 == doctest::Approx(std::erf(0.05) / 0.1).epsilon(1e-13));
  CHECK(std::abs(p.matrix(0, 0) - 1.0 - 1.0 / std::sqrt(std::numbers::pi)) < 1e-3);
  CHECK(p.matrix(0, 1) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("gauss matrix against a 400-node rule") {
  const PotentialSpec q = potentials::make_gauss(1.0, 1.0);
  const GalerkinProblem p = assemble(q, 40, default_quadrature(q, 40));
  const GalerkinProblem brute = assemble(q, 40, hermite::gauss_hermite_rule(400));
  double worst = 0.0;
  for (std::size_t j = 0; j < 40; ++j)
    for (std::size_t k = 0; k < 40; ++k) worst = std::max(worst, std::abs(p.matrix(j, k) - brute.matrix(j, k)));
  CHECK(worst < 1e-10);
}

TEST_CASE("diagonal equals the Rayleigh quotient") {
  for (const char* text : {"gauss(a=2,s=0.5)", "box(k=3,d=0.4)"}) {
    const PotentialSpec q = potentials::parse(text);
    const auto rule = default_quadrature(q, 50);
    const GalerkinProblem p = assemble(q, 50, rule, 0.25);
    for (int k = 0; k < 50; k += 7)
      CHECK(p.matrix(std::size_t(k), std::size_t(k)) == doctest::Approx(rayleigh_quotient(q, k, rule, 0.25)).epsilon(1e-13));
  }
}

TEST_CASE("Ritz values decrease with the basis") {
  for (const char* text : {"gauss(a=1,s=1)", "box(k=1,d=0.1)", "meanzero(a=1)"}) {
    const PotentialSpec q = potentials::parse(text);
    std::vector<double> previous;
    for (int N : {40, 80, 160}) {
      const auto values = ritz_values(assemble(q, N, default_quadrature(q, N)), 10);
      if (!previous.empty())
        for (std::size_t k = 0; k < values.size(); ++k) CHECK(values[k] <= previous[k] + 1e-12 * values[k]);
      previous = values;
    }
  }
}

TEST_CASE("constant shift moves every eigenvalue") {
  const PotentialSpec q = potentials::make_sech2(1.0, 1.0);
  SolverOptions plain;
  SolverOptions shifted;
  shifted.shift = 2.5;
  const EigenResult a = solve(q, 8, plain);
  const EigenResult b = solve(q, 8, shifted);
  for (int k = 0; k < 8; ++k) CHECK(b.eigenvalues[k] - a.eigenvalues[k] == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("finite differences for the bare oscillator") {
  const FdResult fd = fd_oracle(potentials::make_zero(), 12.0, 4000, 11, 1e-3);
  CHECK(std::abs(fd.eigenvalues[0] - 1.0) < 1e-5);
  CHECK(std::abs(fd.extrapolated[10] - 21.0) < 1e-4);
  // leading error -(h^2/12) <p^4>, <p^4> = (3 lambda^2 + 1) / 8
  const double h = 24.0 / 4001.0;
  for (int k = 0; k < 11; ++k) {
    const double lambda = 2.0 * k + 1.0;
    const double predicted = h * h / 12.0 * (3.0 * lambda * lambda + 1.0) / 8.0;
    CHECK(lambda - fd.eigenvalues[k] == doctest::Approx(predicted).epsilon(0.02));
    CHECK(std::abs(fd.extrapolated[k] - lambda) < 1e-8);
  }
  CHECK(fd.resolved);
  const FdResult coarse = fd_oracle(potentials::make_zero(), 12.0, 50, 11, 1e-6);
  CHECK_FALSE(coarse.resolved);
}

TEST_CASE("Galerkin agrees with finite differences for smooth q") {
  for (const char* text : {"gauss(a=1,s=1)", "sech2(a=1,s=1)", "meanzero(a=1)", "gauss(a=-0.5,s=2)"}) {
    const PotentialSpec q = potentials::parse(text);
    const EigenResult r = solve(q, 11);
    CHECK(r.converged);
    const FdResult fd = fd_oracle(q, 12.0, 4000, 11);
    for (int k = 0; k < 11; ++k) CHECK(std::abs(r.eigenvalues[k] - fd.extrapolated[k]) < 1e-6);
  }
}

TEST_CASE("reduced solve matches the dense solve") {
  for (const char* text : {"box(k=1,d=0.1)", "box(k=20,d=0.5)"}) {
    const PotentialSpec q = potentials::parse(text);
    const int N = 400;
    const auto rule = default_quadrature(q, N);
    const auto dense = ritz_values(assemble(q, N, rule), 12);
    const auto reduced = ritz_values_reduced(q, N, 12, rule);
    for (std::size_t k = 0; k < dense.size(); ++k) CHECK(reduced[k] == doctest::Approx(dense[k]).epsilon(1e-11));
  }
  const PotentialSpec q = potentials::make_box(1.0, 0.1);
  const auto shifted = ritz_values_reduced(q, 600, 5, default_quadrature(q, 600), 1.5);
  const auto plain = ritz_values_reduced(q, 600, 5, default_quadrature(q, 600));
  for (std::size_t k = 0; k < 5; ++k) CHECK(shifted[k] - plain[k] == doctest::Approx(1.5).epsilon(1e-11));
}

TEST_CASE("box converges from above towards finite differences") {
  const PotentialSpec q = potentials::make_box(1.0, 0.1);
  SolverOptions options;
  options.max_basis = 2000;
  const EigenResult r = solve(q, 6, options);
  CHECK(r.basis_size == 1920);
  CHECK(r.previous_basis_size == 960);
  CHECK_FALSE(r.converged);
  CHECK_FALSE(r.warnings.empty());
  const FdResult fd = fd_oracle(q, 12.0, 8000, 6);
  for (int k = 0; k < 6; ++k) {
    CHECK(r.eigenvalues[k] > fd.extrapolated[k] - 1e-6);
    CHECK(r.eigenvalues[k] - fd.extrapolated[k] < 1e-4);
    CHECK(r.convergence_estimate[k] >= 0.0);
  }
}

TEST_CASE("fixed basis and comparison") {
  const PotentialSpec q = potentials::make_gauss(1.0, 1.0);
  SolverOptions options;
  options.basis_size = 100;
  const EigenResult r = solve(q, 5, options);
  CHECK(r.basis_size == 100);
  CHECK(r.previous_basis_size == 200);
  CHECK(r.convergence_estimate.size() == 5u);
  const EigenResult e = eigenvalues(assemble(q, 100, default_quadrature(q, 100)), 5);
  for (int k = 0; k < 5; ++k) CHECK(e.eigenvalues[k] == doctest::Approx(r.eigenvalues[k]).epsilon(1e-13));
  CHECK(e.estimate_sum(5) == doctest::Approx(r.estimate_sum(5)).epsilon(1e-6));
}

TEST_CASE("argument errors") {
  const PotentialSpec q = potentials::make_gauss(1.0, 1.0);
  CHECK_THROWS_AS(solve(q, 0), std::invalid_argument);
  SolverOptions options;
  options.basis_size = 4;
  CHECK_THROWS_AS(solve(q, 5, options), std::invalid_argument);
  options.basis_size = 2000;
  CHECK_THROWS_AS(solve(q, 5, options), std::invalid_argument);
  CHECK_THROWS_AS(ritz_values_reduced(potentials::make_meanzero(1.0), 200, 3,
                                      default_quadrature(potentials::make_meanzero(1.0), 200)),
                  std::invalid_argument);
  CHECK_THROWS_AS(fd_oracle(q, 12.0, 1, 1), std::invalid_argument);
}

TEST_CASE("huge entries are reported") {
  const PotentialSpec q = potentials::make_box(1e13, 1.0);
  const GalerkinProblem p = assemble(q, 10, default_quadrature(q, 10));
  CHECK_FALSE(p.warnings.empty());
}

TEST_CASE("non-negative q raises every eigenvalue") {
  for (const char* text : {"gauss(a=1,s=1)", "box(k=1,d=0.1)", "sech2(a=0.2,s=3)"}) {
    const PotentialSpec q = potentials::parse(text);
    const auto values = ritz_values(assemble(q, 120, default_quadrature(q, 120)), 40);
    for (int k = 0; k < 40; ++k) CHECK(values[std::size_t(k)] >= 2.0 * k + 1.0);
  }
}

TEST_CASE("gauss ground state at N = 120") {
  const PotentialSpec q = potentials::make_gauss(1.0, 1.0);
  const auto values = ritz_values(assemble(q, 120, default_quadrature(q, 120)), 1);
  const FdResult fd = fd_oracle(q, 12.0, 4000, 1);
  CHECK(std::abs(values[0] - fd.extrapolated[0]) < 1e-6);
  CHECK(std::abs(values[0] - fd.eigenvalues[0]) < 1e-5);
}
