#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hosc/bounds.hpp"
#include "hosc/sequences.hpp"

using namespace hosc;
using namespace hosc::bounds;
using potentials::PotentialSpec;

namespace {

const double kPi = std::numbers::pi;

const solver::EigenResult& cached(const char* text, int n_max) {
  static std::map<std::string, solver::EigenResult> cache;
  const std::string key = std::string(text) + "/" + std::to_string(n_max);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, solve_for(potentials::parse(text), n_max)).first;
  return it->second;
}

}  // namespace

TEST_CASE("regularized sum") {
  const std::vector<double> bare{1.0, 3.0, 5.0, 7.0};
  for (int n = 0; n < 4; ++n) CHECK(regularized_sum(bare, 0.0, n) == 0.0);
  CHECK(regularized_sum({1.5}, kPi, 0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK_THROWS_AS(regularized_sum({1.0}, 0.0, 1), std::invalid_argument);
}

TEST_CASE("regularized sum regression against finite differences") {
  // value from the Richardson-extrapolated grid oracle, M = 16000 on [-12, 12]
  const auto& eig = cached("gauss(a=1,s=0.5)", 10);
  CHECK(std::abs(regularized_sum(eig.eigenvalues, potentials::integral(potentials::make_gauss(1.0, 0.5)), 10) -
                 0.107331613804) < 1e-6);
}

TEST_CASE("verdict tolerance") {
  CHECK(verdict_tolerance({1.0}, {0.0}) == 1e-8);
  CHECK(verdict_tolerance({1.0, 2.0}, {1e-6, 1e-6}) == doctest::Approx(6e-6));
}

TEST_CASE("thm31 sum bound") {
  SUBCASE("zero perturbation") {
    const PotentialSpec q = potentials::make_zero();
    const auto eig = solve_for(q, 5);
    for (int n = 0; n <= 5; ++n) {
      const BoundReport r = check_thm31(q, n, eig);
      CHECK(r.lhs == 0.0);
      CHECK(r.rhs == 0.0);
      CHECK(r.verdict);
    }
  }
  SUBCASE("presets hold with the Rayleigh sum in between") {
    for (const char* text : {"gauss(a=1,s=1)", "gauss(a=2,s=0.5)", "sech2(a=1,s=1)", "gauss(a=2,s=1)"}) {
      const PotentialSpec q = potentials::parse(text);
      const auto& eig = cached(text, 30);
      for (int n = 0; n <= 30; ++n) {
        const BoundReport r = check_thm31(q, n, eig);
        CHECK(r.verdict);
        CHECK(r.slack > 0.0);
        CHECK(r.slack == r.rhs - r.lhs);
        const double mid = r.diagnostics.at("intermediate");
        CHECK(r.lhs <= mid + r.inputs.verdict_tol);
        CHECK(mid <= r.rhs);
        CHECK(r.inputs.potential == q.to_string());
      }
    }
  }
  SUBCASE("box against finite differences") {
    const PotentialSpec q = potentials::make_box(1.0, 0.1);
    const auto& eig = cached("box(k=1,d=0.1)", 30);
    for (int n = 0; n <= 30; ++n) CHECK(check_thm31(q, n, eig).verdict);
    // extrapolated grid oracle, M = 32000; Ritz values sit above by the basis error
    const std::pair<int, double> frozen[] = {{0, 0.154707798696}, {10, 0.073530453404}, {30, 0.070991647377}};
    for (auto [n, value] : frozen) {
      const BoundReport r = check_thm31(q, n, eig);
      CHECK(r.lhs >= value - 1e-6);
      CHECK(r.lhs - value < 2e-5);
    }
  }
  SUBCASE("rejects indefinite q") {
    const auto eig = solve_for(potentials::make_meanzero(1.0), 3);
    CHECK_THROWS_AS(check_thm31(potentials::make_meanzero(1.0), 0, eig), HypothesisError);
    CHECK_THROWS_AS(check_thm31(potentials::make_gauss(1.0, 1.0), 4, cached("gauss(a=1,s=1)", 3)),
                    std::invalid_argument);
  }
}

TEST_CASE("scaling of the thm31 bound") {
  const PotentialSpec q = potentials::make_gauss(1.0, 1.0);
  const auto& eig = cached("gauss(a=1,s=1)", 30);
  const BoundReport base = check_thm31(q, 10, eig);
  for (double t : {1.0, 0.5, 0.25}) {
    const PotentialSpec tq = potentials::scaled(q, t);
    const BoundReport r = check_thm31(tq, 10, solve_for(tq, 10));
    CHECK(r.rhs == t * base.rhs);
    CHECK(std::isfinite(r.slack));
    CHECK(r.verdict);
  }
  const PotentialSpec tq = potentials::scaled(q, 0.3);
  CHECK(check_thm31(tq, 10, solve_for(tq, 10)).rhs == doctest::Approx(0.3 * base.rhs).epsilon(1e-15));
}

TEST_CASE("thm41 bound with q_m") {
  SUBCASE("reduces to thm31 for q >= 0") {
    const PotentialSpec q = potentials::make_sech2(1.0, 1.0);
    const auto& eig = cached("sech2(a=1,s=1)", 30);
    for (int n = 0; n <= 30; n += 3) {
      const BoundReport a = check_thm31(q, n, eig);
      const BoundReport b = check_thm41(q, n, eig);
      CHECK(a.lhs == b.lhs);
      CHECK(a.rhs == b.rhs);
      CHECK(a.slack == b.slack);
      CHECK(b.diagnostics.at("q_m") == 0.0);
    }
  }
  SUBCASE("mean-zero presets") {
    for (double a : {0.3, 1.0}) {
      const PotentialSpec q = potentials::make_meanzero(a);
      const auto eig = solve_for(q, 30);
      for (int n = 0; n <= 30; ++n) {
        const BoundReport r = check_thm41(q, n, eig);
        CHECK(r.verdict);
        CHECK(std::abs(r.diagnostics.at("q_m") - a) < 1e-9);
        CHECK(r.rhs == doctest::Approx(sequences::epsilon(n) * a / std::sqrt(kPi)).epsilon(1e-12));
      }
    }
  }
  SUBCASE("mean-zero regression against finite differences") {
    // extrapolated grid oracle, M = 16000
    const auto eig = solve_for(potentials::make_meanzero(0.3), 30);
    const std::pair<int, double> frozen[] = {{0, -0.110282007524}, {10, -0.020170783944}, {30, -0.011744635009}};
    for (auto [n, value] : frozen) CHECK(std::abs(check_thm41(potentials::make_meanzero(0.3), n, eig).lhs - value) < 1e-6);
  }
  SUBCASE("unbounded q_m propagates") {
    const PotentialSpec q = potentials::make_gauss(-0.5, 2.0);
    CHECK_THROWS_AS(check_thm41(q, 0, solve_for(q, 0)), potentials::UnboundedError);
  }
}

TEST_CASE("thm51 coefficient bound") {
  SUBCASE("pure oscillator is an equality") {
    potentials::FullPotential v;
    const auto eig = solve_for(v.q, 15);
    for (int n = 0; n <= 15; ++n) {
      const BoundReport r = check_thm51(v, n, eig);
      CHECK(std::abs(r.lhs - (n + 1.0) * (n + 1.0)) < 1e-10);
      CHECK(std::abs(r.rhs - (n + 1.0) * (n + 1.0)) < 1e-10);
      CHECK(r.verdict);
    }
    CHECK(check_thm51(v, 0, eig).rhs == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("gauss perturbation") {
    potentials::FullPotential v;
    v.q = potentials::make_gauss(1.0, 1.0);
    const auto& eig = cached("gauss(a=1,s=1)", 30);
    for (int n = 0; n <= 15; ++n) CHECK(check_thm51(v, n, eig).verdict);
  }
  SUBCASE("constant offset") {
    potentials::FullPotential v;
    v.constant = 2.0;
    v.q = potentials::make_sech2(0.5, 1.0);
    solver::SolverOptions options;
    options.shift = 2.0;
    const auto eig = solve_for(v.q, 15, options);
    for (int n = 0; n <= 15; ++n) CHECK(check_thm51(v, n, eig).verdict);
    v.harmonic = 2.0;
    CHECK_THROWS_AS(check_thm51(v, 0, eig), std::invalid_argument);
  }
}

TEST_CASE("cor53 coefficient bound") {
  SUBCASE("zero perturbation") {
    const PotentialSpec q = potentials::make_zero();
    const auto eig = solve_for(q, 15);
    for (int n = 0; n <= 15; ++n) {
      const BoundReport r = check_cor53(q, n, eig);
      CHECK(r.lhs == 0.0);
      CHECK(std::abs(r.rhs) < 1e-12);
    }
  }
  SUBCASE("chain for q >= 0") {
    for (auto [text, n_max] : {std::pair{"gauss(a=1,s=1)", 15}, std::pair{"box(k=1,d=0.2)", 10},
                               std::pair{"gauss(a=2,s=0.5)", 15}}) {
      const PotentialSpec q = potentials::parse(text);
      const auto eig = solve_for(q, n_max);
      for (int n = 0; n <= n_max; ++n) {
        const BoundReport r = check_cor53(q, n, eig);
        CHECK(r.verdict);
        CHECK(r.diagnostics.at("chain_ok") == 1.0);
        CHECK(r.rhs <= r.diagnostics.at("thm31_rhs") + 1e-8);
        // the right side equals the regularized sum of Rayleigh quotients
        CHECK(std::abs(r.rhs - check_thm31(q, n, eig).diagnostics.at("intermediate")) < 1e-8);
      }
    }
  }
  SUBCASE("indefinite q has no chain diagnostic") {
    const PotentialSpec q = potentials::make_meanzero(1.0);
    const BoundReport r = check_cor53(q, 5, solve_for(q, 5));
    CHECK(r.verdict);
    CHECK(r.diagnostics.count("chain_ok") == 0);
  }
}

TEST_CASE("power bound (11)") {
  SUBCASE("equal gaps give equality") {
    for (double s : {0.5, 1.0, 2.0}) {
      const int n = 6;
      const double I = 3.0;
      const double c = sequences::omega(n) * I / ((n + 1.0) * kPi);
      std::vector<double> lambdas;
      for (int k = 0; k <= n; ++k) lambdas.push_back(2.0 * k + 1.0 + c);
      const BoundReport r = check_power1(I, n, s, lambdas);
      CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-12));
      CHECK(r.verdict);
    }
  }
  SUBCASE("presets") {
    const PotentialSpec q = potentials::make_gauss(1.0, 1.0);
    const auto& eig = cached("gauss(a=1,s=1)", 30);
    for (double s : {0.5, 1.0, 2.0}) {
      const BoundReport r = check_power1(q, 10, s, eig);
      CHECK(r.verdict);
      CHECK(r.slack == r.lhs - r.rhs);
      CHECK(r.slack > 0.0);
    }
    for (int n = 0; n <= 30; ++n) CHECK(check_power1(potentials::make_box(1.0, 0.1), n, 1.0, cached("box(k=1,d=0.1)", 30)).verdict);
  }
  SUBCASE("small exponent") {
    const BoundReport r = check_power1(potentials::make_gauss(1.0, 1.0), 10, 1e-8, cached("gauss(a=1,s=1)", 30));
    CHECK(std::abs(r.lhs - 1.0) < 1e-6);
    CHECK(std::abs(r.rhs - 1.0) < 1e-6);
  }
  SUBCASE("degenerate gaps") {
    CHECK_THROWS_AS(check_power1(1.0, 1, 1.0, {1.5, 3.0}), HypothesisError);
    CHECK_THROWS_AS(check_power1(0.0, 1, 1.0, {1.5, 3.5}), HypothesisError);
    CHECK_THROWS_AS(check_power1(1.0, 1, 0.0, {1.5, 3.5}), std::invalid_argument);
  }
}

TEST_CASE("power bound (1a1)") {
  SUBCASE("zero perturbation") {
    const PotentialSpec q = potentials::make_zero();
    const auto eig = solve_for(q, 10);
    for (double s : {0.5, 1.0, 2.0}) {
      const BoundReport r = check_power1a(q, 10, s, eig);
      double expected = 0.0;
      for (int k = 0; k <= 10; ++k) expected += std::pow(2.0 * k + 1.0, -s);
      CHECK(r.lhs == doctest::Approx(expected).epsilon(1e-14));
      CHECK(r.rhs == doctest::Approx(expected).epsilon(1e-14));
      CHECK(r.verdict);
    }
  }
  SUBCASE("box") {
    const PotentialSpec q = potentials::make_box(1.0, 0.1);
    for (int n = 0; n <= 20; ++n) {
      const BoundReport r = check_power1a(q, n, 1.0, cached("box(k=1,d=0.1)", 30));
      CHECK(r.verdict);
      CHECK(r.diagnostics.at("comparison_monotone") == 1.0);
      CHECK(r.diagnostics.at("partial_sums_ok") == 1.0);
    }
  }
  SUBCASE("gauss(5,1): bound holds, comparison sequence dips at k = 1") {
    const PotentialSpec q = potentials::make_gauss(5.0, 1.0);
    const auto eig = solve_for(q, 20);
    for (int n = 0; n <= 20; ++n) {
      const BoundReport r = check_power1a(q, n, 2.0, eig);
      CHECK(r.verdict);
      CHECK(r.diagnostics.at("comparison_monotone") == (n == 0 ? 1.0 : 0.0));
    }
    // c_1 - c_0 = 2 - (3 / (4 sqrt(pi))) int q turns negative above int q = 8 sqrt(pi) / 3
    const double I = potentials::integral(q);
    CHECK(2.0 - 0.75 * I / std::sqrt(kPi) < 0.0);
  }
  SUBCASE("hypothesis") {
    const PotentialSpec q = potentials::make_gauss(40.0, 1.0);
    CHECK_THROWS_AS(check_power1a(q, 0, 1.0, solve_for(q, 0)), HypothesisError);
    const PotentialSpec m = potentials::make_meanzero(0.5);
    CHECK_THROWS_AS(check_power1a(m, 0, 1.0, solve_for(m, 0)), HypothesisError);
  }
}

TEST_CASE("zero-mean power bound") {
  SUBCASE("zero perturbation is an equality") {
    const PotentialSpec q = potentials::make_zero();
    const auto eig = solve_for(q, 10);
    for (double s : {0.5, 1.0, 2.0}) {
      const BoundReport r = check_powerzeromean(q, 10, s, eig);
      CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-14));
      CHECK(r.verdict);
      // the form with leading factor (s + 1) overshoots by s sum (2k+1)^{-s}
      CHECK(r.diagnostics.at("rhs_as_printed") - r.lhs == doctest::Approx(s * r.lhs).epsilon(1e-13));
    }
  }
  SUBCASE("presets") {
    for (auto [a, s] : {std::pair{0.3, 1.0}, std::pair{1.0, 0.5}, std::pair{0.3, 2.0}}) {
      const PotentialSpec q = potentials::make_meanzero(a);
      const auto eig = solve_for(q, 20);
      for (int n = 0; n <= 20; ++n) {
        const BoundReport r = check_powerzeromean(q, n, s, eig);
        CHECK(r.verdict);
        CHECK(r.diagnostics.at("q_m") == doctest::Approx(a).epsilon(1e-9));
      }
    }
  }
  SUBCASE("hypotheses") {
    const PotentialSpec q = potentials::make_gauss(1.0, 1.0);
    CHECK_THROWS_AS(check_powerzeromean(q, 0, 1.0, cached("gauss(a=1,s=1)", 30)), HypothesisError);
    solver::EigenResult negative;
    negative.eigenvalues = {-0.5, 3.0};
    negative.convergence_estimate = {0.0, 0.0};
    CHECK_THROWS_AS(check_powerzeromean(potentials::make_meanzero(1.0), 1, 1.0, negative), HypothesisError);
  }
}

TEST_CASE("power transform") {
  SUBCASE("equality case") {
    std::vector<double> a;
    for (int k = 0; k <= 12; ++k) a.push_back(2.0 * k + 1.0);
    for (double s : {0.5, 1.0, 2.0}) {
      const TransformResult t = power_transform(a, a, a, 12, s);
      CHECK(t.lhs == doctest::Approx(t.bound).epsilon(1e-14));
      CHECK(t.maximized == doctest::Approx(t.lhs).epsilon(1e-14));
    }
  }
  SUBCASE("seeded fuzz") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> step(0.05, 3.0);
    std::uniform_real_distribution<double> expo(0.05, 4.0);
    std::uniform_int_distribution<int> length(1, 40);
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = length(rng) - 1;
      std::vector<double> a;
      double x = step(rng);
      for (int k = 0; k <= n; ++k, x += step(rng)) a.push_back(x);
      std::shuffle(a.begin(), a.end(), rng);
      std::vector<double> c = a;
      std::vector<double> b = a;
      std::sort(b.begin(), b.end());
      const double s = expo(rng);
      // arbitrary non-decreasing b with c = a
      const TransformResult t = power_transform(a, b, c, n, s);
      CHECK(t.slack >= -1e-12 * std::abs(t.lhs));
      // b = c when c is non-decreasing
      std::sort(a.begin(), a.end());
      const TransformResult u = power_transform(a, a, a, n, s);
      CHECK(u.slack == doctest::Approx(0.0).epsilon(1e-12).scale(u.lhs));
    }
  }
  SUBCASE("b = c maximizes the bound") {
    std::vector<double> c;
    for (int k = 0; k <= 10; ++k) c.push_back(std::pow(1.5, k));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> factor(0.9, 1.1);
    for (double s : {0.5, 1.0, 2.0}) {
      const TransformResult best = power_transform(c, c, c, 10, s);
      for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> b;
        for (double v : c) b.push_back(v * factor(rng));
        CHECK(power_transform(c, b, c, 10, s).bound <= best.bound + 1e-14);
      }
    }
  }
  SUBCASE("hypothesis violations name the index") {
    const std::vector<double> ok{1.0, 2.0, 3.0};
    auto message = [](auto&& f) {
      try {
        f();
      } catch (const HypothesisError& e) {
        return std::string(e.what());
      }
      return std::string();
    };
    CHECK(message([&] { power_transform({1.0, -1.0, 3.0}, ok, {1.0, 2.0, 5.0}, 2, 1.0); }).find("index 1") !=
          std::string::npos);
    CHECK(message([&] { power_transform(ok, {1.0, 3.0, 2.0}, ok, 2, 1.0); }).find("index 2") != std::string::npos);
    CHECK(message([&] { power_transform({1.0, 3.0, 3.0}, ok, ok, 2, 1.0); }).find("index 1") != std::string::npos);
  }
}

TEST_CASE("counterexample") {
  CHECK(odd_shift_constant(0) == 2.0);
  CHECK(odd_shift_constant(2) == 12.0);
  CHECK(counterexample_height(0, 1.0) == doctest::Approx(2.0 * 4.0 * kPi).epsilon(1e-14));
  const Counterexample c = counterexample(2, 10.0);
  CHECK(c.found);
  CHECK(c.report.theorem == TheoremId::prop34);
  CHECK(c.report.lhs <= -10.0);
  CHECK(c.report.verdict);
  CHECK(potentials::certified_nonnegative(c.potential));
  CHECK(potentials::integral(c.potential) == doctest::Approx(c.K).epsilon(1e-14));
  CHECK(c.attempts.back().delta == c.report.diagnostics.at("delta"));
  const Counterexample small = counterexample(0, 1.0);
  CHECK(small.found);
  CHECK(small.report.lhs <= -1.0);
}
