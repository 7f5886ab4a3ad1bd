#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "hosc/cli.hpp"
#include "hosc/potentials.hpp"
#include "hosc/sequences.hpp"
#include "hosc/special.hpp"

using namespace hosc;
using namespace hosc::cli;

namespace {

RunConfig config_for(Command c) {
  RunConfig config;
  config.command = c;
  return config;
}

int count_lines(const std::string& text) {
  int lines = 0;
  for (char ch : text) lines += ch == '\n';
  return lines;
}

}  // namespace

TEST_CASE("ten significant digits") {
  CHECK(format10(std::sqrt(std::numbers::pi)) == "1.772453851");
  CHECK(format10(-10.0) == "-10");
  CHECK(format10(0.1) == "0.1");
  CHECK(format10(1e-8) == "1e-08");
  CHECK(format10(-0.0) == "0");
  CHECK(format10(123456789012.0) == "1.23456789e+11");
  CHECK(round10(1.23456789012345) == 1.23456789);
  CHECK(format10(std::nan("")) == "nan");
}

TEST_CASE("sequences table") {
  RunConfig config = config_for(Command::sequences);
  config.n_max = 2;
  const Report r = cmd_sequences(config);
  CHECK(r.rows.size() == 4u);
  const std::string csv = render_csv(r);
  CHECK(count_lines(csv) == 5);
  CHECK(csv.rfind("n,omega,chi,epsilon,tau,chi_residual\n", 0) == 0);
  CHECK(r.rows[0]["omega"].get<double>() == round10(std::sqrt(std::numbers::pi)));
  CHECK(std::abs(r.rows[0]["omega"].get<double>() - 1.7724538509) < 5e-10);
  CHECK(r.rows[3]["n"] == "-Z0(1/2)");
  CHECK(r.rows[3]["chi"].get<double>() == round10(-special::z0(0.5)));
  CHECK(std::abs(r.rows[3]["chi"].get<double>() - 0.42772793269) < 5e-10);
  CHECK(r.ok);
}

TEST_CASE("verify rows and skips") {
  RunConfig config = config_for(Command::verify);
  config.potential = "gauss(a=1,s=1)";
  config.n_max = 4;
  Report r = cmd_verify(config);
  CHECK(r.ok);
  int thm41 = 0;
  for (const auto& row : r.rows) {
    CHECK(row["verdict"] != "fail");
    CHECK(row["verdict"] != "error");
    if (row["theorem"] == "thm41") ++thm41;
    if (row["theorem"] == "powerzeromean") CHECK(row["verdict"] == "skipped");
  }
  CHECK(thm41 == 5);

  config.potential = "meanzero(a=0.3)";
  r = cmd_verify(config);
  CHECK(r.ok);
  int skipped31 = 0;
  int passed41 = 0;
  int passedzm = 0;
  for (const auto& row : r.rows) {
    if (row["theorem"] == "thm31") {
      CHECK(row["verdict"] == "skipped");
      CHECK(row["note"].get<std::string>().find("skipped: hypothesis") == 0);
      ++skipped31;
    }
    if (row["theorem"] == "thm41" && row["verdict"] == "pass") ++passed41;
    if (row["theorem"] == "powerzeromean" && row["verdict"] == "pass") ++passedzm;
  }
  CHECK(skipped31 == 1);
  CHECK(passed41 == 5);
  CHECK(passedzm == 15);
}

TEST_CASE("verify emits rows in (theorem, n, s) order") {
  RunConfig config = config_for(Command::verify);
  config.potential = "sech2(a=1,s=1)";
  config.n_max = 3;
  config.s_values = {2.0, 0.5};
  const Report r = cmd_verify(config);
  const std::vector<std::string> order{"thm31", "thm41", "thm51", "cor53", "power1", "power1a", "powerzeromean"};
  auto rank = [&](const std::string& t) { return std::find(order.begin(), order.end(), t) - order.begin(); };
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    const auto& a = r.rows[i - 1];
    const auto& b = r.rows[i];
    const auto ra = rank(a["theorem"].get<std::string>());
    const auto rb = rank(b["theorem"].get<std::string>());
    CHECK(ra <= rb);
    if (ra == rb) {
      CHECK(a["n"].get<int>() <= b["n"].get<int>());
      if (a["n"] == b["n"]) CHECK(a["s"].get<double>() < b["s"].get<double>());
    }
  }
}

TEST_CASE("verify rejects bad input") {
  RunConfig config = config_for(Command::verify);
  config.potential = "box(k=-1,d=0.1)";
  CHECK_THROWS(cmd_verify(config));
  std::ostringstream out;
  std::ostringstream err;
  CHECK(execute(config, out, err) == kExitUsage);
  CHECK(err.str().find("box") != std::string::npos);
  config.potential.reset();
  CHECK(execute(config, out, err) == kExitUsage);
  config.potential = "gauss(a=1,s=1)";
  config.tol = 0.0;
  CHECK(execute(config, out, err) == kExitUsage);
}

TEST_CASE("coefficient checks stop at n = 50") {
  RunConfig config = config_for(Command::verify);
  config.potential = "gauss(a=1,s=1)";
  config.n_max = 51;
  config.s_values = {1.0};
  const Report r = cmd_verify(config);
  CHECK(r.ok);
  bool saw_limit = false;
  for (const auto& row : r.rows)
    if (row["theorem"] == "cor53" && row["n"] == 51) saw_limit = row["verdict"] == "skipped";
  CHECK(saw_limit);
}

TEST_CASE("trace of the zero potential is zero") {
  RunConfig config = config_for(Command::trace);
  config.potential = "zero()";
  config.n_max = 5;
  const Report r = cmd_trace(config);
  for (const auto& row : r.rows)
    for (const char* column : {"regularized_sum", "rhs_chi", "trace_target", "gap_to_target"})
      CHECK(row[column].get<double>() == 0.0);
}

TEST_CASE("trace rejects sign-changing q") {
  RunConfig config = config_for(Command::trace);
  config.potential = "meanzero(a=1)";
  std::ostringstream out;
  std::ostringstream err;
  CHECK(execute(config, out, err) == kExitUsage);
}

TEST_CASE("trace for box(1, 0.5) up to n = 40") {
  RunConfig config = config_for(Command::trace);
  config.potential = "box(k=1,d=0.5)";
  config.n_max = 40;
  const Report r = cmd_trace(config);
  REQUIRE(r.rows.size() == 41u);
  const double I = potentials::integral(potentials::parse(*config.potential));
  const sequences::SequenceTable t = sequences::build_table(40);
  std::vector<double> gap;
  for (int n = 0; n <= 40; ++n) {
    const auto& row = r.rows[std::size_t(n)];
    CHECK(row["rhs_chi"].get<double>() == round10(t.chi[std::size_t(n)] * I / std::numbers::pi));
    CHECK(row["trace_target"].get<double>() == round10(t.minus_z0_half * I / std::numbers::pi));
    CHECK(row["regularized_sum"].get<double>() <= row["rhs_chi"].get<double>());
    gap.push_back(std::abs(row["gap_to_target"].get<double>()));
  }
  // the sums alternate with the parity of n; each parity decreases in the tail
  for (int n = 26; n <= 40; ++n) CHECK(gap[std::size_t(n)] < gap[std::size_t(n - 2)]);
  for (int n = 25; n <= 39; n += 2) CHECK(std::max(gap[std::size_t(n)], gap[std::size_t(n + 1)]) <
                                          std::max(gap[std::size_t(n - 2)], gap[std::size_t(n - 1)]));
}

TEST_CASE("counterexample reports") {
  RunConfig config = config_for(Command::counterexample);
  config.n = 0;
  config.N = 1.0;
  Report r = cmd_counterexample(config);
  CHECK(r.ok);
  const auto& result = r.rows.back();
  CHECK(result["kind"] == "result");
  CHECK(result["K"].get<double>() >= round10(8.0 * std::numbers::pi));
  CHECK(result["regularized_sum"].get<double>() <= -1.0);

  config.n = 2;
  config.N = 10.0;
  r = cmd_counterexample(config);
  CHECK(r.ok);
  CHECK(r.rows.back()["regularized_sum"].get<double>() <= -10.0);
  CHECK(r.rows.back()["verdict"] == "pass");
}

TEST_CASE("hermite check passes") {
  const Report r = cmd_hermite_check(config_for(Command::hermite_check));
  CHECK(r.ok);
  CHECK(r.rows.size() == 10u);
  for (const auto& row : r.rows) {
    CHECK(row["verdict"] == "pass");
    CHECK(row["max_residual"].get<double>() < 1e-8);
  }
}

TEST_CASE("reports are deterministic") {
  RunConfig config = config_for(Command::verify);
  config.potential = "gauss(a=2,s=0.5)";
  config.n_max = 6;
  config.format = Format::json;
  const std::string a = render(run(config), Format::json);
  const std::string b = render(run(config), Format::json);
  CHECK(a == b);
  CHECK(a.find("\"rows\"") != std::string::npos);
  CHECK(a.find("\"meta\"") != std::string::npos);
  const auto doc = nlohmann::json::parse(a);
  CHECK(doc["meta"]["config"]["n_max"] == 6);
  CHECK(doc["meta"]["version"].is_string());
}

TEST_CASE("csv quoting") {
  Report r;
  r.columns = {"a", "b", "c"};
  r.rows.push_back({{"a", "x,y"}, {"b", "say \"hi\""}, {"c", nullptr}});
  CHECK(render_csv(r) == "a,b,c\n\"x,y\",\"say \"\"hi\"\"\",\n");
}

TEST_CASE("output errors name the path") {
  RunConfig config = config_for(Command::sequences);
  config.out = "/nonexistent-dir/table.csv";
  std::ostringstream out;
  std::ostringstream err;
  CHECK(execute(config, out, err) == kExitUsage);
  CHECK(err.str().find("/nonexistent-dir/table.csv") != std::string::npos);
}
