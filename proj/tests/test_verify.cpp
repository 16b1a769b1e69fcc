#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "fbgain/verify.hpp"

using namespace fbgain;
using namespace fbgain::verify;
using doctest::Approx;

namespace {

void require_pass(const BoundReport& r) {
  INFO(format_report_line(r));
  CHECK(r.passed());
  CHECK(r.samples > 0);
  CHECK(std::isfinite(r.worst_slack));
  CHECK(r.worst_slack >= -r.slop);
}

}  // namespace

TEST_CASE("report bookkeeping") {
  BoundReport r("demo");
  r.add(0.5, {"a", "2", 1.0, 1.0});
  r.add(-1e-12, {"b", "2", 1.0, 1.0});
  CHECK(r.passed());
  CHECK(r.worst_slack == -1e-12);
  CHECK(r.witness.inequality == "b");
  r.add(-1e-3, {"c", "3", 2.0, 1.5});
  CHECK_FALSE(r.passed());
  CHECK(r.violations == 1);
  CHECK(r.samples == 3);
  CHECK(r.witness.inequality == "c");

  BoundReport aborted("aborted");
  aborted.fail("boom");
  CHECK_FALSE(aborted.passed());
  CHECK(aborted.error.value() == "boom");
}

TEST_CASE("sampling is deterministic and log-uniform within range") {
  SampleSpec spec;
  spec.n_samples = 5000;
  const auto a = draw_samples(spec);
  const auto b = draw_samples(spec);
  REQUIRE(a.size() == 5000);
  std::int64_t small_k = 0;
  std::int64_t small_p = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].K == b[i].K);
    CHECK(a[i].P == b[i].P);
    CHECK(a[i].K >= 2);
    CHECK(a[i].K <= 10000);
    CHECK(a[i].P >= 1e-3);
    CHECK(a[i].P <= 1e3);
    small_k += a[i].K < 100 ? 1 : 0;
    small_p += a[i].P < 1.0 ? 1 : 0;
  }
  // log-uniform: about ln(100/2)/ln(10001/2) = 46% of K below 100, half of P below 1.
  CHECK(small_k == doctest::Approx(0.46 * 5000).epsilon(0.1));
  CHECK(small_p == doctest::Approx(0.5 * 5000).epsilon(0.1));

  spec.seed = 43;
  CHECK(draw_samples(spec)[0].P != a[0].P);
  spec.n_samples = 0;
  CHECK_THROWS_AS(draw_samples(spec), std::domain_error);
}

TEST_CASE("point bounds hold at the root") {
  require_pass(check_point_bounds(2, 1.0));
  require_pass(check_point_bounds(100, 1.0));
  require_pass(check_point_bounds(3, 10.0));
  CHECK(solve_lambda_star(100, 1.0).lambda_star == Approx(6.31).epsilon(0.1));
}

TEST_CASE("point bounds fail off the root") {
  const double root = solve_lambda_star(100, 1.0).lambda_star;
  BoundReport r("perturbed");
  add_point_bounds(r, 100, 1.0, root + 0.5);
  CHECK_FALSE(r.passed());
  CHECK(r.witness.inequality == "lambda-sandwich-right");
}

TEST_CASE("sampled point bounds and large-K sandwich") {
  SampleSpec spec;
  spec.n_samples = 2000;
  spec.seed = 3;
  require_pass(check_sampled_point_bounds(spec));
  require_pass(check_large_k_sandwich());
}

TEST_CASE("tail bounds") {
  require_pass(check_tail_bounds());

  const double F_small = solve_lambda_massive(0.1).gain_F;
  CHECK(F_small == Approx(1.048).epsilon(0.001 / 1.048));
  CHECK(F_small <= 11.0 / 9.0);

  const double F_large = solve_lambda_massive(1000.0).gain_F;
  CHECK(F_large == Approx(1.320).epsilon(0.001 / 1.32));
  CHECK(F_large <= kTailBound);

  const double pi = 1e-6;
  CHECK(solve_lambda_massive(pi).gain_F <= (1 + pi) / (1 - pi));
}

TEST_CASE("derivative check") {
  const std::vector<double> grid = {0.5, 1.0, 1000.0};
  const BoundReport r = check_derivative(grid);
  require_pass(r);
  CHECK(r.samples == 6);
}

TEST_CASE("monotone and unimodal curves") {
  const std::vector<UserCount> all = {UserCount::finite(2), UserCount::finite(3), UserCount::finite(10),
                                      UserCount::finite(100), UserCount::massive()};
  require_pass(check_monotone_unimodal(all, -10.0, 30.0, 0.1));

  const std::vector<UserCount> single = {UserCount::finite(2)};
  require_pass(check_monotone_unimodal(single, -10.0, 30.0, 0.1));

  // A range that stops before the peak has its maximum at the edge.
  const std::vector<UserCount> massive = {UserCount::massive()};
  const BoundReport rising = check_monotone_unimodal(massive, -10.0, 5.0, 0.1);
  CHECK_FALSE(rising.passed());
  CHECK(rising.witness.inequality == "edges-below-peak");
}

TEST_CASE("Thomas and improved bounds") {
  SampleSpec spec;
  spec.n_samples = 10000;
  const BoundReport r = check_thomas_and_improved(spec);
  require_pass(r);
  CHECK(r.samples == 30000);
  require_pass(check_massive_witness());
  require_pass(check_massive_consistency());
}

TEST_CASE("suite") {
  SampleSpec smoke;
  smoke.seed = 7;
  smoke.n_samples = 10;
  const auto start = std::chrono::steady_clock::now();
  const auto reports = run_suite(smoke);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(all_passed(reports));
  CHECK(seconds < 1.0);
  for (const auto& r : reports) require_pass(r);

  const auto again = run_suite(smoke);
  REQUIRE(again.size() == reports.size());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    CHECK(format_report_line(again[i]) == format_report_line(reports[i]));
  }

  SolverSettings sabotaged;
  sabotaged.fault = FaultInjection::negate_residual;
  const auto broken = run_suite(smoke, sabotaged);
  CHECK_FALSE(all_passed(broken));
}

TEST_CASE("report line format") {
  BoundReport r("example");
  r.add(0.25, {"F-below-2", "inf", 5.38, 1.5});
  const std::string line = format_report_line(r);
  CHECK(line == "example samples=1 violations=0 worst_slack=0.25 witness=\"F-below-2 K=inf pi=5.38 lambda=1.5\" status=pass");
}
