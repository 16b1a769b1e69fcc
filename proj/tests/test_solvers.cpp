#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fbgain/solvers.hpp"
#include "oracles.hpp"

using namespace fbgain;
using doctest::Approx;

namespace {

// Sign-scan oracle (10^7 cells over [1, 3], bisection to 1e-9) for K=3, P=10.
constexpr double kOracleLambdaK3P10 = 2.3055011808593751;
// Grid oracle (1e-3 dB over [-10, 30] dB) for the K=2 capacity gain peak.
constexpr double kOraclePeakK2Db = 7.104;
constexpr double kOraclePeakK2F = 1.1903994330171221;

void check_solution_invariants(const GainSolution& s, const SolverSettings& settings) {
  CHECK(std::abs(s.residual) <= settings.residual_tol);
  CHECK(s.lambda_star >= 1.0);
  if (!s.config.users.is_massive()) {
    CHECK(s.lambda_star <= static_cast<double>(s.config.users.count()));
  }
  CHECK(s.capacity_fb >= s.capacity_nofb);
  CHECK(s.gain_F >= 1.0);
  CHECK(s.gain_F < 2.0);
}

}  // namespace

TEST_CASE("settings validation") {
  SolverSettings s;
  CHECK_NOTHROW(s.validate());
  s.max_iter = 0;
  CHECK_THROWS_AS(s.validate(), std::domain_error);
  s = {};
  s.lambda_tol = 0.0;
  CHECK_THROWS_AS(solve_lambda_star(2, 1.0, s), std::domain_error);
}

TEST_CASE("finite-K root") {
  const SolverSettings settings;

  SUBCASE("vanishing power") {
    const GainSolution s = solve_lambda_star(2, 1e-9, settings);
    CHECK(s.lambda_star == Approx(1.0).epsilon(1e-6));
    check_solution_invariants(s, settings);
  }
  SUBCASE("K=100, P=1") {
    const GainSolution s = solve_lambda_star(100, 1.0, settings);
    CHECK(to_db(s.lambda_star) == Approx(8.0).epsilon(0.3 / 8.0));
    CHECK(s.gain_F == Approx(1.4).epsilon(0.03 / 1.4));
    check_solution_invariants(s, settings);
  }
  SUBCASE("K=3, P=10 against the sign-scan oracle") {
    const GainSolution s = solve_lambda_star(3, 10.0, settings);
    CHECK(std::abs(s.lambda_star - kOracleLambdaK3P10) <= 1e-8);
    check_solution_invariants(s, settings);
  }
  SUBCASE("raw and balanced forms vanish at the root") {
    for (std::int64_t K : {2, 7, 1000}) {
      for (double P : {1e-3, 0.7, 300.0}) {
        const GainSolution s = solve_lambda_star(K, P, settings);
        CHECK(std::abs(db_residual(s.lambda_star, K, P, ResidualForm::raw)) <= settings.residual_tol);
        const double scale = static_cast<double>(K * (K - 1));
        CHECK(std::abs(db_residual(s.lambda_star, K, P, ResidualForm::balanced)) <= scale * 1e-12);
        check_solution_invariants(s, settings);
      }
    }
  }
  SUBCASE("very large K") {
    const GainSolution s = solve_lambda_star(100000000, 1.0, settings);
    check_solution_invariants(s, settings);
    CHECK(s.lambda_star > 10.0);
  }
  SUBCASE("degenerate tiny power returns lambda = 1 with a flag") {
    const GainSolution s = solve_lambda_star(2, 1e-12, settings);
    CHECK(s.degenerate);
    CHECK(s.lambda_star == 1.0);
    CHECK(s.gain_F == Approx(1.0));
  }
  SUBCASE("domain errors") {
    CHECK_THROWS_AS(solve_lambda_star(1, 1.0, settings), std::domain_error);
    CHECK_THROWS_AS(solve_lambda_star(3, 0.0, settings), std::domain_error);
    CHECK_THROWS_AS(solve_lambda_star(3, -2.0, settings), std::domain_error);
  }
  SUBCASE("corrupted residual aborts") {
    SolverSettings broken;
    broken.fault = FaultInjection::negate_residual;
    CHECK_THROWS_AS(solve_lambda_star(3, 10.0, broken), SolverInvariantError);
  }
}

TEST_CASE("sign-scan oracle reproduces its frozen root") {
  CHECK(oracle::sign_scan_root(3.0, 10.0, 10000000, 1e-9) == Approx(kOracleLambdaK3P10).epsilon(1e-12));
}

TEST_CASE("massive root") {
  const SolverSettings settings;
  CHECK(solve_lambda_massive(1e-9, settings).lambda_star == Approx(1.0).epsilon(1e-6));

  const GainSolution at30 = solve_lambda_massive(1000.0, settings);
  CHECK(at30.lambda_star == Approx(9.119).epsilon(0.001 / 9.119));
  CHECK(at30.gain_F == Approx(1.320).epsilon(0.001 / 1.32));
  check_solution_invariants(at30, settings);

  const GainSolution near_peak = solve_lambda_massive(5.38, settings);
  CHECK(near_peak.gain_F == Approx(1.537).epsilon(0.001 / 1.537));

  CHECK_THROWS_AS(solve_lambda_massive(0.0, settings), std::domain_error);
  SolverSettings broken;
  broken.fault = FaultInjection::negate_residual;
  CHECK_THROWS_AS(solve_lambda_massive(5.0, broken), SolverInvariantError);
}

TEST_CASE("massive root agrees with the parametric inversion") {
  const SolverSettings settings;
  for (int i = 0; i <= 150; ++i) {
    const double pi = std::pow(10.0, -6.0 + 15.0 * i / 150.0);
    const double solved = solve_lambda_massive(pi, settings).lambda_star;
    const double inverted = invert_massive_parametric(pi, settings);
    CAPTURE(pi);
    REQUIRE(std::abs(solved - inverted) <= 10.0 * settings.lambda_tol);
  }
  // t = pi * lambda recovers pi.
  const double lambda = solve_lambda_massive(1000.0, settings).lambda_star;
  CHECK(massive_parametric(1000.0 * lambda).pi == Approx(1000.0).epsilon(1e-6));
}

TEST_CASE("massive-curve derivative against finite differences") {
  const SolverSettings settings;
  const auto lam = [&](double pi) { return solve_lambda_massive(pi, settings).lambda_star; };
  for (double pi : {0.5, 1.0, 1000.0}) {
    const double h = 1e-6;
    const double analytic = dlambda_dpi_massive(pi, lam(pi));
    const double numeric = (lam(pi * (1 + h)) - lam(pi * (1 - h))) / (2 * pi * h);
    CAPTURE(pi);
    CHECK(analytic > 0.0);
    CHECK(std::abs(analytic - numeric) <= 1e-5 * std::abs(numeric));
  }
  // Finite slope 1/2 as pi -> 0 along lambda = 1 + pi/2 + ...
  const double tiny = 1e-6;
  CHECK(dlambda_dpi_massive(tiny, lam(tiny)) == Approx(0.5).epsilon(1e-3));
}

TEST_CASE("eval_point dispatch") {
  const SolverSettings settings;
  const GainSolution a = eval_point({UserCount::finite(2), TotalPower{2e-9}}, settings);
  CHECK(a.gain_F == Approx(1.0).epsilon(1e-6));
  CHECK(std::holds_alternative<TotalPower>(a.config.power));

  const GainSolution b = eval_point({UserCount::massive(), TotalPower{1000.0}}, settings);
  CHECK(b.gain_F == Approx(1.320).epsilon(0.001 / 1.32));

  const PeakResult k10 = find_peak(UserCount::finite(10), -10.0, 30.0, settings);
  const GainSolution c = eval_point({UserCount::finite(10), TotalPower{k10.pi_star}}, settings);
  CHECK(c.gain_F == Approx(1.446).epsilon(0.001 / 1.446));

  const GainSolution d = eval_point({UserCount::finite(4), PerUserPower{0.25}}, settings);
  const GainSolution e = eval_point({UserCount::finite(4), TotalPower{1.0}}, settings);
  CHECK(d.lambda_star == e.lambda_star);

  CHECK_THROWS_AS(eval_point({UserCount::massive(), PerUserPower{1.0}}, settings), std::domain_error);
}

TEST_CASE("dB grid") {
  const auto g = db_grid(-10.0, 30.0, 0.1);
  CHECK(g.size() == 401);
  CHECK(g.front() == -10.0);
  CHECK(g.back() == 30.0);
  CHECK(db_grid(0.0, 0.0, 1.0) == std::vector<double>{0.0});
  const auto odd = db_grid(0.0, 1.0, 0.3);
  REQUIRE(odd.size() == 5);
  CHECK(odd[3] == Approx(0.9));
  CHECK(odd[4] == 1.0);
  CHECK_THROWS_AS(db_grid(1.0, 0.0, 0.1), std::domain_error);
  CHECK_THROWS_AS(db_grid(0.0, 1.0, 0.0), std::domain_error);
}

TEST_CASE("curve sweeps") {
  const SolverSettings settings;
  const auto massive = sweep_curve(UserCount::massive(), -10.0, 30.0, 0.1, settings);
  REQUIRE(massive.size() == 401);
  for (std::size_t i = 0; i + 1 < massive.size(); ++i) {
    REQUIRE(massive[i + 1].lambda > massive[i].lambda);
    REQUIRE(massive[i + 1].pi_db > massive[i].pi_db);
  }
  CHECK(massive.back().lambda == Approx(9.119).epsilon(0.001 / 9.119));
  for (const CurvePoint& p : massive) {
    CHECK(p.pi_db == Approx(to_db(p.pi)).epsilon(1e-12));
    CHECK(p.lambda_db == Approx(to_db(p.lambda)).epsilon(1e-12));
    CHECK(p.F >= 1.0);
  }

  const auto two = sweep_curve(UserCount::finite(2), -10.0, 30.0, 1.0, settings);
  REQUIRE(two.size() == 41);
  for (std::size_t i = 0; i < two.size(); ++i) {
    CHECK(two[i].lambda >= 1.0);
    CHECK(two[i].lambda <= 2.0);
    CHECK(massive[10 * i].lambda >= two[i].lambda);
  }

  const auto ten = sweep_curve(UserCount::finite(10), -10.0, 30.0, 0.1, settings);
  for (std::size_t i = 0; i < ten.size(); ++i) CHECK(massive[i].lambda >= ten[i].lambda);

  CHECK_THROWS_AS(sweep_curve(UserCount::massive(), 5.0, 1.0, 0.1, settings), std::domain_error);
}

TEST_CASE("sweeps are identical across thread counts and runs") {
  const SolverSettings settings;
  const auto serial = sweep_curve(UserCount::finite(10), -10.0, 30.0, 0.1, settings, 1);
  const auto parallel = sweep_curve(UserCount::finite(10), -10.0, 30.0, 0.1, settings, 4);
  const auto again = sweep_curve(UserCount::finite(10), -10.0, 30.0, 0.1, settings, 3);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].pi == parallel[i].pi);
    CHECK(serial[i].lambda == parallel[i].lambda);
    CHECK(serial[i].F == parallel[i].F);
    CHECK(serial[i].F == again[i].F);
  }
}

TEST_CASE("lambda is nondecreasing in K and bounded by the massive limit") {
  const SolverSettings settings;
  for (double db : {-10.0, 0.0, 7.3, 20.0, 30.0}) {
    const double pi = from_db(db);
    double previous = 1.0;
    for (std::int64_t K : {2, 3, 5, 10, 30, 100, 1000, 100000}) {
      const double lambda = solve_lambda_star(K, pi / static_cast<double>(K), settings).lambda_star;
      CAPTURE(db);
      CAPTURE(K);
      CHECK(lambda >= previous);
      previous = lambda;
    }
    CHECK(solve_lambda_massive(pi, settings).lambda_star >= previous);
  }
}

TEST_CASE("F tends to 1 at both ends of the massive curve") {
  const SolverSettings settings;
  CHECK(solve_lambda_massive(1e-3, settings).gain_F <= 1.01);
  double previous = 2.0;
  for (double db = 30.0; db <= 200.0; db += 10.0) {
    const double F = solve_lambda_massive(from_db(db), settings).gain_F;
    CHECK(F < previous);
    previous = F;
  }
  CHECK(solve_lambda_massive(1e20, settings).gain_F <= 1.1);
}

TEST_CASE("peak search") {
  const SolverSettings settings;

  const PeakResult massive = find_peak(UserCount::massive(), -10.0, 30.0, settings);
  CHECK(massive.F_star == Approx(1.537).epsilon(0.001 / 1.537));
  CHECK(massive.pi_star == Approx(5.38).epsilon(0.05 / 5.38));
  CHECK(massive.pi_star_db == Approx(7.3).epsilon(0.05 / 7.3));
  CHECK(massive.F_star < 2.0);
  for (const ScanSample& edge : {massive.bracket_evidence[0], massive.bracket_evidence[2]}) {
    CHECK(massive.F_star >= edge.F);
  }
  CHECK(massive.bracket_evidence[1].F >= massive.bracket_evidence[0].F);
  CHECK(massive.bracket_evidence[1].F >= massive.bracket_evidence[2].F);

  const PeakResult ten = find_peak(UserCount::finite(10), -10.0, 30.0, settings);
  CHECK(ten.F_star == Approx(1.446).epsilon(0.001 / 1.446));
  CHECK(std::abs(ten.pi_star_db - 7.2) <= 0.1);

  const PeakResult two = find_peak(UserCount::finite(2), -10.0, 30.0, settings);
  CHECK(std::abs(two.pi_star_db - kOraclePeakK2Db) <= 2e-3);
  CHECK(two.F_star >= kOraclePeakK2F - 1e-12);
  CHECK(two.F_star - kOraclePeakK2F <= 1e-9);

  CHECK_THROWS_AS(find_peak(UserCount::massive(), 10.0, 30.0, settings), NoInteriorPeakError);
  CHECK_THROWS_AS(find_peak(UserCount::massive(), -10.0, 0.0, settings), NoInteriorPeakError);
  CHECK_THROWS_AS(find_peak(UserCount::massive(), 3.0, 3.0, settings), std::domain_error);
}

TEST_CASE("grid peak oracle reproduces its frozen values") {
  const oracle::GridPeak p = oracle::grid_peak(2.0, -10.0, 30.0, 1e-3);
  CHECK(p.pi_db == Approx(kOraclePeakK2Db).epsilon(1e-12));
  CHECK(p.F == Approx(kOraclePeakK2F).epsilon(1e-14));
}
