#include "fbgain/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <string>
#include <thread>

namespace fbgain {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

double fault_sign(const SolverSettings& settings) {
  return settings.fault == FaultInjection::negate_residual ? -1.0 : 1.0;
}

struct Bisection {
  double root;
  int iterations;
};

// Bisection on a bracket with g(lo) < 0 < g(hi). Stops at lambda_tol width,
// at the iteration cap, or when the midpoint no longer splits the interval.
Bisection bisect(const std::function<double(double)>& g, double lo, double hi,
                 const SolverSettings& settings, int iterations) {
  while (hi - lo > settings.lambda_tol && iterations < settings.max_iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    ++iterations;
    if (g(mid) < 0.0) lo = mid; else hi = mid;
  }
  return {0.5 * (lo + hi), iterations};
}

void fill_capacities(GainSolution& s, double pi) {
  s.capacity_nofb = capacity_nofb(pi);
  s.capacity_fb = capacity_fb(pi, s.lambda_star);
  s.gain_F = gain_factor(pi, s.lambda_star);
}

double eval_F(UserCount users, double pi_db, const SolverSettings& settings) {
  return eval_point({users, TotalPower{from_db(pi_db)}}, settings).gain_F;
}

}  // namespace

void SolverSettings::validate() const {
  require(lambda_tol > 0.0, "lambda_tol must be positive");
  require(residual_tol > 0.0, "residual_tol must be positive");
  require(max_iter >= 1, "max_iter must be at least 1");
  require(scan_step_db > 0.0, "scan_step_db must be positive");
  require(peak_tol_db > 0.0, "peak_tol_db must be positive");
}

GainSolution solve_lambda_star(std::int64_t K, double P, const SolverSettings& settings) {
  settings.validate();
  require(K >= 2, "solve_lambda_star: K must be at least 2");
  require(P > 0.0 && std::isfinite(P), "solve_lambda_star: P must be positive");

  const double sign = fault_sign(settings);
  const auto residual = [&](double lambda) {
    return sign * db_residual(lambda, K, P, ResidualForm::raw);
  };

  GainSolution s;
  s.config = {UserCount::finite(K), PerUserPower{P}};
  const double k = static_cast<double>(K);
  const double pi = k * P;

  const double r_lo = residual(1.0);
  const double r_hi = residual(k);
  if (std::abs(r_lo) < settings.residual_tol && std::abs(r_hi) < settings.residual_tol) {
    s.lambda_star = 1.0;
    s.residual = r_lo;
    s.degenerate = true;
    fill_capacities(s, pi);
    return s;
  }
  if (!(r_lo < 0.0 && r_hi > 0.0)) {
    throw SolverInvariantError("solve_lambda_star: residual signs at [1, K] are not (-, +) for K=" +
                               std::to_string(K) + ", P=" + std::to_string(P));
  }

  const auto [root, iterations] = bisect(residual, 1.0, k, settings, 0);
  s.lambda_star = root;
  s.iterations = iterations;
  s.residual = residual(root);
  if (!(std::abs(s.residual) <= settings.residual_tol)) {
    throw SolverInvariantError("solve_lambda_star: residual above tolerance after bisection");
  }
  fill_capacities(s, pi);
  return s;
}

GainSolution solve_lambda_massive(double pi, const SolverSettings& settings) {
  settings.validate();
  require(pi > 0.0 && std::isfinite(pi), "solve_lambda_massive: pi must be positive");

  const double sign = fault_sign(settings);
  const auto gap = [&](double lambda) { return sign * (lambda - f_of(pi, lambda)); };

  GainSolution s;
  s.config = {UserCount::massive(), TotalPower{pi}};

  // f(pi, 1) > 1 analytically; for pi far below the residual tolerance the
  // gap at 1 rounds to zero and lambda = 1 is the answer to working precision.
  const double g_one = gap(1.0);
  if (!(g_one < 0.0)) {
    if (std::abs(g_one) <= settings.residual_tol && sign > 0.0) {
      s.lambda_star = 1.0;
      s.residual = g_one;
      s.degenerate = true;
      fill_capacities(s, pi);
      return s;
    }
    throw SolverInvariantError("solve_lambda_massive: lambda - f(pi, lambda) is not negative at 1");
  }

  double lo = 1.0;
  double hi = 2.0;
  int iterations = 0;
  while (gap(hi) <= 0.0) {
    if (++iterations >= settings.max_iter || !std::isfinite(hi)) {
      throw SolverInvariantError("solve_lambda_massive: bracket expansion did not terminate");
    }
    lo = hi;
    hi *= 2.0;
  }

  const auto [root, total] = bisect(gap, lo, hi, settings, iterations);
  s.lambda_star = root;
  s.iterations = total;
  s.residual = gap(root);
  if (!(std::abs(s.residual) <= settings.residual_tol)) {
    throw SolverInvariantError("solve_lambda_massive: residual above tolerance after bisection");
  }
  fill_capacities(s, pi);
  return s;
}

double invert_massive_parametric(double pi, const SolverSettings& settings) {
  settings.validate();
  require(pi > 0.0 && std::isfinite(pi), "invert_massive_parametric: pi must be positive");

  // t = pi * lambda and lambda >= 1, so t >= pi.
  double lo = pi;
  double hi = 2.0 * pi;
  int iterations = 0;
  while (massive_parametric(hi).pi < pi) {
    if (++iterations >= settings.max_iter) {
      throw SolverInvariantError("invert_massive_parametric: bracket expansion did not terminate");
    }
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < settings.max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (massive_parametric(mid).pi < pi) lo = mid; else hi = mid;
  }
  return massive_parametric(0.5 * (lo + hi)).lambda;
}

GainSolution eval_point(const ChannelConfig& config, const SolverSettings& settings) {
  config.validate();
  GainSolution s = config.users.is_massive()
                       ? solve_lambda_massive(config.total_power(), settings)
                       : solve_lambda_star(config.users.count(), config.per_user_power(), settings);
  s.config = config;
  return s;
}

std::vector<double> db_grid(double start_db, double stop_db, double step_db) {
  require(std::isfinite(start_db) && std::isfinite(stop_db), "db range must be finite");
  require(step_db > 0.0 && std::isfinite(step_db), "step_db must be positive");
  require(start_db <= stop_db, "empty dB range: from_db exceeds to_db");

  const double span = stop_db - start_db;
  const auto steps = static_cast<std::int64_t>(std::floor(span / step_db + 1e-9));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(steps) + 2);
  for (std::int64_t i = 0; i <= steps; ++i) {
    grid.push_back(start_db + step_db * static_cast<double>(i));
  }
  const double slack = 1e-9 * step_db;
  if (stop_db - grid.back() > slack) {
    grid.push_back(stop_db);
  } else {
    grid.back() = stop_db;
  }
  return grid;
}

std::vector<CurvePoint> sweep_curve(UserCount users, double start_db, double stop_db, double step_db,
                                    const SolverSettings& settings, unsigned threads) {
  settings.validate();
  const std::vector<double> grid = db_grid(start_db, stop_db, step_db);
  std::vector<CurvePoint> points(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());

  const auto solve_index = [&](std::size_t i) {
    try {
      const double pi = from_db(grid[i]);
      const GainSolution s = eval_point({users, TotalPower{pi}}, settings);
      points[i] = {pi, grid[i], users, s.lambda_star, to_db(s.lambda_star), s.gain_F};
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, grid.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) solve_index(i);
  } else {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t i = w; i < grid.size(); i += threads) solve_index(i);
      });
    }
  }

  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return points;
}

PeakResult find_peak(UserCount users, double start_db, double stop_db, const SolverSettings& settings) {
  settings.validate();
  require(start_db < stop_db, "find_peak: from_db must be below to_db");

  const std::vector<double> grid = db_grid(start_db, stop_db, settings.scan_step_db);
  std::vector<double> F(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) F[i] = eval_F(users, grid[i], settings);

  const auto best = static_cast<std::size_t>(std::max_element(F.begin(), F.end()) - F.begin());
  if (best == 0 || best + 1 == grid.size()) {
    throw NoInteriorPeakError("find_peak: F is monotone on [" + std::to_string(start_db) + ", " +
                              std::to_string(stop_db) + "] dB for K=" + users.label() +
                              "; widen the range");
  }

  PeakResult result;
  result.bracket_evidence = {ScanSample{grid[best - 1], F[best - 1]},
                             ScanSample{grid[best], F[best]},
                             ScanSample{grid[best + 1], F[best + 1]}};

  // Golden-section maximisation over the bracketing cells.
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = grid[best - 1];
  double b = grid[best + 1];
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = eval_F(users, c, settings);
  double fd = eval_F(users, d, settings);
  ScanSample top{grid[best], F[best]};
  const auto keep = [&top](double x, double fx) {
    if (fx > top.F) top = {x, fx};
  };
  keep(c, fc);
  keep(d, fd);
  for (int i = 0; i < settings.max_iter && b - a > settings.peak_tol_db; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval_F(users, c, settings);
      keep(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval_F(users, d, settings);
      keep(d, fd);
    }
  }

  const GainSolution at_peak = eval_point({users, TotalPower{from_db(top.pi_db)}}, settings);
  result.pi_star_db = top.pi_db;
  result.pi_star = from_db(top.pi_db);
  result.F_star = at_peak.gain_F;
  result.lambda_at_peak = at_peak.lambda_star;
  return result;
}

}  // namespace fbgain
