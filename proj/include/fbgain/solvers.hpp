#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fbgain/core.hpp"

namespace fbgain {

/// Test hook for negative-control runs: corrupts residual evaluations so that
/// downstream invariant checks must fail.
enum class FaultInjection { none, negate_residual };

struct SolverSettings {
  double lambda_tol = 1e-12;
  double residual_tol = 1e-10;
  int max_iter = 200;
  double scan_step_db = 0.1;
  double peak_tol_db = 1e-4;
  FaultInjection fault = FaultInjection::none;

  /// Throws std::domain_error if any tolerance is non-positive or max_iter < 1.
  void validate() const;
};

/// Raised when an analytically guaranteed property of a solver (bracket
/// signs, convergence) does not hold at runtime.
class SolverInvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised by find_peak when the coarse scan is monotone over the range.
class NoInteriorPeakError : public std::range_error {
 public:
  using std::range_error::range_error;
};

struct CurvePoint {
  double pi = 0.0;
  double pi_db = 0.0;
  UserCount users = UserCount::massive();
  double lambda = 1.0;
  double lambda_db = 0.0;
  double F = 1.0;
};

struct ScanSample {
  double pi_db;
  double F;
};

struct PeakResult {
  double pi_star = 0.0;
  double pi_star_db = 0.0;
  double F_star = 1.0;
  double lambda_at_peak = 1.0;
  /// Coarse-scan points (left, centre, right) with F rising then falling.
  std::array<ScanSample, 3> bracket_evidence{};
};

/// Unique root of the dependence-balance equality on [1, K] by bisection on
/// the raw residual.
GainSolution solve_lambda_star(std::int64_t K, double P, const SolverSettings& settings = {});

/// Unique lambda >= 1 with lambda = f(pi, lambda), the K -> inf limit at
/// fixed total power pi.
GainSolution solve_lambda_massive(double pi, const SolverSettings& settings = {});

/// Second route to the massive curve: bisects the monotone map t -> pi(t)
/// of massive_parametric and returns lambda(t).
double invert_massive_parametric(double pi, const SolverSettings& settings = {});

/// Dispatches on the user count; a finite K with total power uses P = pi/K.
GainSolution eval_point(const ChannelConfig& config, const SolverSettings& settings = {});

/// Grid of dB values from..to inclusive, the last point clamped to to_db.
/// from_db == to_db yields a single point.
std::vector<double> db_grid(double from_db, double to_db, double step_db);

/// Solves every grid point of db_grid. `threads` = 0 uses the hardware
/// concurrency; output order and values do not depend on it.
std::vector<CurvePoint> sweep_curve(UserCount users, double from_db, double to_db, double step_db,
                                    const SolverSettings& settings = {}, unsigned threads = 1);

/// Coarse scan at scan_step_db followed by golden-section refinement of F
/// over pi in dB.
PeakResult find_peak(UserCount users, double from_db = -10.0, double to_db = 30.0,
                     const SolverSettings& settings = {});

}  // namespace fbgain
