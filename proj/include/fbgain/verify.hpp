#pragma once

// Executable checks of the inequalities, limits and shape properties of the
// feedback gain curves. Every check returns a BoundReport whose slack values
// follow one convention: slack >= 0 means the inequality holds.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fbgain/core.hpp"
#include "fbgain/solvers.hpp"

namespace fbgain::verify {

inline constexpr double kDefaultSlop = 1e-9;
/// Improved global bound on the capacity gain factor.
inline constexpr double kImprovedBound = 1.5372;
/// Bound established for the tails pi <= -10 dB and pi >= 30 dB.
inline constexpr double kTailBound = 1.321;

struct Witness {
  std::string inequality;
  std::string users;
  double pi = 0.0;
  double lambda = 0.0;
};

struct BoundReport {
  std::string check_name;
  std::int64_t samples = 0;
  std::int64_t violations = 0;
  double worst_slack = 0.0;
  Witness witness;
  double slop = kDefaultSlop;
  /// Set when the check aborted (for example a solver invariant failure).
  std::optional<std::string> error;

  explicit BoundReport(std::string name, double slop_ = kDefaultSlop);

  /// Records one evaluated inequality.
  void add(double slack, const Witness& where);
  /// Marks the check as failed because it could not complete.
  void fail(std::string message);
  bool passed() const { return violations == 0 && !error; }
};

struct SampleSpec {
  std::uint64_t seed = 42;
  std::int64_t n_samples = 10000;
  std::int64_t K_min = 2;
  std::int64_t K_max = 10000;
  double P_min = 1e-3;
  double P_max = 1e3;

  void validate() const;
};

struct Sample {
  std::int64_t K;
  double P;
};

/// Log-uniform draws of (K, P); identical for identical specs on every platform.
std::vector<Sample> draw_samples(const SampleSpec& spec);

/// Solves lambda* for (K, P) and checks the log sandwich around the root,
/// the lambda sandwich, and the bound of the sandwich's right side.
BoundReport check_point_bounds(std::int64_t K, double P, const SolverSettings& settings = {});

/// Same inequalities evaluated at an arbitrary lambda (used for negative controls).
void add_point_bounds(BoundReport& report, std::int64_t K, double P, double lambda);

/// Root quality and point bounds over random (K, P) samples.
BoundReport check_sampled_point_bounds(const SampleSpec& sample, const SolverSettings& settings = {});

/// Point bounds for K = 10^2 .. 10^8 at P = 1.
BoundReport check_large_k_sandwich(const SolverSettings& settings = {});

/// Small-power and large-power tail bounds on F.
BoundReport check_tail_bounds(const SolverSettings& settings = {});

/// Positivity of the massive-curve derivative and agreement with central
/// finite differences (relative step 1e-6, tolerance 1e-5 relative).
BoundReport check_derivative(std::span<const double> pi_grid, const SolverSettings& settings = {});

/// Monotone lambda, unimodal F, and ordering of lambda across user counts.
BoundReport check_monotone_unimodal(std::span<const UserCount> users, double from_db, double to_db,
                                    double step_db, const SolverSettings& settings = {});

/// 1 <= F < 2 and F <= 1.5372 over random (K, P) samples.
BoundReport check_thomas_and_improved(const SampleSpec& sample, const SolverSettings& settings = {});

/// Massive curve at pi = 5.38 lies in [1.53, 1.538].
BoundReport check_massive_witness(const SolverSettings& settings = {});

/// Root-finder and t-parametrization agree to 1e-9 relative on 100
/// log-spaced pi in [1e-3, 1e6].
BoundReport check_massive_consistency(const SolverSettings& settings = {});

/// Runs every check above in a fixed order. Failures are returned, not thrown.
std::vector<BoundReport> run_suite(const SampleSpec& sample, const SolverSettings& settings = {});

bool all_passed(std::span<const BoundReport> reports);

/// name samples=N violations=V worst_slack=S witness="..." status=pass|fail
std::string format_report_line(const BoundReport& report);

}  // namespace fbgain::verify
