#pragma once

// Scalar formulas for feedback sum-rate gains of the symmetric K-user
// Gaussian multiple-access channel. All capacities are in nats and all
// powers are linear (unit noise variance) unless a name says "db".

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace fbgain {

// ---------------------------------------------------------------------------
// Decibels
// ---------------------------------------------------------------------------

enum class DbDirection { to_db, from_db };

/// 10*log10(value) for to_db (value > 0 required), 10^(value/10) for from_db.
double db_convert(double value, DbDirection direction);

inline double to_db(double linear) { return db_convert(linear, DbDirection::to_db); }
inline double from_db(double db) { return db_convert(db, DbDirection::from_db); }

// ---------------------------------------------------------------------------
// Logarithm kernels
// ---------------------------------------------------------------------------

/// ln(1+x) for x > -1 without cancellation near zero.
double log1p_safe(double x);

/// ln(1+x)/x, continuous at x = 0 (value 1). Uses the series
/// 1 - x/2 + x^2/3 - x^3/4 for |x| < 1e-8.
double log1p_over_x(double x);

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Number of transmitters: a finite K >= 2 or the massive (K -> inf) limit.
class UserCount {
 public:
  static UserCount finite(std::int64_t k);
  static UserCount massive() { return UserCount{}; }

  bool is_massive() const { return !count_.has_value(); }
  /// Throws std::logic_error for the massive marker.
  std::int64_t count() const;
  /// Integer text for finite K, "inf" for the massive limit.
  std::string label() const;

  /// Finite counts order numerically; massive sorts above every finite K.
  std::strong_ordering operator<=>(const UserCount& other) const;
  bool operator==(const UserCount& other) const = default;

 private:
  UserCount() = default;
  std::optional<std::int64_t> count_;
};

struct PerUserPower {
  double P;
};

struct TotalPower {
  double pi;
};

using PowerSpec = std::variant<PerUserPower, TotalPower>;

/// A channel operating point. pi = K*P whenever K is finite; the massive
/// limit only accepts a total power.
struct ChannelConfig {
  UserCount users = UserCount::massive();
  PowerSpec power = TotalPower{1.0};

  /// Throws std::domain_error when the invariants do not hold.
  void validate() const;
  double total_power() const;
  /// Per-user power; throws std::logic_error for the massive limit.
  double per_user_power() const;
};

/// Asymmetric per-user powers P_1..P_K (K >= 2, all > 0).
class PowerVector {
 public:
  explicit PowerVector(std::vector<double> per_user);

  std::span<const double> per_user() const { return per_user_; }
  std::size_t size() const { return per_user_.size(); }
  double average() const;

 private:
  std::vector<double> per_user_;
};

struct SymmetricPower {
  std::int64_t users;
  double per_user;
};

/// Reduces asymmetric constraints to the symmetric pair (K, mean P). The
/// feedback sum-rate capacity under P_1..P_K is bounded by the symmetric
/// capacity at the mean power.
SymmetricPower average_power(const PowerVector& powers);

/// A solved operating point.
struct GainSolution {
  ChannelConfig config;
  double lambda_star = 1.0;
  double residual = 0.0;
  int iterations = 0;
  double capacity_nofb = 0.0;
  double capacity_fb = 0.0;
  double gain_F = 1.0;
  /// Set when both bracket ends were already within the residual tolerance
  /// (vanishing power), in which case lambda_star is reported as 1.
  bool degenerate = false;
};

// ---------------------------------------------------------------------------
// Capacities and gains
// ---------------------------------------------------------------------------

/// ln(1 + pi), sum-rate capacity without feedback.
double capacity_nofb(double pi);

/// ln(1 + pi*lambda), sum-rate capacity with feedback at power gain lambda.
double capacity_fb(double pi, double lambda);

/// ln(1 + pi*lambda) / ln(1 + pi). pi = 0 is rejected; callers own the
/// limit value 1.
double gain_factor(double pi, double lambda);

enum class ResidualForm {
  /// (1/K) ln(1+KPl) - (1/(K-1)) ln(1+(K-l)Pl)
  raw,
  /// K ln(1 + Pl^2/(1+(K-l)Pl)) - ln(1+KPl), which is K(K-1) times raw.
  balanced,
};

/// Dependence-balance residual. Negative at lambda = 1, positive at
/// lambda = K, with a single zero in between. Requires 1 <= lambda <= K.
double db_residual(double lambda, std::int64_t K, double P, ResidualForm form);

/// f(pi, lambda) = (1 + 1/(pi*lambda)) ln(1 + pi*lambda).
double f_of(double pi, double lambda);

/// d(lambda)/d(pi) along the massive-user curve lambda = f(pi, lambda).
double dlambda_dpi_massive(double pi, double lambda);

struct MassivePoint {
  double pi;
  double lambda;
};

/// Exact point on the massive-user curve for t = pi*lambda > 0:
/// lambda = (1+t) ln(1+t)/t and pi = t/lambda.
MassivePoint massive_parametric(double t);

}  // namespace fbgain
