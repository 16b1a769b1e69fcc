#include "fbgain/core.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fbgain {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

}  // namespace

double db_convert(double value, DbDirection direction) {
  if (direction == DbDirection::to_db) {
    require(value > 0.0, "to_db: value must be positive");
    return 10.0 * std::log10(value);
  }
  return std::pow(10.0, value / 10.0);
}

double log1p_safe(double x) {
  require(x > -1.0, "log1p: argument must exceed -1");
  return std::log1p(x);
}

double log1p_over_x(double x) {
  if (std::abs(x) < 1e-8) {
    return 1.0 - x * (0.5 - x * (1.0 / 3.0 - x * 0.25));
  }
  return log1p_safe(x) / x;
}

// --- UserCount -------------------------------------------------------------

UserCount UserCount::finite(std::int64_t k) {
  require(k >= 2, "user count must be at least 2");
  UserCount u;
  u.count_ = k;
  return u;
}

std::int64_t UserCount::count() const {
  if (!count_) throw std::logic_error("massive limit has no finite user count");
  return *count_;
}

std::string UserCount::label() const {
  return count_ ? std::to_string(*count_) : std::string("inf");
}

std::strong_ordering UserCount::operator<=>(const UserCount& other) const {
  if (is_massive() || other.is_massive()) {
    return is_massive() <=> other.is_massive();
  }
  return *count_ <=> *other.count_;
}

// --- ChannelConfig ---------------------------------------------------------

void ChannelConfig::validate() const {
  if (const auto* per_user = std::get_if<PerUserPower>(&power)) {
    require(!users.is_massive(), "massive limit requires a total power");
    require(per_user->P > 0.0 && std::isfinite(per_user->P), "per-user power must be positive and finite");
  } else {
    const double pi = std::get<TotalPower>(power).pi;
    require(pi > 0.0 && std::isfinite(pi), "total power must be positive and finite");
  }
}

double ChannelConfig::total_power() const {
  if (const auto* per_user = std::get_if<PerUserPower>(&power)) {
    return static_cast<double>(users.count()) * per_user->P;
  }
  return std::get<TotalPower>(power).pi;
}

double ChannelConfig::per_user_power() const {
  if (const auto* per_user = std::get_if<PerUserPower>(&power)) return per_user->P;
  return std::get<TotalPower>(power).pi / static_cast<double>(users.count());
}

// --- PowerVector -----------------------------------------------------------

PowerVector::PowerVector(std::vector<double> per_user) : per_user_(std::move(per_user)) {
  require(per_user_.size() >= 2, "power vector needs at least two users");
  for (double p : per_user_) {
    require(p > 0.0 && std::isfinite(p), "per-user powers must be positive and finite");
  }
}

double PowerVector::average() const {
  return std::accumulate(per_user_.begin(), per_user_.end(), 0.0) /
         static_cast<double>(per_user_.size());
}

SymmetricPower average_power(const PowerVector& powers) {
  return {static_cast<std::int64_t>(powers.size()), powers.average()};
}

// --- Capacities ------------------------------------------------------------

double capacity_nofb(double pi) {
  require(pi >= 0.0, "capacity_nofb: power must be non-negative");
  return log1p_safe(pi);
}

double capacity_fb(double pi, double lambda) {
  require(pi >= 0.0, "capacity_fb: power must be non-negative");
  require(lambda >= 1.0, "capacity_fb: lambda must be at least 1");
  return log1p_safe(pi * lambda);
}

double gain_factor(double pi, double lambda) {
  require(pi > 0.0, "gain_factor: power must be positive");
  require(lambda >= 1.0, "gain_factor: lambda must be at least 1");
  // Ratio of ln(1+x)/x kernels keeps full precision as pi -> 0.
  return lambda * log1p_over_x(pi * lambda) / log1p_over_x(pi);
}

double db_residual(double lambda, std::int64_t K, double P, ResidualForm form) {
  require(K >= 2, "db_residual: K must be at least 2");
  require(P > 0.0, "db_residual: P must be positive");
  const double k = static_cast<double>(K);
  require(lambda >= 1.0 && lambda <= k, "db_residual: lambda outside [1, K]");

  const double joint = log1p_safe(k * P * lambda);
  if (form == ResidualForm::raw) {
    return joint / k - log1p_safe((k - lambda) * P * lambda) / (k - 1.0);
  }
  const double per_user = P * lambda * lambda / (1.0 + (k - lambda) * P * lambda);
  return k * log1p_safe(per_user) - joint;
}

double f_of(double pi, double lambda) {
  require(pi > 0.0, "f_of: power must be positive");
  require(lambda >= 1.0, "f_of: lambda must be at least 1");
  const double x = pi * lambda;
  return (1.0 + x) * log1p_over_x(x);
}

double dlambda_dpi_massive(double pi, double lambda) {
  require(pi > 0.0, "dlambda_dpi_massive: power must be positive");
  // (pi - 1) lambda + 1, arranged to keep precision as lambda -> 1.
  const double numer = pi * lambda - (lambda - 1.0);
  const double denom = pi * lambda * (lambda - 1.0) + 2.0 * lambda - 1.0;
  require(denom > 0.0, "dlambda_dpi_massive: point is off the massive curve");
  return (lambda / pi) * numer / denom;
}

MassivePoint massive_parametric(double t) {
  require(t > 0.0 && std::isfinite(t), "massive_parametric: t must be positive");
  const double lambda = (1.0 + t) * log1p_over_x(t);
  return {t / lambda, lambda};
}

}  // namespace fbgain
