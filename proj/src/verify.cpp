#include "fbgain/verify.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>

#include "fbgain/format.hpp"

namespace fbgain::verify {

namespace {

constexpr double kFdStep = 1e-6;
constexpr double kFdTolerance = 1e-5;
constexpr double kConsistencyTolerance = 1e-9;

double canonical(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Witness at(std::string inequality, UserCount users, double pi, double lambda) {
  return {std::move(inequality), users.label(), pi, lambda};
}

// Runs `body` against a fresh report; exceptions become a failed report.
BoundReport guarded(std::string name, const std::function<void(BoundReport&)>& body) {
  BoundReport report(std::move(name));
  try {
    body(report);
  } catch (const std::exception& e) {
    report.fail(e.what());
  }
  return report;
}

}  // namespace

// --- BoundReport -----------------------------------------------------------

BoundReport::BoundReport(std::string name, double slop_)
    : check_name(std::move(name)), worst_slack(std::numeric_limits<double>::infinity()), slop(slop_) {}

void BoundReport::add(double slack, const Witness& where) {
  ++samples;
  if (std::isnan(slack) || slack < -slop) ++violations;
  if (std::isnan(slack) || slack < worst_slack) {
    worst_slack = slack;
    witness = where;
  }
}

void BoundReport::fail(std::string message) {
  ++violations;
  worst_slack = -std::numeric_limits<double>::infinity();
  witness = {"aborted", "", 0.0, 0.0};
  error = std::move(message);
}

// --- Sampling --------------------------------------------------------------

void SampleSpec::validate() const {
  if (n_samples < 1) throw std::domain_error("n_samples must be at least 1");
  if (K_min < 2 || K_max < K_min) throw std::domain_error("K range must satisfy 2 <= K_min <= K_max");
  if (!(P_min > 0.0) || !(P_max >= P_min)) throw std::domain_error("P range must satisfy 0 < P_min <= P_max");
}

std::vector<Sample> draw_samples(const SampleSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const double log_k_lo = std::log(static_cast<double>(spec.K_min));
  const double log_k_hi = std::log(static_cast<double>(spec.K_max) + 1.0);
  const double log_p_lo = std::log(spec.P_min);
  const double log_p_hi = std::log(spec.P_max);

  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(spec.n_samples));
  for (std::int64_t i = 0; i < spec.n_samples; ++i) {
    const double uk = canonical(rng);
    const double up = canonical(rng);
    auto K = static_cast<std::int64_t>(std::floor(std::exp(log_k_lo + uk * (log_k_hi - log_k_lo))));
    K = std::clamp(K, spec.K_min, spec.K_max);
    const double P = std::exp(log_p_lo + up * (log_p_hi - log_p_lo));
    out.push_back({K, P});
  }
  return out;
}

// --- Point bounds ----------------------------------------------------------

void add_point_bounds(BoundReport& report, std::int64_t K, double P, double lambda) {
  const UserCount users = UserCount::finite(K);
  const double k = static_cast<double>(K);
  const double pi = k * P;
  const double joint = std::log1p(pi * lambda);
  const double upper_log = pi * lambda * lambda / (1.0 + (k - lambda) * P * lambda);

  report.add(joint - pi * lambda * lambda / (1.0 + pi * lambda), at("log-sandwich-left", users, pi, lambda));
  report.add(upper_log - joint, at("log-sandwich-right", users, pi, lambda));
  report.add(lambda - k * joint / (k + joint), at("lambda-sandwich-left", users, pi, lambda));
  report.add(f_of(pi, lambda) - lambda, at("lambda-sandwich-right", users, pi, lambda));
  if (lambda < k) {
    report.add(k * lambda / (k - lambda) - upper_log, at("log-sandwich-right-below", users, pi, lambda));
  }
}

BoundReport check_point_bounds(std::int64_t K, double P, const SolverSettings& settings) {
  const GainSolution s = solve_lambda_star(K, P, settings);
  BoundReport report("point_bounds");
  add_point_bounds(report, K, P, s.lambda_star);
  return report;
}

BoundReport check_sampled_point_bounds(const SampleSpec& sample, const SolverSettings& settings) {
  return guarded("sampled_point_bounds", [&](BoundReport& report) {
    for (const Sample& smp : draw_samples(sample)) {
      const GainSolution s = solve_lambda_star(smp.K, smp.P, settings);
      const UserCount users = UserCount::finite(smp.K);
      const double pi = static_cast<double>(smp.K) * smp.P;
      const double raw = db_residual(s.lambda_star, smp.K, smp.P, ResidualForm::raw);
      report.add(settings.residual_tol - std::abs(raw), at("root-residual", users, pi, s.lambda_star));
      report.add(s.lambda_star - 1.0, at("lambda-at-least-1", users, pi, s.lambda_star));
      report.add(static_cast<double>(smp.K) - s.lambda_star, at("lambda-at-most-K", users, pi, s.lambda_star));
      add_point_bounds(report, smp.K, smp.P, s.lambda_star);
    }
  });
}

BoundReport check_large_k_sandwich(const SolverSettings& settings) {
  return guarded("large_k_sandwich", [&](BoundReport& report) {
    std::int64_t K = 100;
    for (int decade = 2; decade <= 8; ++decade, K *= 10) {
      const GainSolution s = solve_lambda_star(K, 1.0, settings);
      add_point_bounds(report, K, 1.0, s.lambda_star);
    }
  });
}

// --- Tails -----------------------------------------------------------------

BoundReport check_tail_bounds(const SolverSettings& settings) {
  return guarded("tail_bounds", [&](BoundReport& report) {
    const std::vector<UserCount> lower_users = {UserCount::finite(2), UserCount::finite(3),
                                                UserCount::finite(10), UserCount::finite(100),
                                                UserCount::massive()};
    std::vector<double> lower_pi = {1e-6, 0.1};
    for (double db : db_grid(-59.0, -11.0, 1.0)) lower_pi.push_back(from_db(db));

    for (const UserCount users : lower_users) {
      for (const double pi : lower_pi) {
        const GainSolution s = eval_point({users, TotalPower{pi}}, settings);
        const double lambda = s.lambda_star;
        const double F = s.gain_F;
        report.add((1.0 + pi) * lambda - F, at("F-below-(1+pi)lambda", users, pi, lambda));
        report.add((1.0 + pi) / (1.0 - pi) - (1.0 + pi) * lambda,
                   at("(1+pi)lambda-below-(1+pi)/(1-pi)", users, pi, lambda));
        report.add(11.0 / 9.0 - F, at("F-below-11/9", users, pi, lambda));
        report.add(kTailBound - F, at("F-below-1.321-low", users, pi, lambda));
      }
    }

    const UserCount massive = UserCount::massive();
    for (double db : db_grid(30.0, 90.0, 1.0)) {
      const double pi = from_db(db);
      const GainSolution s = solve_lambda_massive(pi, settings);
      const double lambda = s.lambda_star;
      const double F = s.gain_F;
      const double a = pi * lambda * lambda / (1.0 + pi * lambda);
      // ln(exp(a) + lambda - 1) without overflow.
      const double log_sum = a + std::log1p((lambda - 1.0) * std::exp(-a));
      const double first = lambda / (log_sum - std::log(lambda));
      report.add(lambda - std::log1p(pi * lambda), at("lambda-above-log", massive, pi, lambda));
      report.add(first - F, at("F-below-first-tail-bound", massive, pi, lambda));
      if (lambda > std::exp(1.0)) {
        const double second = 1.0 / (pi * lambda / (1.0 + pi * lambda) - std::log(lambda) / lambda);
        report.add(second - first, at("first-below-second-tail-bound", massive, pi, lambda));
      }
      report.add(kTailBound - F, at("F-below-1.321-high", massive, pi, lambda));
    }
  });
}

// --- Derivative ------------------------------------------------------------

BoundReport check_derivative(std::span<const double> pi_grid, const SolverSettings& settings) {
  return guarded("derivative", [&](BoundReport& report) {
    const UserCount massive = UserCount::massive();
    for (const double pi : pi_grid) {
      const double lambda = solve_lambda_massive(pi, settings).lambda_star;
      const double analytic = dlambda_dpi_massive(pi, lambda);
      const double up = solve_lambda_massive(pi * (1.0 + kFdStep), settings).lambda_star;
      const double down = solve_lambda_massive(pi * (1.0 - kFdStep), settings).lambda_star;
      const double numeric = (up - down) / (2.0 * pi * kFdStep);
      report.add(analytic, at("derivative-positive", massive, pi, lambda));
      report.add(kFdTolerance - std::abs(analytic - numeric) / std::abs(numeric),
                 at("derivative-matches-finite-difference", massive, pi, lambda));
    }
  });
}

// --- Curve shape -----------------------------------------------------------

BoundReport check_monotone_unimodal(std::span<const UserCount> users, double from_db_, double to_db_,
                                    double step_db, const SolverSettings& settings) {
  return guarded("monotone_unimodal", [&](BoundReport& report) {
    std::vector<UserCount> ordered(users.begin(), users.end());
    std::sort(ordered.begin(), ordered.end());
    std::vector<std::vector<CurvePoint>> curves;
    for (const UserCount u : ordered) {
      curves.push_back(sweep_curve(u, from_db_, to_db_, step_db, settings));
    }

    for (std::size_t c = 0; c < curves.size(); ++c) {
      const auto& curve = curves[c];
      const UserCount u = ordered[c];
      for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        report.add(curve[i + 1].lambda - curve[i].lambda,
                   at("lambda-nondecreasing", u, curve[i + 1].pi, curve[i + 1].lambda));
      }
      if (!u.is_massive()) {
        const double k = static_cast<double>(u.count());
        for (const CurvePoint& p : curve) {
          report.add(p.lambda - 1.0, at("lambda-at-least-1", u, p.pi, p.lambda));
          report.add(k - p.lambda, at("lambda-at-most-K", u, p.pi, p.lambda));
        }
      }

      // Unimodal: F rises up to its grid maximum and falls after it.
      const auto peak = static_cast<std::size_t>(
          std::max_element(curve.begin(), curve.end(),
                           [](const CurvePoint& a, const CurvePoint& b) { return a.F < b.F; }) -
          curve.begin());
      for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const double rise = curve[i + 1].F - curve[i].F;
        report.add(i < peak ? rise : -rise, at(i < peak ? "F-rising-before-peak" : "F-falling-after-peak", u,
                                               curve[i + 1].pi, curve[i + 1].lambda));
      }
      // An edge maximum means no interior peak; recorded as a unit violation.
      const bool interior = peak > 0 && peak + 1 < curve.size();
      const double edge_gap = curve[peak].F - std::max(curve.front().F, curve.back().F);
      report.add(interior ? edge_gap : -1.0, at("edges-below-peak", u, curve[peak].pi, curve[peak].lambda));
    }

    // lambda is nondecreasing in K and bounded by the massive curve.
    for (std::size_t c = 0; c + 1 < curves.size(); ++c) {
      for (std::size_t i = 0; i < curves[c].size(); ++i) {
        const CurvePoint& lower = curves[c][i];
        const CurvePoint& upper = curves[c + 1][i];
        report.add(upper.lambda - lower.lambda,
                   at("lambda-ordered-in-K(" + ordered[c].label() + "<=" + ordered[c + 1].label() + ")",
                      ordered[c + 1], upper.pi, upper.lambda));
      }
    }
  });
}

// --- Global bounds ---------------------------------------------------------

BoundReport check_thomas_and_improved(const SampleSpec& sample, const SolverSettings& settings) {
  return guarded("thomas_improved", [&](BoundReport& report) {
    for (const Sample& smp : draw_samples(sample)) {
      const GainSolution s = solve_lambda_star(smp.K, smp.P, settings);
      const UserCount users = UserCount::finite(smp.K);
      const double pi = static_cast<double>(smp.K) * smp.P;
      report.add(s.gain_F - 1.0, at("F-at-least-1", users, pi, s.lambda_star));
      report.add(2.0 - s.gain_F, at("F-below-2", users, pi, s.lambda_star));
      report.add(kImprovedBound - s.gain_F, at("F-below-1.5372", users, pi, s.lambda_star));
    }
  });
}

BoundReport check_massive_witness(const SolverSettings& settings) {
  return guarded("massive_witness", [&](BoundReport& report) {
    const double pi = 5.38;
    const GainSolution s = solve_lambda_massive(pi, settings);
    const UserCount massive = UserCount::massive();
    report.add(s.gain_F - 1.53, at("F-above-1.53", massive, pi, s.lambda_star));
    report.add(1.538 - s.gain_F, at("F-below-1.538", massive, pi, s.lambda_star));
  });
}

BoundReport check_massive_consistency(const SolverSettings& settings) {
  return guarded("massive_consistency", [&](BoundReport& report) {
    const UserCount massive = UserCount::massive();
    constexpr int kPoints = 100;
    for (int i = 0; i < kPoints; ++i) {
      const double pi = std::pow(10.0, -3.0 + 9.0 * i / (kPoints - 1));
      const double solved = solve_lambda_massive(pi, settings).lambda_star;
      const double inverted = invert_massive_parametric(pi, settings);
      report.add(kConsistencyTolerance - std::abs(solved - inverted) / inverted,
                 at("solver-matches-parametric", massive, pi, solved));
    }
  });
}

// --- Suite -----------------------------------------------------------------

std::vector<BoundReport> run_suite(const SampleSpec& sample, const SolverSettings& settings) {
  static constexpr double kDerivativeGrid[] = {0.1, 0.5, 1.0, 5.38, 10.0, 100.0, 1000.0};
  const std::vector<UserCount> figure_users = {UserCount::finite(2), UserCount::finite(3),
                                               UserCount::finite(10), UserCount::finite(100),
                                               UserCount::massive()};
  std::vector<BoundReport> reports;
  reports.push_back(check_sampled_point_bounds(sample, settings));
  reports.push_back(check_large_k_sandwich(settings));
  reports.push_back(check_tail_bounds(settings));
  reports.push_back(check_derivative(kDerivativeGrid, settings));
  reports.push_back(check_monotone_unimodal(figure_users, -10.0, 30.0, 0.1, settings));
  reports.push_back(check_thomas_and_improved(sample, settings));
  reports.push_back(check_massive_witness(settings));
  reports.push_back(check_massive_consistency(settings));
  return reports;
}

bool all_passed(std::span<const BoundReport> reports) {
  return std::all_of(reports.begin(), reports.end(), [](const BoundReport& r) { return r.passed(); });
}

std::string format_report_line(const BoundReport& report) {
  const std::string slack = format_number(report.worst_slack, 6);
  const std::string where = report.witness.inequality + " K=" + report.witness.users +
                            " pi=" + format_number(report.witness.pi, 9) +
                            " lambda=" + format_number(report.witness.lambda, 9);
  std::string line = report.check_name + " samples=" + std::to_string(report.samples) +
                     " violations=" + std::to_string(report.violations) + " worst_slack=" + slack +
                     " witness=\"" + where + "\"";
  if (report.error) line += " error=\"" + *report.error + "\"";
  line += report.passed() ? " status=pass" : " status=fail";
  return line;
}

}  // namespace fbgain::verify
