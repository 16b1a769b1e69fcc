#include "fbgain/cli.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "CLI11.hpp"
#include "fbgain/format.hpp"
#include "fbgain/render.hpp"
#include "fbgain/solvers.hpp"
#include "fbgain/verify.hpp"

namespace fbgain::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UserFlags {
  std::optional<std::int64_t> users;
  bool massive = false;

  void attach(CLI::App& cmd) {
    auto* k = cmd.add_option("--users", users, "number of users K (>= 2)");
    auto* m = cmd.add_flag("--massive", massive, "massive-user limit K -> inf");
    k->excludes(m);
  }

  UserCount resolve() const {
    if (massive == users.has_value()) throw UsageError("exactly one of --users or --massive is required");
    if (massive) return UserCount::massive();
    if (*users < 2) throw UsageError("--users must be at least 2");
    return UserCount::finite(*users);
  }
};

struct OutputFlags {
  std::string format;
  std::string out;
  int precision = kDefaultPrecision;

  void attach(CLI::App& cmd, std::string default_format, std::vector<std::string> formats) {
    format = std::move(default_format);
    cmd.add_option("--format", format, "output format")->check(CLI::IsMember(std::move(formats)));
    cmd.add_option("--out", out, "output file (default: standard output)");
    cmd.add_option("--precision", precision, "significant digits")->check(CLI::Range(1, 17));
  }
};

struct RangeFlags {
  double from_db = -10.0;
  double to_db = 30.0;
  double step_db = 0.1;

  void attach(CLI::App& cmd, bool with_step) {
    cmd.add_option("--from-db", from_db, "range start, total power in dB");
    cmd.add_option("--to-db", to_db, "range end, total power in dB");
    if (with_step) cmd.add_option("--step-db", step_db, "grid step in dB");
  }

  void validate(bool allow_single) const {
    if (!std::isfinite(from_db) || !std::isfinite(to_db)) throw UsageError("range must be finite");
    if (allow_single ? from_db > to_db : from_db >= to_db) throw UsageError("bad range: --from-db must be below --to-db");
    if (!(step_db > 0.0) || !std::isfinite(step_db)) throw UsageError("bad range: --step-db must be positive");
  }
};

UserCount parse_user_token(const std::string& token) {
  if (token == "inf" || token == "massive") return UserCount::massive();
  std::int64_t k = 0;
  try {
    std::size_t used = 0;
    k = std::stoll(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
  } catch (const std::exception&) {
    throw UsageError("invalid user count '" + token + "'");
  }
  if (k < 2) throw UsageError("user counts must be at least 2");
  return UserCount::finite(k);
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path);
  file << text;
  if (!file) throw std::runtime_error("failed to write " + path);
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feedback capacity gains of Gaussian multiple-access channels", "fbgain"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "solve one operating point");
  UserFlags solve_users;
  solve_users.attach(*solve);
  std::optional<double> power_db;
  std::optional<double> total_power_db;
  bool bits = false;
  auto* p_opt = solve->add_option("--power-db", power_db, "per-user power P in dB");
  auto* t_opt = solve->add_option("--total-power-db", total_power_db, "total power pi in dB");
  p_opt->excludes(t_opt);
  solve->add_flag("--bits", bits, "also print capacities in bits");
  OutputFlags solve_out;
  solve_out.attach(*solve, "text", {"text", "csv", "json"});

  // curve
  auto* curve = app.add_subcommand("curve", "sweep lambda* and F over total power");
  UserFlags curve_users;
  curve_users.attach(*curve);
  RangeFlags curve_range;
  curve_range.attach(*curve, true);
  unsigned threads = 1;
  curve->add_option("--threads", threads, "worker threads (0 = all cores)");
  OutputFlags curve_out;
  curve_out.attach(*curve, "csv", {"csv", "json", "svg"});

  // peak
  auto* peak = app.add_subcommand("peak", "locate the maximal capacity gain factor");
  UserFlags peak_users;
  peak_users.attach(*peak);
  RangeFlags peak_range;
  peak_range.attach(*peak, false);
  OutputFlags peak_out;
  peak_out.attach(*peak, "text", {"text", "json"});

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "run the bound verification suite");
  verify::SampleSpec sample;
  std::string fault = "none";
  verify_cmd->add_option("--seed", sample.seed, "random seed");
  verify_cmd->add_option("--samples", sample.n_samples, "number of random (K, P) samples")
      ->check(CLI::PositiveNumber);
  verify_cmd->add_option("--inject-fault", fault, "negative-control fault injection")
      ->check(CLI::IsMember({"none", "negate-residual"}))
      ->group("");
  std::string verify_path;
  verify_cmd->add_option("--out", verify_path, "output file (default: standard output)");

  // figure
  auto* figure = app.add_subcommand("figure", "regenerate the power or capacity gain figure");
  std::string which;
  std::vector<std::string> figure_user_tokens;
  figure->add_option("--which", which, "pfactor or cfactor")
      ->required()
      ->check(CLI::IsMember({"pfactor", "cfactor"}));
  figure->add_option("--users", figure_user_tokens, "user counts (integers, or inf for the massive limit)")
      ->delimiter(',');
  RangeFlags figure_range;
  figure_range.attach(*figure, true);
  figure->add_option("--threads", threads, "worker threads (0 = all cores)");
  OutputFlags figure_out;
  figure_out.attach(*figure, "", {"", "csv", "svg"});

  std::vector<const char*> argv{"fbgain"};
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    const SolverSettings settings;

    if (*solve) {
      const UserCount users = solve_users.resolve();
      if (power_db.has_value() == total_power_db.has_value()) {
        throw UsageError("exactly one of --power-db or --total-power-db is required");
      }
      if (users.is_massive() && power_db) throw UsageError("--massive requires --total-power-db");
      const ChannelConfig config =
          power_db ? ChannelConfig{users, PerUserPower{from_db(*power_db)}}
                   : ChannelConfig{users, TotalPower{from_db(*total_power_db)}};
      try {
        config.validate();
      } catch (const std::domain_error& e) {
        throw UsageError(e.what());
      }
      const GainSolution s = eval_point(config, settings);
      const int p = solve_out.precision;
      const std::string text = solve_out.format == "json"  ? solution_json(s, p, bits)
                               : solve_out.format == "csv" ? solution_csv(s, p)
                                                           : solution_text(s, p, bits);
      emit(text, solve_out.out, out);
      return kSuccess;
    }

    if (*curve) {
      const UserCount users = curve_users.resolve();
      curve_range.validate(true);
      const auto points =
          sweep_curve(users, curve_range.from_db, curve_range.to_db, curve_range.step_db, settings, threads);
      const int p = curve_out.precision;
      const std::string text = curve_out.format == "json"  ? curve_json(points, p)
                               : curve_out.format == "svg" ? curve_svg(points)
                                                           : curve_csv(points, p);
      emit(text, curve_out.out, out);
      return kSuccess;
    }

    if (*peak) {
      const UserCount users = peak_users.resolve();
      peak_range.validate(false);
      try {
        const PeakResult r = find_peak(users, peak_range.from_db, peak_range.to_db, settings);
        const int p = peak_out.precision;
        emit(peak_out.format == "json" ? peak_json(r, users, p) : peak_text(r, users, p), peak_out.out, out);
      } catch (const NoInteriorPeakError& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
      }
      return kSuccess;
    }

    if (*verify_cmd) {
      SolverSettings checked = settings;
      if (fault == "negate-residual") checked.fault = FaultInjection::negate_residual;
      const auto reports = verify::run_suite(sample, checked);
      std::string text;
      for (const auto& r : reports) text += verify::format_report_line(r) + '\n';
      emit(text, verify_path, out);
      return verify::all_passed(reports) ? kSuccess : kFailure;
    }

    if (*figure) {
      FigureSpec spec;
      spec.which = which == "pfactor" ? FigureKind::pfactor : FigureKind::cfactor;
      if (!figure_user_tokens.empty()) {
        spec.users.clear();
        for (const auto& token : figure_user_tokens) spec.users.push_back(parse_user_token(token));
      }
      figure_range.validate(true);
      spec.from_db = figure_range.from_db;
      spec.to_db = figure_range.to_db;
      spec.step_db = figure_range.step_db;

      std::string format = figure_out.format;
      if (format.empty()) {
        const std::string& path = figure_out.out;
        format = path.size() >= 4 && path.compare(path.size() - 4, 4, ".svg") == 0 ? "svg" : "csv";
      }
      const FigureData data = build_figure(spec, settings, threads);
      emit(format == "svg" ? figure_svg(data) : figure_csv(data, figure_out.precision), figure_out.out, out);
      return kSuccess;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace fbgain::cli
