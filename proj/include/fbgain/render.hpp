#pragma once

// Text renderings of solver results: CSV, JSON, plain key=value text and the
// two gain figures. All numeric output goes through format_number, so it is
// locale independent and reproducible byte for byte.

#include <span>
#include <string>
#include <vector>

#include "fbgain/core.hpp"
#include "fbgain/solvers.hpp"

namespace fbgain {

inline constexpr int kDefaultPrecision = 9;

/// Header `pi_db,pi,K,lambda,lambda_db,F`; K is an integer or `inf`.
std::string curve_csv(std::span<const CurvePoint> points, int precision = kDefaultPrecision);
/// {"users": K | "massive", "points": [...]}
std::string curve_json(std::span<const CurvePoint> points, int precision = kDefaultPrecision);
/// Two stacked panels: lambda* in dB and F against pi in dB.
std::string curve_svg(std::span<const CurvePoint> points);

std::string solution_text(const GainSolution& s, int precision = kDefaultPrecision, bool bits = false);
std::string solution_csv(const GainSolution& s, int precision = kDefaultPrecision);
std::string solution_json(const GainSolution& s, int precision = kDefaultPrecision, bool bits = false);

std::string peak_text(const PeakResult& peak, UserCount users, int precision = kDefaultPrecision);
std::string peak_json(const PeakResult& peak, UserCount users, int precision = kDefaultPrecision);

enum class FigureKind { pfactor, cfactor };

struct FigureSpec {
  FigureKind which = FigureKind::cfactor;
  std::vector<UserCount> users = {UserCount::finite(2), UserCount::finite(3), UserCount::finite(10),
                                  UserCount::finite(100), UserCount::massive()};
  double from_db = -10.0;
  double to_db = 30.0;
  double step_db = 0.1;

  void validate() const;
};

/// One swept curve per user count, ordered by increasing K with the massive
/// limit last (the uppermost curve in both figures).
struct FigureData {
  FigureSpec spec;
  std::vector<std::vector<CurvePoint>> series;
};

FigureData build_figure(const FigureSpec& spec, const SolverSettings& settings = {}, unsigned threads = 1);

/// One block per series, each introduced by `# K=<label>`. pfactor blocks
/// carry `pi_db,lambda,lambda_db`; cfactor blocks carry `pi_db,F`.
std::string figure_csv(const FigureData& figure, int precision = kDefaultPrecision);
std::string figure_svg(const FigureData& figure);

}  // namespace fbgain
