#include "fbgain/render.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

#include "fbgain/format.hpp"
#include "fbgain/svg.hpp"

namespace fbgain {

namespace {

using nlohmann::json;

// Value as it reads back from its rendered text, so JSON output carries
// exactly the requested number of significant digits.
double rounded(double v, int precision) { return parse_number(format_number(v, precision)); }

json users_json(UserCount users) {
  return users.is_massive() ? json("massive") : json(users.count());
}

std::string lambda_db_axis_label() { return "power gain factor \xCE\xBB* [dB]"; }

}  // namespace

std::string curve_csv(std::span<const CurvePoint> points, int precision) {
  std::string out = "pi_db,pi,K,lambda,lambda_db,F\n";
  for (const CurvePoint& p : points) {
    out += format_number(p.pi_db, precision) + ',' + format_number(p.pi, precision) + ',' +
           p.users.label() + ',' + format_number(p.lambda, precision) + ',' +
           format_number(p.lambda_db, precision) + ',' + format_number(p.F, precision) + '\n';
  }
  return out;
}

std::string curve_json(std::span<const CurvePoint> points, int precision) {
  json doc;
  doc["users"] = points.empty() ? json(nullptr) : users_json(points.front().users);
  json rows = json::array();
  for (const CurvePoint& p : points) {
    rows.push_back({{"pi_db", rounded(p.pi_db, precision)},
                    {"pi", rounded(p.pi, precision)},
                    {"K", users_json(p.users)},
                    {"lambda", rounded(p.lambda, precision)},
                    {"lambda_db", rounded(p.lambda_db, precision)},
                    {"F", rounded(p.F, precision)}});
  }
  doc["points"] = std::move(rows);
  return doc.dump(2) + '\n';
}

std::string curve_svg(std::span<const CurvePoint> points) {
  if (points.empty()) throw std::domain_error("curve_svg: no points");
  const std::string label = "K=" + points.front().users.label();
  svg::Series lambda{label, {}};
  svg::Series gain{label, {}};
  for (const CurvePoint& p : points) {
    lambda.points.emplace_back(p.pi_db, p.lambda_db);
    gain.points.emplace_back(p.pi_db, p.F);
  }
  const std::vector<svg::Panel> panels = {
      {"Power gain factor \xCE\xBB* vs. \xCF\x80", "total power \xCF\x80 [dB]", lambda_db_axis_label(), {lambda}},
      {"Capacity gain factor F(\xCF\x80) vs. \xCF\x80", "total power \xCF\x80 [dB]",
       "capacity gain factor F(\xCF\x80)", {gain}}};
  return svg::render(panels);
}

std::string solution_text(const GainSolution& s, int precision, bool bits) {
  const double pi = s.config.total_power();
  const auto line = [&](const char* key, double v) { return std::string(key) + '=' + format_number(v, precision) + '\n'; };
  std::string out = "K=" + s.config.users.label() + '\n';
  out += line("pi", pi);
  out += line("pi_db", to_db(pi));
  out += line("lambda", s.lambda_star);
  out += line("lambda_db", to_db(s.lambda_star));
  out += line("C_nofb_nats", s.capacity_nofb);
  out += line("C_fb_nats", s.capacity_fb);
  if (bits) {
    out += line("C_nofb_bits", s.capacity_nofb / std::log(2.0));
    out += line("C_fb_bits", s.capacity_fb / std::log(2.0));
  }
  out += line("F", s.gain_F);
  out += line("residual", s.residual);
  out += "iterations=" + std::to_string(s.iterations) + '\n';
  return out;
}

std::string solution_csv(const GainSolution& s, int precision) {
  const double pi = s.config.total_power();
  return "K,pi,pi_db,lambda,lambda_db,C_nofb_nats,C_fb_nats,F,residual,iterations\n" +
         s.config.users.label() + ',' + format_number(pi, precision) + ',' +
         format_number(to_db(pi), precision) + ',' + format_number(s.lambda_star, precision) + ',' +
         format_number(to_db(s.lambda_star), precision) + ',' + format_number(s.capacity_nofb, precision) +
         ',' + format_number(s.capacity_fb, precision) + ',' + format_number(s.gain_F, precision) + ',' +
         format_number(s.residual, precision) + ',' + std::to_string(s.iterations) + '\n';
}

std::string solution_json(const GainSolution& s, int precision, bool bits) {
  const double pi = s.config.total_power();
  json doc = {{"K", users_json(s.config.users)},
              {"pi", rounded(pi, precision)},
              {"pi_db", rounded(to_db(pi), precision)},
              {"lambda", rounded(s.lambda_star, precision)},
              {"lambda_db", rounded(to_db(s.lambda_star), precision)},
              {"C_nofb_nats", rounded(s.capacity_nofb, precision)},
              {"C_fb_nats", rounded(s.capacity_fb, precision)},
              {"F", rounded(s.gain_F, precision)},
              {"residual", rounded(s.residual, precision)},
              {"iterations", s.iterations},
              {"degenerate", s.degenerate}};
  if (bits) {
    doc["C_nofb_bits"] = rounded(s.capacity_nofb / std::log(2.0), precision);
    doc["C_fb_bits"] = rounded(s.capacity_fb / std::log(2.0), precision);
  }
  return doc.dump(2) + '\n';
}

std::string peak_text(const PeakResult& peak, UserCount users, int precision) {
  std::string out = "K=" + users.label() + '\n';
  out += "pi_star=" + format_number(peak.pi_star, precision) + '\n';
  out += "pi_star_db=" + format_number(peak.pi_star_db, precision) + '\n';
  out += "F_star=" + format_number(peak.F_star, precision) + '\n';
  out += "lambda=" + format_number(peak.lambda_at_peak, precision) + '\n';
  out += "bracket_db=";
  for (std::size_t i = 0; i < peak.bracket_evidence.size(); ++i) {
    if (i) out += ',';
    out += format_number(peak.bracket_evidence[i].pi_db, precision);
  }
  out += '\n';
  return out;
}

std::string peak_json(const PeakResult& peak, UserCount users, int precision) {
  json bracket = json::array();
  for (const ScanSample& s : peak.bracket_evidence) {
    bracket.push_back({{"pi_db", rounded(s.pi_db, precision)}, {"F", rounded(s.F, precision)}});
  }
  const json doc = {{"K", users_json(users)},
                    {"pi_star", rounded(peak.pi_star, precision)},
                    {"pi_star_db", rounded(peak.pi_star_db, precision)},
                    {"F_star", rounded(peak.F_star, precision)},
                    {"lambda", rounded(peak.lambda_at_peak, precision)},
                    {"bracket", bracket}};
  return doc.dump(2) + '\n';
}

// --- Figures ---------------------------------------------------------------

void FigureSpec::validate() const {
  if (users.empty()) throw std::domain_error("figure: user list is empty");
  if (!(step_db > 0.0)) throw std::domain_error("figure: step_db must be positive");
  if (!(from_db <= to_db)) throw std::domain_error("figure: from_db exceeds to_db");
}

FigureData build_figure(const FigureSpec& spec, const SolverSettings& settings, unsigned threads) {
  spec.validate();
  FigureData fig{spec, {}};
  std::sort(fig.spec.users.begin(), fig.spec.users.end());
  fig.spec.users.erase(std::unique(fig.spec.users.begin(), fig.spec.users.end()), fig.spec.users.end());
  for (const UserCount u : fig.spec.users) {
    fig.series.push_back(sweep_curve(u, spec.from_db, spec.to_db, spec.step_db, settings, threads));
  }
  return fig;
}

std::string figure_csv(const FigureData& figure, int precision) {
  const bool pfactor = figure.spec.which == FigureKind::pfactor;
  std::string out;
  for (std::size_t i = 0; i < figure.series.size(); ++i) {
    out += "# K=" + figure.spec.users[i].label() + '\n';
    out += pfactor ? "pi_db,lambda,lambda_db\n" : "pi_db,F\n";
    for (const CurvePoint& p : figure.series[i]) {
      out += format_number(p.pi_db, precision);
      if (pfactor) {
        out += ',' + format_number(p.lambda, precision) + ',' + format_number(p.lambda_db, precision);
      } else {
        out += ',' + format_number(p.F, precision);
      }
      out += '\n';
    }
  }
  return out;
}

std::string figure_svg(const FigureData& figure) {
  const bool pfactor = figure.spec.which == FigureKind::pfactor;
  svg::Panel panel;
  panel.title = pfactor ? "Power gain factor \xCE\xBB* vs. \xCF\x80" : "Capacity gain factor F(\xCF\x80) vs. \xCF\x80";
  panel.x_label = "total power \xCF\x80 [dB]";
  panel.y_label = pfactor ? lambda_db_axis_label() : "capacity gain factor F(\xCF\x80)";
  for (std::size_t i = 0; i < figure.series.size(); ++i) {
    svg::Series s{"K=" + (figure.spec.users[i].is_massive() ? std::string("\xE2\x88\x9E")
                                                              : figure.spec.users[i].label()),
                  {}};
    for (const CurvePoint& p : figure.series[i]) {
      s.points.emplace_back(p.pi_db, pfactor ? p.lambda_db : p.F);
    }
    panel.series.push_back(std::move(s));
  }
  return svg::render(std::span<const svg::Panel>(&panel, 1));
}

}  // namespace fbgain
