#include "mfsync/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace mfsync {

namespace {

nlohmann::json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

nlohmann::json to_json(const NormBounds& b) {
  return {{"F", number(b.f)}, {"dF", number(b.df)}, {"d2F", number(b.d2f)}};
}

nlohmann::json to_json(const HypothesisReport& r) {
  return {{"alpha", number(r.alpha)},
          {"L_components", to_json(r.l_components)},
          {"L", number(r.l_total)},
          {"lambda_integral", number(r.lambda_integral)},
          {"lambda1", number(r.lambda1)},
          {"lambda2", number(r.lambda2)},
          {"holds_H", r.holds_h},
          {"holds_Hstar", r.holds_hstar},
          {"periodicity_defect", number(r.periodicity_defect)},
          {"diagnostic", r.diagnostic}};
}

nlohmann::json to_json(const DispersionParams& p) {
  return {{"eta", {number(p.eta.e1), number(p.eta.e2), number(p.eta.e3)}},
          {"lambda1", number(p.lambda1)},
          {"lambda2", number(p.lambda2)},
          {"D_star", number(p.d_star)},
          {"D", number(p.d)},
          {"r", number(p.radius)},
          {"c", number(p.c)},
          {"balance_residual", number(p.balance_residual())}};
}

nlohmann::json to_json(const SyncVerdict& v) {
  return {{"invariant", v.invariant},
          {"min_margin", number(v.min_margin)},
          {"dynamical", v.dynamical},
          {"min_velocity", number(v.min_velocity)},
          {"max_spread", number(v.max_spread)},
          {"spread_ok", v.spread_ok},
          {"steps_checked", v.steps_checked},
          {"violations", v.violations}};
}

nlohmann::json to_json(const LockResult& r) {
  return {{"converged", r.converged},
          {"method", r.method},
          {"iterations", r.iterations},
          {"message", r.message},
          {"x_star", r.x_star},
          {"theta_star", number(r.theta_star)},
          {"rho", number(r.rho)},
          {"residual", number(r.residual)},
          {"periodicity_residual", number(r.periodicity_residual)},
          {"theta_bounds_ok", r.theta_bounds_ok},
          {"sigma_ok", r.sigma_ok},
          {"map_evaluations", r.thetas.size()}};
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot write " + path);
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw std::logic_error("csv row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    out_ << (i ? "," : "") << format_double(values[i]);
  }
  out_ << '\n';
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

void write_svg(const std::string& path, const std::string& title,
               const std::vector<SvgSeries>& series) {
  constexpr double W = 640, H = 400, pad = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : s.y) {
      if (!std::isfinite(v)) continue;
      y0 = std::min(y0, v), y1 = std::max(y1, v);
    }
  }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  auto px = [&](double v) { return pad + (v - x0) / (x1 - x0) * (W - 2 * pad); };
  auto py = [&](double v) { return H - pad - (v - y0) / (y1 - y0) * (H - 2 * pad); };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title << "</text>\n";
  out << "<polyline fill=\"none\" stroke=\"black\" points=\"" << pad << ',' << pad << ' ' << pad
      << ',' << H - pad << ' ' << W - pad << ',' << H - pad << "\"/>\n";
  out << "<text x=\"" << pad << "\" y=\"" << H - pad + 15 << "\">" << format_double(x0)
      << "</text>\n";
  out << "<text x=\"" << W - pad << "\" y=\"" << H - pad + 15 << "\" text-anchor=\"end\">"
      << format_double(x1) << "</text>\n";
  out << "<text x=\"" << pad - 4 << "\" y=\"" << H - pad << "\" text-anchor=\"end\">"
      << format_double(y0) << "</text>\n";
  out << "<text x=\"" << pad - 4 << "\" y=\"" << pad + 4 << "\" text-anchor=\"end\">"
      << format_double(y1) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" points=\"";
    const std::size_t n = std::min(s.x.size(), s.y.size());
    // thin very long series, a few thousand vertices are plenty
    const std::size_t stride = std::max<std::size_t>(1, n / 4000);
    for (std::size_t i = 0; i < n; i += stride) {
      if (!std::isfinite(s.y[i])) continue;
      out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << W - pad - 4 << "\" y=\"" << pad + 14 * (k + 1)
        << "\" text-anchor=\"end\" fill=\"" << s.color << "\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace mfsync
