#include "caccguard/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>

#include "caccguard/errors.hpp"
#include "caccguard/supervisor.hpp"

namespace caccguard {

namespace {

constexpr double kWidth = 860.0;
constexpr double kPanelHeight = 170.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 16.0;
constexpr double kGap = 34.0;
constexpr double kBottom = 40.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

using Getter = std::function<double(const TraceRow&)>;

struct Series {
  std::string label;
  Getter get;
};

struct Panel {
  std::string title;
  std::vector<Series> series;
  bool mode = false;
};

const char* const kRealizationSuffix[] = {"1_1", "1_2", "2_1", "2_2"};

std::vector<Series> vehicle_group(char field, std::size_t vehicles) {
  std::vector<Series> out;
  for (std::size_t i = 0; i < vehicles; ++i) {
    Getter g;
    switch (field) {
      case 'p': g = [i](const TraceRow& r) { return r.vehicles.at(i).p; }; break;
      case 'v': g = [i](const TraceRow& r) { return r.vehicles.at(i).v; }; break;
      default: g = [i](const TraceRow& r) { return r.vehicles.at(i).a; }; break;
    }
    out.push_back({fmt::format("{}_{}", field, i), std::move(g)});
  }
  return out;
}

std::vector<Series> realization_group(bool outputs) {
  std::vector<Series> out;
  for (std::size_t i = 0; i < 4; ++i) {
    Getter g = outputs ? Getter([i](const TraceRow& r) { return r.u[i]; })
                       : Getter([i](const TraceRow& r) { return r.rho[i]; });
    out.push_back({fmt::format("{}_{}", outputs ? "u" : "rho", kRealizationSuffix[i]), std::move(g)});
  }
  return out;
}

Panel resolve(const std::string& name, std::size_t vehicles) {
  if (name == "mode") return {"mode", {}, true};
  if (name == "p" || name == "v" || name == "a") return {name, vehicle_group(name[0], vehicles)};
  if (name == "u") return {"u", realization_group(true)};
  if (name == "rho") return {"rho", realization_group(false)};
  if (name == "e") return {"e", {{"e", [](const TraceRow& r) { return r.e; }}}};
  if (name == "u_star") return {"u_star", {{"u_star", [](const TraceRow& r) { return r.u_star; }}}};
  if (name == "j") return {"j", {{"j", [](const TraceRow& r) { return static_cast<double>(r.j); }}}};
  for (bool outputs : {true, false}) {
    for (auto& s : realization_group(outputs)) {
      if (s.label == name) return {name, {std::move(s)}};
    }
  }
  for (char field : {'p', 'v', 'a'}) {
    for (auto& s : vehicle_group(field, vehicles)) {
      if (s.label == name) return {name, {std::move(s)}};
    }
  }
  throw ConfigError(fmt::format("unknown plot variable '{}' (known: {})", name,
                                fmt::format("{}", fmt::join(plot_variables(vehicles), ", "))));
}

struct Frame {
  double x0, x1, y0, y1;  // pixel box
  double t0, t1, v0, v1;  // data box

  double x(double t) const { return x0 + (t - t0) / (t1 - t0) * (x1 - x0); }
  double y(double v) const { return y1 - (v - v0) / (v1 - v0) * (y1 - y0); }
};

// Keeps first, min, max and last point of every pixel column.
std::vector<std::pair<double, double>> decimate(const std::vector<TraceRow>& rows, const Getter& get,
                                                const Frame& f) {
  std::vector<std::pair<double, double>> out;
  std::size_t i = 0;
  while (i < rows.size()) {
    const long column = std::lround(f.x(rows[i].t));
    std::size_t end = i;
    std::size_t lo = i;
    std::size_t hi = i;
    while (end < rows.size() && std::lround(f.x(rows[end].t)) == column) {
      if (get(rows[end]) < get(rows[lo])) lo = end;
      if (get(rows[end]) > get(rows[hi])) hi = end;
      ++end;
    }
    std::vector<std::size_t> keep{i, lo, hi, end - 1};
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    for (std::size_t k : keep) out.emplace_back(rows[k].t, get(rows[k]));
    i = end;
  }
  return out;
}

std::string polyline(const std::vector<std::pair<double, double>>& pts, const Frame& f) {
  std::string d;
  for (const auto& [t, v] : pts) d += fmt::format("{:.2f},{:.2f} ", f.x(t), f.y(v));
  if (!d.empty()) d.pop_back();
  return d;
}

std::string tick(double v) { return fmt::format("{:.4g}", v); }

}  // namespace

std::vector<std::string> plot_variables(std::size_t vehicles) {
  std::vector<std::string> out{"mode", "p", "v", "a", "e", "rho", "u", "u_star", "j"};
  for (std::size_t i = 0; i < vehicles; ++i) {
    for (char field : {'p', 'v', 'a'}) out.push_back(fmt::format("{}_{}", field, i));
  }
  for (const char* s : kRealizationSuffix) {
    out.push_back(fmt::format("rho_{}", s));
    out.push_back(fmt::format("u_{}", s));
  }
  return out;
}

std::vector<std::string> default_plot_panels() { return {"v", "u_star", "mode"}; }

void plot(std::ostream& out, const std::vector<TraceRow>& rows, std::vector<std::string> variables) {
  if (rows.empty()) throw ConfigError("cannot plot an empty trace");
  if (variables.empty()) variables = default_plot_panels();
  const std::size_t vehicles = rows.front().vehicles.size();

  std::vector<Panel> panels;
  for (const auto& v : variables) panels.push_back(resolve(v, vehicles));

  double t0 = rows.front().t;
  double t1 = rows.back().t;
  if (t1 <= t0) t1 = t0 + 1.0;

  std::vector<double> jumps;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].j > rows[i - 1].j) jumps.push_back(rows[i].t);
  }

  const double height =
      kTop + static_cast<double>(panels.size()) * (kPanelHeight + kGap) - kGap + kBottom;
  fmt::print(out,
             "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
             "viewBox=\"0 0 {:.0f} {:.0f}\" font-family=\"sans-serif\" font-size=\"11\">\n",
             kWidth, height, kWidth, height);
  fmt::print(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const Panel& panel = panels[p];
    const double top = kTop + static_cast<double>(p) * (kPanelHeight + kGap);
    Frame f{kLeft, kWidth - kRight, top, top + kPanelHeight, t0, t1, 0.0, 1.0};

    if (panel.mode) {
      f.v0 = -0.5;
      f.v1 = 4.5;
    } else {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (const auto& s : panel.series) {
        for (const auto& r : rows) {
          const double v = s.get(r);
          if (!std::isfinite(v)) continue;
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
      if (!std::isfinite(lo)) lo = hi = 0.0;
      const double pad = hi > lo ? 0.05 * (hi - lo) : std::max(1.0, std::abs(lo) * 0.05);
      f.v0 = lo - pad;
      f.v1 = hi + pad;
    }

    fmt::print(out, "<g class=\"panel\" id=\"panel-{}\">\n", panel.title);
    fmt::print(out,
               "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
               "stroke=\"#444\"/>\n",
               f.x0, f.y0, f.x1 - f.x0, f.y1 - f.y0);
    fmt::print(out, "<text x=\"{:.2f}\" y=\"{:.2f}\" font-weight=\"bold\">{}</text>\n", f.x0 + 4,
               f.y0 + 13, panel.title);

    if (panel.mode) {
      for (Mode m : kModes) {
        const double y = f.y(static_cast<double>(static_cast<int>(m)));
        fmt::print(out, "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", f.x0 - 6,
                   y + 4, to_string(m));
        fmt::print(out,
                   "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#eee\"/>\n",
                   f.x0, y, f.x1, y);
      }
      std::string d;
      double prev = -1.0;
      for (const auto& r : rows) {
        const double level = static_cast<double>(static_cast<int>(parse_mode(r.mode).value_or(Mode::q0)));
        if (level == prev && &r != &rows.back()) continue;
        if (prev >= 0.0 && level != prev) d += fmt::format("{:.2f},{:.2f} ", f.x(r.t), f.y(prev));
        d += fmt::format("{:.2f},{:.2f} ", f.x(r.t), f.y(level));
        prev = level;
      }
      if (!d.empty()) d.pop_back();
      fmt::print(out, "<polyline class=\"mode\" fill=\"none\" stroke=\"#000\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                 d);
    } else {
      for (double v : {f.v0, 0.5 * (f.v0 + f.v1), f.v1}) {
        fmt::print(out, "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", f.x0 - 6,
                   f.y(v) + 4, tick(v));
      }
      for (std::size_t s = 0; s < panel.series.size(); ++s) {
        const char* color = kPalette[s % std::size(kPalette)];
        fmt::print(out,
                   "<polyline class=\"series\" fill=\"none\" stroke=\"{}\" stroke-width=\"1\" "
                   "points=\"{}\"/>\n",
                   color, polyline(decimate(rows, panel.series[s].get, f), f));
        if (panel.series.size() > 1) {
          fmt::print(out, "<text x=\"{:.2f}\" y=\"{:.2f}\" fill=\"{}\">{}</text>\n",
                     f.x1 - 70, f.y0 + 14 + 12 * static_cast<double>(s), color, panel.series[s].label);
        }
      }
    }

    for (double t : jumps) {
      fmt::print(out,
                 "<line class=\"jump\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" "
                 "stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n",
                 f.x(t), f.y0, f.x(t), f.y1);
    }
    fmt::print(out, "</g>\n");
  }

  const double axis_y = height - kBottom + 16;
  for (int i = 0; i <= 6; ++i) {
    const double t = t0 + (t1 - t0) * i / 6.0;
    const double x = kLeft + (kWidth - kRight - kLeft) * i / 6.0;
    fmt::print(out, "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", x, axis_y,
               tick(t));
  }
  fmt::print(out, "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">t [s]</text>\n",
             0.5 * (kLeft + kWidth - kRight), axis_y + 16);
  fmt::print(out, "</svg>\n");
}

void plot(const std::filesystem::path& trace, const std::filesystem::path& output,
          const std::vector<std::string>& variables) {
  const auto rows = read_trace(trace);
  std::ostringstream svg;
  plot(svg, rows, variables);
  std::ofstream out(output);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", output.string()));
  out << svg.str();
  if (!out) throw IoError(fmt::format("failed writing '{}'", output.string()));
}

}  // namespace caccguard
