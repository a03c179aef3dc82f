// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>

#include <fmt/format.h>

#include "commands.hpp"
#include "output.hpp"

namespace bhtherm::cli {

namespace {

namespace fs = std::filesystem;

std::string color(double t) {
  static constexpr std::array<std::array<double, 3>, 5> stops{{{68, 1, 84},
                                                               {59, 82, 139},
                                                               {33, 145, 140},
                                                               {94, 201, 98},
                                                               {253, 231, 37}}};
  if (!std::isfinite(t)) return "#dddddd";
  t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
  const double f = t - static_cast<double>(i);
  std::array<int, 3> rgb{};
  for (int k = 0; k < 3; ++k)
    rgb[static_cast<std::size_t>(k)] = static_cast<int>(std::lround(stops[i][k] + f * (stops[i + 1][k] - stops[i][k])));
  return fmt::format("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2]);
}

constexpr std::array<const char*, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

class Svg {
 public:
  Svg(int w, int h) : w_(w), h_(h) {}

  void raw(const std::string& s) { body_ += s; }
  void text(double x, double y, const std::string& s, const char* anchor = "middle", int size = 12) {
    body_ += fmt::format(R"(<text x="{:.1f}" y="{:.1f}" font-size="{}" text-anchor="{}">{}</text>)"
                         "\n",
                         x, y, size, anchor, s);
  }
  std::string str() const {
    return fmt::format(
        R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif">)"
        "\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
        w_, h_, body_);
  }

 private:
  int w_, h_;
  std::string body_;
};

/// Plot area with linear or log axes.
struct Panel {
  double x0, y0, w, h;  // pixel box
  Range xr, yr;
  bool logx = false;

  double px(double x) const {
    const double t = logx ? (std::log(x) - std::log(xr.lo)) / (std::log(xr.hi) - std::log(xr.lo))
                          : (x - xr.lo) / (xr.hi - xr.lo);
    return x0 + t * w;
  }
  double py(double y) const { return y0 + h - (y - yr.lo) / (yr.hi - yr.lo) * h; }

  void axes(Svg& svg, const std::string& xlabel, const std::string& ylabel) const {
    svg.raw(fmt::format(R"(<rect x="{:.1f}" y="{:.1f}" width="{:.1f}" height="{:.1f}" fill="none" stroke="black"/>)"
                        "\n",
                        x0, y0, w, h));
    for (int i = 0; i <= 4; ++i) {
      const double fx = logx ? std::exp(std::log(xr.lo) + i * (std::log(xr.hi) - std::log(xr.lo)) / 4)
                             : xr.lo + i * (xr.hi - xr.lo) / 4;
      const double fy = yr.lo + i * (yr.hi - yr.lo) / 4;
      svg.text(px(fx), y0 + h + 16, fmt::format("{:.3g}", fx));
      svg.text(x0 - 6, py(fy) + 4, fmt::format("{:.3g}", fy), "end");
    }
    svg.text(x0 + w / 2, y0 + h + 34, xlabel);
    svg.raw(fmt::format(R"svg(<text x="{:.1f}" y="{:.1f}" font-size="12" text-anchor="middle" transform="rotate(-90 {:.1f} {:.1f})">{}</text>)svg"
                        "\n",
                        x0 - 46, y0 + h / 2, x0 - 46, y0 + h / 2, ylabel));
  }

  void line(Svg& svg, const std::vector<double>& xs, const std::vector<double>& ys, const char* stroke,
            const char* dash = nullptr) const {
    std::string pts;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) continue;
      pts += fmt::format("{:.2f},{:.2f} ", px(xs[i]), py(ys[i]));
    }
    svg.raw(fmt::format(R"(<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"{}/>)"
                        "\n",
                        pts, stroke, dash ? fmt::format(R"( stroke-dasharray="{}")", dash) : ""));
  }

  void dots(Svg& svg, const std::vector<double>& xs, const std::vector<double>& ys, const char* fill,
            double r = 2.5) const {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) continue;
      svg.raw(fmt::format(R"(<circle cx="{:.2f}" cy="{:.2f}" r="{}" fill="{}"/>)"
                          "\n",
                          px(xs[i]), py(ys[i]), r, fill));
    }
  }
};

std::map<std::string, double> read_summary(const fs::path& p) {
  std::map<std::string, double> m;
  if (!fs::exists(p)) return m;
  const Table t = read_csv(p);
  for (const auto& r : t.rows)
    if (r.size() == 2) m[r[0]] = std::stod(r[1]);
  return m;
}

bool usable(const fs::path& p, std::ostream& log) {
  if (!fs::exists(p)) return false;
  if (read_csv(p).rows.empty()) {
    log << "warning: " << p.filename().string() << " has no rows; plot skipped\n";
    return false;
  }
  return true;
}

void save(const fs::path& dir, const std::string& name, const Svg& svg, int& count, std::ostream& log) {
  write_atomic(dir / name, svg.str());
  log << "wrote " << (dir / name).string() << '\n';
  ++count;
}

void heat_cells(Svg& svg, const Panel& p, const std::vector<double>& xs, const std::vector<double>& ys,
                const std::vector<double>& vs, double dx, double dy, Range vr) {
  vr.pad();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double t = (vs[i] - vr.lo) / (vr.hi - vr.lo);
    const double left = p.px(xs[i] - dx / 2), right = p.px(xs[i] + dx / 2);
    const double top = p.py(ys[i] + dy / 2), bottom = p.py(ys[i] - dy / 2);
    svg.raw(fmt::format(R"(<rect x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="{}"/>)"
                        "\n",
                        left, top, right - left + 0.3, bottom - top + 0.3, color(t)));
  }
}

double step_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v.size() > 1 ? v[1] - v[0] : 1.0;
}

void plot_evolution(const fs::path& dir, int& count, std::ostream& log) {
  const auto pop_path = dir / "population.csv";
  const auto ent_path = dir / "entropy.csv";
  if (!usable(pop_path, log) || !usable(ent_path, log)) return;
  const Table pop = read_csv(pop_path);
  const auto t = pop.numbers("t"), x = pop.numbers("x_bin"), P = pop.numbers("P");
  Svg svg(720, 640);
  Panel top{80, 30, 600, 330, {}, {}};
  Range vr;
  for (std::size_t i = 0; i < t.size(); ++i) {
    top.xr.add(t[i]);
    top.yr.add(x[i]);
    vr.add(P[i]);
  }
  const double dt = step_of(t), dx = step_of(x);
  top.xr.lo -= dt / 2;
  top.xr.hi += dt / 2;
  top.yr.lo -= dx / 2;
  top.yr.hi += dx / 2;
  top.xr.pad();
  top.yr.pad();
  heat_cells(svg, top, t, x, P, dt, dx, {0.0, vr.hi});
  top.axes(svg, "t", "x");

  const Table ent = read_csv(ent_path);
  Panel bottom{80, 420, 600, 170, {}, {}};
  const auto te = ent.numbers("t"), s = ent.numbers("entropy");
  for (std::size_t i = 0; i < te.size(); ++i) {
    bottom.xr.add(te[i]);
    bottom.yr.add(s[i]);
  }
  const auto summary = read_summary(dir / "summary.csv");
  const auto thermal = summary.find("entropy_thermal");
  if (thermal != summary.end()) bottom.yr.add(thermal->second);
  bottom.yr.lo = 0.0;
  bottom.xr.pad();
  bottom.yr.pad();
  bottom.line(svg, te, s, kPalette[0]);
  if (thermal != summary.end())
    bottom.line(svg, {bottom.xr.lo, bottom.xr.hi}, {thermal->second, thermal->second}, kPalette[1], "6,4");
  bottom.axes(svg, "t", "S");
  save(dir, "evolution.svg", svg, count, log);
}

void plot_chaos(const fs::path& dir, int& count, std::ostream& log) {
  const auto path = dir / "chaos_grid.csv";
  if (!usable(path, log)) return;
  const Table g = read_csv(path);
  const auto x = g.numbers("x"), lo = g.numbers("eps_lo"), hi = g.numbers("eps_hi"), r = g.numbers("mean_r");
  std::vector<double> eps(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) eps[i] = 0.5 * (lo[i] + hi[i]);
  Svg svg(720, 420);
  Panel p{80, 30, 600, 330, {0.0, 1.0}, {}};
  for (double v : x) p.yr.add(v);
  const double dx = step_of(x);
  p.yr.lo -= dx / 2;
  p.yr.hi += dx / 2;
  p.yr.pad();
  heat_cells(svg, p, eps, x, r, step_of(eps), dx, {0.386, 0.53});
  p.axes(svg, "eps", "x");
  save(dir, "chaos_map.svg", svg, count, log);
}

void plot_threshold(const fs::path& dir, int& count, std::ostream& log) {
  std::vector<std::pair<std::string, Table>> sides;
  for (const char* side : {"quantum", "classical"}) {
    const auto p = dir / fmt::format("sweep_{}.csv", side);
    if (usable(p, log)) sides.emplace_back(side, read_csv(p));
  }
  if (sides.empty()) return;
  Svg svg(720, 420);
  Panel p{80, 30, 600, 330, {}, {0.0, 0.0}};
  p.logx = true;
  for (const auto& [name, t] : sides) {
    for (double v : t.numbers("omega")) p.xr.add(v);
    for (double v : t.numbers("delta_rho")) p.yr.add(v);
  }
  p.yr.lo = 0.0;
  p.xr.pad();
  p.yr.pad();
  const auto summary = read_csv(dir / "threshold.csv");
  const double c = summary.rows.empty() ? 0.1 : summary.numbers("c").front();
  p.line(svg, {p.xr.lo, p.xr.hi}, {c, c}, "#555555", "6,4");
  for (std::size_t k = 0; k < sides.size(); ++k) {
    const auto& t = sides[k].second;
    p.line(svg, t.numbers("omega"), t.numbers("delta_rho"), kPalette[k]);
    p.dots(svg, t.numbers("omega"), t.numbers("delta_rho"), kPalette[k]);
    svg.text(p.x0 + p.w - 10, p.y0 + 18 + 16 * static_cast<double>(k), sides[k].first, "end");
  }
  p.axes(svg, "omega", "delta_rho");
  save(dir, "threshold.svg", svg, count, log);
}

void plot_scaling(const fs::path& dir, int& count, std::ostream& log) {
  const auto path = dir / "scaling.csv";
  if (!usable(path, log)) return;
  const Table t = read_csv(path);
  const auto N = t.numbers("N"), w = t.numbers("omega"), d = t.numbers("delta_rho");
  Svg svg(720, 420);
  Panel p{80, 30, 600, 330, {}, {}};
  p.logx = true;
  std::map<double, std::pair<std::vector<double>, std::vector<double>>> curves;
  for (std::size_t i = 0; i < N.size(); ++i) {
    curves[N[i]].first.push_back(w[i] * N[i]);
    curves[N[i]].second.push_back(d[i]);
    p.xr.add(w[i] * N[i]);
    p.yr.add(d[i]);
  }
  p.yr.lo = 0.0;
  p.xr.pad();
  p.yr.pad();
  std::size_t k = 0;
  for (const auto& [n, xy] : curves) {
    const char* col = kPalette[k % kPalette.size()];
    p.line(svg, xy.first, xy.second, col);
    p.dots(svg, xy.first, xy.second, col);
    svg.text(p.x0 + p.w - 10, p.y0 + 18 + 16 * static_cast<double>(k), fmt::format("N = {}", n), "end");
    ++k;
  }
  const auto fit = read_summary(dir / "fit.csv");
  if (fit.count("a") && fit.count("b")) {
    std::vector<double> xs, ys;
    for (int i = 0; i <= 100; ++i) {
      const double s = std::exp(std::log(p.xr.lo) + i * (std::log(p.xr.hi) - std::log(p.xr.lo)) / 100);
      xs.push_back(s);
      ys.push_back(fit.at("a") / (s + fit.at("b")));
    }
    p.line(svg, xs, ys, "black", "6,4");
  }
  p.axes(svg, "omega N", "delta_rho");
  save(dir, "collapse.svg", svg, count, log);
}

void plot_section(const fs::path& dir, int& count, std::ostream& log) {
  const auto path = dir / "section.csv";
  if (!fs::exists(path)) return;
  const Table t = read_csv(path);
  if (t.rows.empty()) {
    log << "warning: section.csv has no points; plot skipped\n";
    return;
  }
  Svg svg(620, 560);
  Panel p{80, 30, 500, 470, {-1.0, 1.0}, {-std::numbers::pi, std::numbers::pi}};
  p.dots(svg, t.numbers("u"), t.numbers("v"), "#1f77b4", 0.8);
  p.axes(svg, "(n3 - n4) / (n2 + n3 + n4)", "phi3 - phi4");
  save(dir, "poincare.svg", svg, count, log);
}

void plot_spacing(const fs::path& dir, int& count, std::ostream& log) {
  const auto path = dir / "spacing.csv";
  if (!usable(path, log)) return;
  const Table t = read_csv(path);
  const auto N = t.numbers("N"), g = t.numbers("global_spacing"), l = t.numbers("local_spacing");
  Svg svg(720, 420);
  Panel p{80, 30, 600, 330, {}, {0.0, 0.0}};
  for (std::size_t i = 0; i < N.size(); ++i) {
    p.xr.add(N[i]);
    p.yr.add(g[i]);
    p.yr.add(l[i]);
  }
  p.xr.pad();
  p.yr.pad();
  p.dots(svg, N, g, kPalette[0], 3.5);
  p.dots(svg, N, l, kPalette[1], 3.5);
  const auto fit = read_summary(dir / "fit.csv");
  for (const auto& [prefix, col] : {std::pair{"global", kPalette[0]}, std::pair{"local", kPalette[1]}}) {
    const auto a = fit.find(fmt::format("{}_a", prefix)), b = fit.find(fmt::format("{}_b", prefix));
    if (a == fit.end() || b == fit.end()) continue;
    std::vector<double> xs, ys;
    for (int i = 0; i <= 100; ++i) {
      const double n = p.xr.lo + i * (p.xr.hi - p.xr.lo) / 100;
      xs.push_back(n);
      ys.push_back(a->second / n + b->second / (n * n));
    }
    p.line(svg, xs, ys, col, "6,4");
  }
  svg.text(p.x0 + p.w - 10, p.y0 + 18, "global", "end");
  svg.text(p.x0 + p.w - 10, p.y0 + 34, "local", "end");
  p.axes(svg, "N", "mean spacing");
  save(dir, "spacing.svg", svg, count, log);
}

void plot_scan(const fs::path& dir, const std::string& file, const std::string& column, int& count,
               std::ostream& log) {
  const auto path = dir / file;
  if (!usable(path, log)) return;
  const Table t = read_csv(path);
  const auto x = t.numbers(column), q = t.numbers("omega_T_quantum"), c = t.numbers("omega_T_classical");
  Svg svg(720, 420);
  Panel p{80, 30, 600, 330, {}, {}};
  p.logx = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    p.xr.add(x[i]);
    p.yr.add(q[i]);
    p.yr.add(c[i]);
  }
  p.yr.lo = 0.0;
  p.xr.pad();
  p.yr.pad();
  p.line(svg, x, q, kPalette[0]);
  p.dots(svg, x, q, kPalette[0], 3.5);
  p.line(svg, x, c, kPalette[1]);
  p.dots(svg, x, c, kPalette[1], 3.5);
  svg.text(p.x0 + p.w - 10, p.y0 + 18, "quantum", "end");
  svg.text(p.x0 + p.w - 10, p.y0 + 34, "classical", "end");
  p.axes(svg, column, "omega_T");
  save(dir, fs::path(file).replace_extension(".svg").string(), svg, count, log);
}

}  // namespace

int emit_plots(const fs::path& dir, std::ostream& log) {
  if (!fs::is_directory(dir)) {
    log << "warning: " << dir.string() << " is not a directory; nothing plotted\n";
    return 0;
  }
  int count = 0;
  plot_evolution(dir, count, log);
  plot_chaos(dir, count, log);
  plot_threshold(dir, count, log);
  plot_scaling(dir, count, log);
  plot_section(dir, count, log);
  plot_spacing(dir, count, log);
  plot_scan(dir, "scan_eps.csv", "eps", count, log);
  plot_scan(dir, "scan_un.csv", "UN", count, log);
  if (count == 0) log << "warning: no plottable series in " << dir.string() << '\n';
  return count;
}

}  // namespace bhtherm::cli
