/**
 * Copyright 2026 The attrfl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "attrfl/plots.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "attrfl/experiment.hpp"
#include "attrfl/format.hpp"

namespace attrfl {

namespace {

constexpr const char *kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
                                    "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#86bcb6", "#d37295",
                                    "#fabfd2", "#b6992d", "#499894", "#79706e"};

std::string num(double v) { return format("%.2f", v); }

std::string escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

class Svg {
 public:
  Svg(double w, double h) : w_(w), h_(h) {}

  void rect(double x, double y, double w, double h, const std::string &fill, const std::string &extra = "") {
    body_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
          << "\" fill=\"" << fill << "\"" << extra << "/>\n";
  }
  void line(double x1, double y1, double x2, double y2, const std::string &stroke = "#333") {
    body_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\"" << num(y2)
          << "\" stroke=\"" << stroke << "\"/>\n";
  }
  void text(double x, double y, const std::string &s, const std::string &anchor = "start", int size = 12) {
    body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"" << size << "\" text-anchor=\"" << anchor
          << "\" font-family=\"sans-serif\">" << escape(s) << "</text>\n";
  }
  void polyline(const std::vector<std::pair<double, double>> &pts, const std::string &stroke) {
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) body_ << (i ? " " : "") << num(pts[i].first) << ',' << num(pts[i].second);
    body_ << "\"/>\n";
    for (const auto &[x, y] : pts) {
      body_ << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"3\" fill=\"" << stroke << "\"/>\n";
    }
  }
  void raw(const std::string &s) { body_ << s; }

  std::string str() const {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w_) << "\" height=\"" << num(h_)
        << "\" viewBox=\"0 0 " << num(w_) << ' ' << num(h_) << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body_.str() << "</svg>\n";
    return out.str();
  }

 private:
  double w_, h_;
  std::ostringstream body_;
};

void write_file(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

// Y axis with ticks at 0, 0.25, ..., 1 of `top`.
void y_axis(Svg &svg, double x0, double y0, double height, double top, const std::string &label) {
  svg.line(x0, y0, x0, y0 - height);
  for (int k = 0; k <= 4; ++k) {
    const double y = y0 - height * k / 4.0;
    svg.line(x0 - 4, y, x0, y);
    svg.text(x0 - 6, y + 4, format("%.2f", top * k / 4.0), "end", 10);
  }
  svg.text(x0 - 40, y0 - height / 2, label, "middle", 11);
}

}  // namespace

std::string composition_svg(const ExperimentReport &report) {
  const auto &phases = report.primary();
  const double width = 640, bar_w = 480, x0 = 120;
  Svg svg(width, 220);
  svg.text(width / 2, 24,
           "Attribution shares (" + to_string(phases.attack_free.evaluator) + "), attacker = client " +
               std::to_string(report.malicious) + ", " + to_string(report.attack),
           "middle", 13);
  const AttributionReport *rows[] = {&phases.attack_free, &phases.attacked};
  const char *names[] = {"attack_free", "attacked"};
  for (int r = 0; r < 2; ++r) {
    const double y = 50 + r * 60;
    svg.text(x0 - 8, y + 24, names[r], "end");
    double x = x0;
    const auto &rep = *rows[r];
    for (std::size_t i = 0; i < rep.size(); ++i) {
      const double w = bar_w * rep.shares[i];
      const bool attacker = rep.client_ids[i] == report.malicious;
      svg.rect(x, y, w, 36, kPalette[static_cast<std::size_t>(rep.client_ids[i]) % 16],
               attacker ? " stroke=\"black\" stroke-width=\"2\"" : "");
      if (w > 24) svg.text(x + w / 2, y + 22, std::to_string(rep.client_ids[i]), "middle", 10);
      x += w;
    }
  }
  svg.text(x0, 190, "segment width = normalized share; outlined = attacker", "start", 10);
  return svg.str();
}

std::string intensity_svg(std::span<const double> intensities, std::span<const double> shares,
                          std::span<const double> accuracies) {
  const double width = 640, height = 320, x0 = 70, y0 = 270, plot_w = 520, plot_h = 220;
  Svg svg(width, height);
  svg.text(width / 2, 22, "Attacker share and accuracy vs attack intensity", "middle", 13);
  y_axis(svg, x0, y0, plot_h, 1.0, "value");
  svg.line(x0, y0, x0 + plot_w, y0);
  const std::size_t n = intensities.size();
  std::vector<std::pair<double, double>> share_pts, acc_pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = n == 1 ? x0 + plot_w / 2 : x0 + plot_w * static_cast<double>(i) / static_cast<double>(n - 1);
    svg.line(x, y0, x, y0 + 4);
    svg.text(x, y0 + 18, format_double(intensities[i]) + "x", "middle", 10);
    share_pts.emplace_back(x, y0 - plot_h * std::clamp(shares[i], 0.0, 1.0));
    acc_pts.emplace_back(x, y0 - plot_h * std::clamp(accuracies[i], 0.0, 1.0));
  }
  svg.polyline(share_pts, kPalette[2]);
  svg.polyline(acc_pts, kPalette[0]);
  svg.rect(x0 + 10, 36, 12, 4, kPalette[2]);
  svg.text(x0 + 28, 42, "attacker share", "start", 10);
  svg.rect(x0 + 130, 36, 12, 4, kPalette[0]);
  svg.text(x0 + 148, 42, "final accuracy", "start", 10);
  return svg.str();
}

std::string grouped_bars_svg(const std::string &title, std::span<const std::string> categories,
                             std::span<const double> before, std::span<const double> after) {
  const double width = 640, height = 320, x0 = 70, y0 = 260, plot_w = 540, plot_h = 200;
  Svg svg(width, height);
  svg.text(width / 2, 22, title, "middle", 13);
  double top = 0.0;
  for (double v : before) top = std::max(top, v);
  for (double v : after) top = std::max(top, v);
  top = top > 0.0 ? std::min(1.0, top * 1.1) : 1.0;
  y_axis(svg, x0, y0, plot_h, top, "attacker share");
  svg.line(x0, y0, x0 + plot_w, y0);
  const std::size_t n = categories.size();
  const double slot = n ? plot_w / static_cast<double>(n) : plot_w;
  const double bw = std::min(30.0, slot / 3.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double cx = x0 + slot * (static_cast<double>(i) + 0.5);
    const double hb = plot_h * before[i] / top, ha = plot_h * after[i] / top;
    svg.rect(cx - bw, y0 - hb, bw, hb, kPalette[9]);
    svg.rect(cx, y0 - ha, bw, ha, kPalette[2]);
    svg.text(cx, y0 + 16, categories[i], "middle", 10);
  }
  svg.rect(x0 + 10, 36, 12, 8, kPalette[9]);
  svg.text(x0 + 28, 44, "attack-free", "start", 10);
  svg.rect(x0 + 110, 36, 12, 8, kPalette[2]);
  svg.text(x0 + 128, 44, "attacked", "start", 10);
  return svg.str();
}

std::vector<std::filesystem::path> emit_plots(const ExperimentReport &report, const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  const auto path = dir / "composition.svg";
  write_file(path, composition_svg(report));
  return {path};
}

std::vector<std::filesystem::path> emit_sweep_plots(const SweepResult &result, const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> out;
  std::vector<double> before, after, acc;
  for (const auto &r : result.reports) {
    before.push_back(r.attacker_share_before());
    after.push_back(r.attacker_share_after());
    acc.push_back(r.u1);
  }
  if (result.axis == SweepAxis::kIntensity) {
    std::vector<double> xs;
    for (const auto &r : result.reports) xs.push_back(r.intensity);
    out.push_back(dir / "intensity.svg");
    write_file(out.back(), intensity_svg(xs, after, acc));
  } else {
    out.push_back(dir / (to_string(result.axis) + "_bars.svg"));
    write_file(out.back(), grouped_bars_svg("Attacker share by " + to_string(result.axis), result.values, before, after));
  }
  return out;
}

std::filesystem::path emit_comparison_plot(std::span<const ExperimentReport> reports, const std::filesystem::path &path) {
  std::vector<std::string> names;
  std::vector<double> before, after;
  for (const auto &r : reports) {
    names.push_back(r.run_id);
    before.push_back(r.attacker_share_before());
    after.push_back(r.attacker_share_after());
  }
  write_file(path, grouped_bars_svg("Attacker share across runs", names, before, after));
  return path;
}

std::vector<std::filesystem::path> replot(const std::filesystem::path &dir, const std::filesystem::path &out_dir) {
  const auto dest = out_dir.empty() ? dir : out_dir;
  if (std::filesystem::exists(dir / "report.json")) return emit_plots(read_report(dir / "report.json"), dest);

  const auto summary = dir / "sweep_summary.csv";
  if (!std::filesystem::exists(summary)) {
    throw std::runtime_error("no report.json or sweep_summary.csv under " + dir.string());
  }
  std::ifstream in(summary);
  std::string line;
  std::getline(in, line);
  SweepResult result;
  std::vector<std::string> run_ids;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream row(line);
    for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
    if (cells.size() < 3) throw std::runtime_error("malformed sweep summary row: " + line);
    if (!run_ids.empty() && run_ids.back() == cells[2]) continue;
    result.axis = parse_sweep_axis(cells[0]);
    result.values.push_back(cells[1]);
    run_ids.push_back(cells[2]);
  }
  std::vector<std::filesystem::path> out;
  for (const auto &id : run_ids) {
    result.reports.push_back(read_report(dir / id / "report.json"));
    for (auto &p : emit_plots(result.reports.back(), dest / id)) out.push_back(std::move(p));
  }
  for (auto &p : emit_sweep_plots(result, dest)) out.push_back(std::move(p));
  return out;
}

}  // namespace attrfl
