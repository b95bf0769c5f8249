#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "evadesos/cli.hpp"

namespace evadesos {

namespace {

constexpr double kPanelW = 420.0;
constexpr double kArenaH = 420.0;
constexpr double kDistH = 260.0;
constexpr double kMargin = 30.0;
constexpr std::size_t kMaxPoints = 1500;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Maps world coordinates of one arena panel to pixels.
struct ArenaFrame {
  double x0, y0, scale, half;
  double px(double x) const { return x0 + kMargin + (x + half) * scale; }
  double py(double y) const { return y0 + kMargin + (half - y) * scale; }
};

std::vector<std::size_t> decimate(std::size_t n) {
  std::vector<std::size_t> idx;
  const std::size_t stride = std::max<std::size_t>(1, (n + kMaxPoints - 1) / kMaxPoints);
  for (std::size_t k = 0; k < n; k += stride) idx.push_back(k);
  if (idx.empty() || idx.back() != n - 1) idx.push_back(n - 1);
  return idx;
}

std::string polyline(const std::vector<std::pair<double, double>>& pts, const std::string& style) {
  std::string s = "<polyline fill=\"none\" " + style + " points=\"";
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k) s += ' ';
    s += num(pts[k].first) + "," + num(pts[k].second);
  }
  return s + "\"/>\n";
}

// Target crescent: the part of the target disc outside the arena, as a polygon.
std::string crescent(const ArenaFrame& f, const EnvironmentConfig& cfg) {
  std::vector<std::pair<double, double>> pts;
  const int n = 96;
  const double mid = std::atan2(cfg.x_r[1], cfg.x_r[0]);
  for (int k = 0; k <= n; ++k) {
    const double a = mid - M_PI + 2.0 * M_PI * k / n;
    const double x = cfg.x_r[0] + cfg.R_r * std::cos(a), y = cfg.x_r[1] + cfg.R_r * std::sin(a);
    if (x * x + y * y >= cfg.R * cfg.R) pts.emplace_back(x, y);
  }
  if (pts.empty()) return "";
  // Close along the arena circle, the short way back to the first point.
  const double a1 = std::atan2(pts.back().second, pts.back().first);
  const double delta = std::remainder(std::atan2(pts.front().second, pts.front().first) - a1, 2.0 * M_PI);
  for (int k = 0; k <= 16; ++k) {
    const double a = a1 + delta * k / 16.0;
    pts.emplace_back(cfg.R * std::cos(a), cfg.R * std::sin(a));
  }
  std::string s = "<polygon class=\"target\" fill=\"#8fd18f\" stroke=\"#2e7d32\" points=\"";
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k) s += ' ';
    s += num(f.px(pts[k].first)) + "," + num(f.py(pts[k].second));
  }
  return s + "\"/>\n";
}

void arena_panel(std::ostringstream& os, const Trace& tr, const EnvironmentConfig& cfg, double x0) {
  const double half = cfg.R + cfg.R_r + 0.2;
  const ArenaFrame f{x0, 0.0, (kPanelW - 2 * kMargin) / (2 * half), half};
  os << "<g class=\"arena-panel\">\n";
  os << "<circle class=\"arena\" cx=\"" << num(f.px(0)) << "\" cy=\"" << num(f.py(0)) << "\" r=\""
     << num(cfg.R * f.scale) << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << crescent(f, cfg);
  const auto idx = decimate(tr.rows.size());
  std::vector<std::pair<double, double>> e, p;
  for (std::size_t k : idx) {
    e.emplace_back(f.px(tr.rows[k].x[0]), f.py(tr.rows[k].x[1]));
    p.emplace_back(f.px(tr.rows[k].x[2]), f.py(tr.rows[k].x[3]));
  }
  os << polyline(e, "class=\"evader\" stroke=\"#1565c0\" stroke-width=\"1.5\"");
  os << polyline(p, "class=\"pursuer\" stroke=\"#c62828\" stroke-width=\"1.5\"");
  const auto& last = tr.rows.back().x;
  os << "<circle class=\"catch\" cx=\"" << num(f.px(last[2])) << "\" cy=\"" << num(f.py(last[3])) << "\" r=\""
     << num(cfg.R_a * f.scale) << "\" fill=\"none\" stroke=\"#c62828\" stroke-dasharray=\"4,3\"/>\n";
  os << "<text x=\"" << num(x0 + kMargin) << "\" y=\"18\" font-size=\"12\">" << to_string(tr.outcome)
     << "</text>\n";
  os << "</g>\n";
}

void distance_panel(std::ostringstream& os, const Trace& tr, const EnvironmentConfig& cfg, double x0) {
  const double top = kArenaH;
  const double w = kPanelW - 2 * kMargin, h = kDistH - 2 * kMargin;
  const double tmax = std::max(tr.rows.back().t, 1e-9);
  double dmax = cfg.R_a;
  for (const auto& r : tr.rows) dmax = std::max(dmax, r.dist);
  dmax *= 1.05;
  auto px = [&](double t) { return x0 + kMargin + t / tmax * w; };
  auto py = [&](double d) { return top + kMargin + (1.0 - d / dmax) * h; };
  os << "<g class=\"distance-panel\">\n";
  os << "<rect x=\"" << num(x0 + kMargin) << "\" y=\"" << num(top + kMargin) << "\" width=\"" << num(w)
     << "\" height=\"" << num(h) << "\" fill=\"none\" stroke=\"black\"/>\n";
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k : decimate(tr.rows.size())) pts.emplace_back(px(tr.rows[k].t), py(tr.rows[k].dist));
  os << polyline(pts, "class=\"dist\" stroke=\"#1565c0\" stroke-width=\"1.5\"");
  os << "<line class=\"catch-radius\" x1=\"" << num(px(0)) << "\" y1=\"" << num(py(cfg.R_a)) << "\" x2=\""
     << num(px(tmax)) << "\" y2=\"" << num(py(cfg.R_a)) << "\" stroke=\"red\" stroke-dasharray=\"6,4\"/>\n";
  os << "<text x=\"" << num(x0 + kMargin) << "\" y=\"" << num(top + kDistH - 8) << "\" font-size=\"11\">t = 0 .. "
     << num(tmax) << ", dist max " << num(dmax) << "</text>\n";
  os << "</g>\n";
}

}  // namespace

std::string render_svg(const std::vector<Trace>& traces, const EnvironmentConfig& cfg, const std::string& manifest) {
  if (traces.empty()) throw std::invalid_argument("no traces to plot");
  std::ostringstream os;
  const double width = kPanelW * static_cast<double>(traces.size());
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
     << num(kArenaH + kDistH) << "\">\n";
  if (!manifest.empty()) os << "<!-- manifest=" << manifest << " -->\n";
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (traces[i].rows.empty()) throw std::invalid_argument("empty trace");
    const double x0 = kPanelW * static_cast<double>(i);
    arena_panel(os, traces[i], cfg, x0);
    distance_panel(os, traces[i], cfg, x0);
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace evadesos
