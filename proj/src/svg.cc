#include "dls/svg.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace dls {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kPad = 56.0;

struct Box {
  double x0{std::numeric_limits<double>::infinity()};
  double x1{-std::numeric_limits<double>::infinity()};
  double y0{std::numeric_limits<double>::infinity()};
  double y1{-std::numeric_limits<double>::infinity()};

  void add(double x, double y) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  double span() const { return std::max({x1 - x0, y1 - y0, 1e-9}); }
};

// Maps data coordinates to the canvas with y pointing up.
class Canvas {
 public:
  Canvas(const Box& box, bool equal_aspect) : box_(box) {
    const double w = kWidth - 2 * kPad;
    const double h = kHeight - 2 * kPad;
    sx_ = w / std::max(box.x1 - box.x0, 1e-12);
    sy_ = h / std::max(box.y1 - box.y0, 1e-12);
    if (equal_aspect) sx_ = sy_ = std::min(sx_, sy_);
  }
  double x(double v) const { return kPad + (v - box_.x0) * sx_; }
  double y(double v) const { return kHeight - kPad - (v - box_.y0) * sy_; }

 private:
  Box box_;
  double sx_;
  double sy_;
};

std::string num(double v) {
  // Canvas coordinates only need sub-pixel precision.
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string tick(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

std::string header(const std::string& title) {
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
                    "\" height=\"" + num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " +
                    num(kHeight) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    out += "<text x=\"" + num(kWidth / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
           title + "</text>\n";
  }
  return out;
}

std::string axes(const Canvas& cv, const Box& box, const std::string& xlabel,
                 const std::string& ylabel) {
  std::string out;
  out += "<line x1=\"" + num(kPad) + "\" y1=\"" + num(kHeight - kPad) + "\" x2=\"" +
         num(kWidth - kPad) + "\" y2=\"" + num(kHeight - kPad) + "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + num(kPad) + "\" y1=\"" + num(kPad) + "\" x2=\"" + num(kPad) +
         "\" y2=\"" + num(kHeight - kPad) + "\" stroke=\"black\"/>\n";
  out += "<text x=\"" + num(kWidth / 2) + "\" y=\"" + num(kHeight - 10) +
         "\" text-anchor=\"middle\" font-size=\"12\">" + xlabel + "</text>\n";
  out += "<text x=\"14\" y=\"" + num(kHeight / 2) + "\" font-size=\"12\" transform=\"rotate(-90 14 " +
         num(kHeight / 2) + ")\" text-anchor=\"middle\">" + ylabel + "</text>\n";
  out += "<text x=\"" + num(kPad) + "\" y=\"" + num(kHeight - kPad + 16) +
         "\" font-size=\"10\">" + tick(box.x0) + "</text>\n";
  out += "<text x=\"" + num(cv.x(box.x1)) + "\" y=\"" + num(kHeight - kPad + 16) +
         "\" font-size=\"10\" text-anchor=\"end\">" + tick(box.x1) + "</text>\n";
  out += "<text x=\"" + num(kPad - 4) + "\" y=\"" + num(cv.y(box.y1)) +
         "\" font-size=\"10\" text-anchor=\"end\">" + tick(box.y1) + "</text>\n";
  out += "<text x=\"" + num(kPad - 4) + "\" y=\"" + num(cv.y(box.y0)) +
         "\" font-size=\"10\" text-anchor=\"end\">" + tick(box.y0) + "</text>\n";
  return out;
}

std::string polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                     double width) {
  std::string out = "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
                    num(width) + "\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += ' ';
    out += num(pts[i].first) + "," + num(pts[i].second);
  }
  out += "\"/>\n";
  return out;
}

std::string legend(const std::vector<std::pair<std::string, std::string>>& entries) {
  std::string out;
  double y = 36.0;
  for (const auto& [label, color] : entries) {
    out += "<rect x=\"" + num(kWidth - 150) + "\" y=\"" + num(y - 9) +
           "\" width=\"10\" height=\"10\" fill=\"" + color + "\"/>\n";
    out += "<text x=\"" + num(kWidth - 135) + "\" y=\"" + num(y) + "\" font-size=\"11\">" + label +
           "</text>\n";
    y += 16.0;
  }
  return out;
}

}  // namespace

std::string path_svg(const std::vector<PlotSeries>& series, const std::string& title) {
  Box box;
  for (const auto& s : series) {
    for (const auto& q : s.path.waypoints) box.add(q.x, q.y);
  }
  if (!std::isfinite(box.x0)) box = {0.0, 1.0, 0.0, 1.0};
  const double margin = 0.08 * box.span();
  box.x0 -= margin;
  box.x1 += margin;
  box.y0 -= margin;
  box.y1 += margin;
  const Canvas cv(box, true);
  const double tick = 0.05 * box.span();

  std::string out = header(title);
  out += axes(cv, box, "x [m]", "y [m]");
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& s : series) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& q : s.path.waypoints) pts.emplace_back(cv.x(q.x), cv.y(q.y));
    out += polyline(pts, s.color, 1.5);
    if (s.orientation_ticks) {
      for (const auto& q : s.path.waypoints) {
        const double tx = q.x + tick * std::cos(q.theta);
        const double ty = q.y + tick * std::sin(q.theta);
        out += "<line x1=\"" + num(cv.x(q.x)) + "\" y1=\"" + num(cv.y(q.y)) + "\" x2=\"" +
               num(cv.x(tx)) + "\" y2=\"" + num(cv.y(ty)) + "\" stroke=\"" + s.color +
               "\" stroke-width=\"0.8\" opacity=\"0.7\"/>\n";
      }
    }
    if (!s.path.waypoints.empty()) {
      const Pose2& a = s.path.waypoints.front();
      const Pose2& b = s.path.waypoints.back();
      out += "<circle cx=\"" + num(cv.x(a.x)) + "\" cy=\"" + num(cv.y(a.y)) + "\" r=\"3\" fill=\"" +
             s.color + "\"/>\n";
      out += "<rect x=\"" + num(cv.x(b.x) - 3) + "\" y=\"" + num(cv.y(b.y) - 3) +
             "\" width=\"6\" height=\"6\" fill=\"" + s.color + "\"/>\n";
    }
    entries.emplace_back(s.label, s.color);
  }
  out += legend(entries);
  out += "</svg>\n";
  return out;
}

std::string fit_boundary_svg(const std::vector<SegmentRecord>& dataset,
                             const FrictionParams& params) {
  Box box;
  box.add(0.0, 0.0);
  std::vector<double> levels;
  for (const auto& r : dataset) {
    box.add(std::hypot(r.wrench.fx, r.wrench.fy), std::abs(r.wrench.tau));
    if (std::find(levels.begin(), levels.end(), r.n_e) == levels.end()) levels.push_back(r.n_e);
  }
  std::sort(levels.begin(), levels.end());

  // Binding boundary: along each ray the inner of the two ellipses.
  constexpr int kRays = 181;
  std::vector<std::vector<std::pair<double, double>>> curves;
  for (double n_e : levels) {
    const DualSurfaces ds = dual_surfaces(params, n_e);
    std::vector<std::pair<double, double>> curve;
    for (int k = 0; k < kRays; ++k) {
      const double phi = 0.5 * std::numbers::pi * k / (kRays - 1);
      const double u = std::cos(phi) * ds.support.a_f;
      const double v = std::sin(phi) * ds.support.a_t;
      const double g = std::max(ds.top.reduced_form(u, v), ds.support.reduced_form(u, v));
      const double s = 1.0 / std::sqrt(g);
      curve.emplace_back(s * u, s * v);
      box.add(s * u, s * v);
    }
    curves.push_back(std::move(curve));
  }
  box.x1 += 0.05 * (box.x1 - box.x0);
  box.y1 += 0.05 * (box.y1 - box.y0);
  if (box.x1 <= box.x0) box.x1 = box.x0 + 1.0;
  if (box.y1 <= box.y0) box.y1 = box.y0 + 1.0;
  const Canvas cv(box, false);

  std::string out = header("support reaction, reduced plane");
  out += axes(cv, box, "|f| [N]", "|tau| [N m]");
  for (const auto& curve : curves) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [f, t] : curve) pts.emplace_back(cv.x(f), cv.y(t));
    out += polyline(pts, "#1f4e9c", 1.2);
  }
  for (const auto& r : dataset) {
    const bool slipped = resolved_label(r);
    out += "<circle cx=\"" + num(cv.x(std::hypot(r.wrench.fx, r.wrench.fy))) + "\" cy=\"" +
           num(cv.y(std::abs(r.wrench.tau))) + "\" r=\"2\" fill=\"" +
           (slipped ? "#d62728" : "#2ca02c") + "\"/>\n";
  }
  out += legend({{"stick", "#2ca02c"}, {"slip", "#d62728"}, {"fitted boundary", "#1f4e9c"}});
  out += "</svg>\n";
  return out;
}

}  // namespace dls
