#include "grfmcmc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "grfmcmc/errors.hpp"
#include "grfmcmc/io.hpp"

namespace grfmcmc {

namespace {

constexpr double kWidth = 720.0, kHeight = 480.0;
constexpr double kLeft = 70.0, kRight = 30.0, kTop = 50.0, kBottom = 60.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Canvas {
  std::ofstream out;

  explicit Canvas(const std::string& path, const std::string& title) : out(path) {
    if (!out) throw Error("cannot write file: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
  }

  ~Canvas() { out << "</svg>\n"; }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double width = 1.0) {
    out << "<line x1=\"" << fmt_g(x1, 6) << "\" y1=\"" << fmt_g(y1, 6) << "\" x2=\""
        << fmt_g(x2, 6) << "\" y2=\"" << fmt_g(y2, 6) << "\" stroke=\"" << stroke
        << "\" stroke-width=\"" << width << "\"/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& stroke,
            const std::string& fill) {
    out << "<rect x=\"" << fmt_g(x, 6) << "\" y=\"" << fmt_g(y, 6) << "\" width=\"" << fmt_g(w, 6)
        << "\" height=\"" << fmt_g(h, 6) << "\" stroke=\"" << stroke << "\" fill=\"" << fill
        << "\"/>\n";
  }

  void circle(double x, double y, double r, const std::string& fill) {
    out << "<circle cx=\"" << fmt_g(x, 6) << "\" cy=\"" << fmt_g(y, 6) << "\" r=\"" << r
        << "\" fill=\"" << fill << "\"/>\n";
  }

  void text(double x, double y, const std::string& s, const std::string& anchor = "middle",
            int size = 12) {
    out << "<text x=\"" << fmt_g(x, 6) << "\" y=\"" << fmt_g(y, 6) << "\" text-anchor=\"" << anchor
        << "\" font-family=\"sans-serif\" font-size=\"" << size << "\">" << s << "</text>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke) {
    out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts) out << fmt_g(x, 6) << ',' << fmt_g(y, 6) << ' ';
    out << "\"/>\n";
  }
};

struct Scale {
  double lo, hi, pix_lo, pix_hi;
  double operator()(double v) const {
    double t = (v - lo) / (hi - lo);
    return pix_lo + t * (pix_hi - pix_lo);
  }
};

// A handful of round tick positions covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
  double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  double raw = span / 5.0;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) t.push_back(v);
  return t;
}

void y_axis(Canvas& c, const Scale& sy, const std::string& label) {
  c.line(kLeft, kTop, kLeft, kHeight - kBottom, "black");
  for (double v : ticks(sy.lo, sy.hi)) {
    double y = sy(v);
    c.line(kLeft - 4, y, kLeft, y, "black");
    c.text(kLeft - 8, y + 4, fmt_g(v, 4), "end", 11);
  }
  c.text(16, kTop - 12, label, "start", 12);
}

double quantile_sorted(const std::vector<double>& v, double q) {
  if (v.empty()) return 0.0;
  double pos = q * static_cast<double>(v.size() - 1);
  std::size_t i = static_cast<std::size_t>(pos);
  if (i + 1 >= v.size()) return v.back();
  double f = pos - static_cast<double>(i);
  return v[i] * (1.0 - f) + v[i + 1] * f;
}

}  // namespace

void svg_boxplot(const std::string& path, const std::string& title,
                 const std::vector<std::string>& labels,
                 const std::vector<std::vector<double>>& groups, const std::string& y_label) {
  if (labels.size() != groups.size()) throw ContractError("svg_boxplot: label/group mismatch");
  if (groups.empty()) throw ContractError("svg_boxplot: no groups");

  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const auto& g : groups)
    for (double v : g) {
      if (first || v < lo) lo = v;
      if (first || v > hi) hi = v;
      first = false;
    }
  if (first) throw ContractError("svg_boxplot: empty groups");
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  double pad = 0.08 * (hi - lo);
  Scale sy{lo - pad, hi + pad, kHeight - kBottom, kTop};

  Canvas c(path, title);
  y_axis(c, sy, y_label);
  c.line(kLeft, kHeight - kBottom, kWidth - kRight, kHeight - kBottom, "black");
  if (sy.lo < 0.0 && sy.hi > 0.0) {
    double y0 = sy(0.0);
    c.line(kLeft, y0, kWidth - kRight, y0, "#bbbbbb");
  }

  double slot = (kWidth - kLeft - kRight) / static_cast<double>(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<double> v = groups[g];
    std::sort(v.begin(), v.end());
    double q1 = quantile_sorted(v, 0.25), q2 = quantile_sorted(v, 0.5),
           q3 = quantile_sorted(v, 0.75);
    double iqr = q3 - q1;
    double wlo = q1, whi = q3;
    for (double x : v) {
      if (x >= q1 - 1.5 * iqr) {
        wlo = x;
        break;
      }
    }
    for (auto it = v.rbegin(); it != v.rend(); ++it) {
      if (*it <= q3 + 1.5 * iqr) {
        whi = *it;
        break;
      }
    }
    double cx = kLeft + (static_cast<double>(g) + 0.5) * slot;
    double bw = std::min(60.0, slot * 0.5);
    const std::string color = kPalette[g % 6];
    c.line(cx, sy(wlo), cx, sy(q1), "black");
    c.line(cx, sy(q3), cx, sy(whi), "black");
    c.line(cx - bw / 4, sy(wlo), cx + bw / 4, sy(wlo), "black");
    c.line(cx - bw / 4, sy(whi), cx + bw / 4, sy(whi), "black");
    c.rect(cx - bw / 2, sy(q3), bw, sy(q1) - sy(q3), "black", color);
    c.line(cx - bw / 2, sy(q2), cx + bw / 2, sy(q2), "black", 2.0);
    for (double x : v)
      if (x < q1 - 1.5 * iqr || x > q3 + 1.5 * iqr) c.circle(cx, sy(x), 2.5, "black");
    c.text(cx, kHeight - kBottom + 18, labels[g], "middle", 12);
  }
}

void svg_line_chart(const std::string& path, const std::string& title,
                    const std::vector<double>& x, const std::vector<std::vector<double>>& series,
                    const std::vector<std::string>& series_labels, const std::string& x_label,
                    const std::string& y_label) {
  if (series.empty() || x.size() < 2) throw ContractError("svg_line_chart: not enough data");
  if (series_labels.size() != series.size())
    throw ContractError("svg_line_chart: label/series mismatch");
  for (const auto& s : series)
    if (s.size() != x.size()) throw ContractError("svg_line_chart: series length mismatch");

  double ylo = series[0][0], yhi = series[0][0];
  for (const auto& s : series)
    for (double v : s) {
      ylo = std::min(ylo, v);
      yhi = std::max(yhi, v);
    }
  if (yhi - ylo < 1e-12) {
    ylo -= 0.5;
    yhi += 0.5;
  }
  double pad = 0.08 * (yhi - ylo);
  Scale sy{ylo - pad, yhi + pad, kHeight - kBottom, kTop};
  Scale sx{x.front(), x.back(), kLeft, kWidth - kRight};

  Canvas c(path, title);
  y_axis(c, sy, y_label);
  c.line(kLeft, kHeight - kBottom, kWidth - kRight, kHeight - kBottom, "black");
  for (double v : ticks(sx.lo, sx.hi)) {
    double px = sx(v);
    c.line(px, kHeight - kBottom, px, kHeight - kBottom + 4, "black");
    c.text(px, kHeight - kBottom + 18, fmt_g(v, 4), "middle", 11);
  }
  c.text(kWidth - kRight, kHeight - 12, x_label, "end", 12);
  if (sy.lo < 0.0 && sy.hi > 0.0) {
    double y0 = sy(0.0);
    c.line(kLeft, y0, kWidth - kRight, y0, "#bbbbbb");
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) pts.emplace_back(sx(x[i]), sy(series[s][i]));
    c.polyline(pts, kPalette[s % 6]);
    double ly = kTop + 16.0 * static_cast<double>(s);
    c.line(kWidth - kRight - 120, ly, kWidth - kRight - 100, ly, kPalette[s % 6], 2.0);
    c.text(kWidth - kRight - 94, ly + 4, series_labels[s], "start", 11);
  }
}

}  // namespace grfmcmc
