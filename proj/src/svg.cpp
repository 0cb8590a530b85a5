#include "driftlab/svg.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>

namespace driftlab::svg {
namespace {

std::string num(double v) {
  if (!std::isfinite(v)) v = 0.0;
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, 2);
  std::string s(buf.data(), res.ptr);
  // Trim "12.50" -> "12.5", "3.00" -> "3".
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

constexpr std::array<const char*, 10> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

Document::Document(double width, double height) : width_(width), height_(height) {}

void Document::rect(double x, double y, double w, double h, std::string_view fill, double opacity) {
  body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
           "\" fill=\"" + std::string(fill) + "\"";
  if (opacity < 1.0) body_ += " fill-opacity=\"" + num(opacity) + "\"";
  body_ += "/>\n";
}

void Document::line(double x1, double y1, double x2, double y2, std::string_view stroke, double width) {
  body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
           "\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" + num(width) + "\"/>\n";
}

void Document::polyline(const std::vector<std::pair<double, double>>& pts, std::string_view stroke,
                        double width) {
  if (pts.empty()) return;
  body_ += "<polyline fill=\"none\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" + num(width) +
           "\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i > 0) body_ += ' ';
    body_ += num(pts[i].first) + "," + num(pts[i].second);
  }
  body_ += "\"/>\n";
}

void Document::text(double x, double y, std::string_view content, double size, std::string_view anchor,
                    double rotate) {
  body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"" +
           num(size) + "\" text-anchor=\"" + std::string(anchor) + "\"";
  if (rotate != 0.0) body_ += " transform=\"rotate(" + num(rotate) + " " + num(x) + " " + num(y) + ")\"";
  body_ += ">" + escape(content) + "</text>\n";
}

std::string Document::str() const {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         num(width_) + "\" height=\"" + num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " + num(height_) +
         "\">\n<rect x=\"0\" y=\"0\" width=\"" + num(width_) + "\" height=\"" + num(height_) +
         "\" fill=\"white\"/>\n" + body_ + "</svg>\n";
}

std::string bar_chart(const std::string& title, const std::vector<std::string>& categories,
                      const std::vector<BarSeries>& series) {
  const double left = 60, right = 20, top = 40, bottom = 140;
  const double group_w = std::max(40.0, 18.0 * static_cast<double>(series.size()) + 16.0);
  const double plot_w = group_w * static_cast<double>(std::max<std::size_t>(categories.size(), 1));
  const double plot_h = 260;
  Document doc(left + plot_w + right, top + plot_h + bottom);
  doc.text(left + plot_w / 2, 24, title, 15, "middle");

  auto y_of = [&](double v) { return top + plot_h * (1.0 - std::clamp(v, 0.0, 1.0)); };
  for (int tick = 0; tick <= 5; ++tick) {
    const double v = tick / 5.0;
    doc.line(left, y_of(v), left + plot_w, y_of(v), "#dddddd");
    doc.text(left - 6, y_of(v) + 4, num(v), 11, "end");
  }
  doc.line(left, top, left, top + plot_h, "black");
  doc.line(left, top + plot_h, left + plot_w, top + plot_h, "black");

  const double bar_w = (group_w - 16.0) / static_cast<double>(std::max<std::size_t>(series.size(), 1));
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double gx = left + group_w * static_cast<double>(c) + 8.0;
    for (std::size_t s = 0; s < series.size(); ++s) {
      const auto& ser = series[s];
      if (c >= ser.values.size()) continue;
      const double v = ser.values[c];
      const double x = gx + bar_w * static_cast<double>(s);
      doc.rect(x, y_of(v), bar_w * 0.9, top + plot_h - y_of(v), ser.color);
      if (c < ser.errors.size() && ser.errors[c] > 0.0) {
        const double cx = x + bar_w * 0.45;
        doc.line(cx, y_of(v - ser.errors[c]), cx, y_of(v + ser.errors[c]), "black");
      }
    }
    const double lx = left + group_w * (static_cast<double>(c) + 0.5);
    doc.text(lx, top + plot_h + 12, categories[c], 11, "end", -45);
  }

  // Legend in the top-right corner.
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double ly = top + 6 + 16.0 * static_cast<double>(s);
    doc.rect(left + plot_w - 90, ly, 10, 10, series[s].color);
    doc.text(left + plot_w - 76, ly + 9, series[s].name, 11);
  }
  return doc.str();
}

std::string trace_plot(const std::string& title, const std::vector<Trace>& traces, const GroundTruth& gt) {
  const double left = 60, right = 20, top = 40, panel_h = 90, gap = 28, plot_w = 900;
  const double height = top + (panel_h + gap) * static_cast<double>(std::max<std::size_t>(traces.size(), 1)) + 20;
  Document doc(left + plot_w + right, height);
  doc.text(left + plot_w / 2, 24, title, 15, "middle");

  const double T = static_cast<double>(gt.T());
  auto x_of = [&](double t) { return left + plot_w * (t - 1.0) / std::max(T - 1.0, 1.0); };

  for (std::size_t p = 0; p < traces.size(); ++p) {
    const double y0 = top + (panel_h + gap) * static_cast<double>(p);
    const auto& s = traces[p].scores;
    for (const auto& seg : gt.segments()) {
      const double x1 = x_of(static_cast<double>(seg.lo));
      const double x2 = x_of(static_cast<double>(seg.hi));
      doc.rect(x1, y0, std::max(x2 - x1, 1.5), panel_h, "#d62728", 0.25);
    }
    doc.line(left, y0 + panel_h, left + plot_w, y0 + panel_h, "black");
    doc.line(left, y0, left, y0 + panel_h, "black");
    doc.text(left + 4, y0 - 6, traces[p].name, 12);

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double v : s) {
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    if (!std::isfinite(lo)) continue;
    const double range = hi > lo ? hi - lo : 1.0;
    auto y_of = [&](double v) {
      const double u = std::isfinite(v) ? (v - lo) / range : 0.0;
      return y0 + panel_h * (1.0 - u);
    };

    // Bucket to at most one max value per horizontal unit.
    const std::size_t n = s.size();
    const std::size_t buckets = std::min<std::size_t>(n, static_cast<std::size_t>(plot_w));
    std::vector<std::pair<double, double>> pts;
    pts.reserve(buckets);
    for (std::size_t b = 0; b < buckets; ++b) {
      const std::size_t i0 = b * n / buckets;
      const std::size_t i1 = std::max(i0 + 1, (b + 1) * n / buckets);
      std::size_t best = i0;
      for (std::size_t i = i0; i < i1; ++i) {
        if (s[i] > s[best]) best = i;
      }
      pts.emplace_back(x_of(static_cast<double>(best + 1)), y_of(s[best]));
    }
    doc.polyline(pts, kPalette[p % kPalette.size()], 1.0);
  }
  doc.text(left + plot_w / 2, height - 6, "execution t", 11, "middle");
  return doc.str();
}

}  // namespace driftlab::svg
