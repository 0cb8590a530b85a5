#pragma once

#include "driftlab/ground_truth.hpp"
#include "driftlab/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace driftlab::svg {

/// Minimal SVG 1.1 document builder. Coordinates are in user units.
class Document {
 public:
  Document(double width, double height);

  void rect(double x, double y, double w, double h, std::string_view fill, double opacity = 1.0);
  void line(double x1, double y1, double x2, double y2, std::string_view stroke, double width = 1.0);
  void polyline(const std::vector<std::pair<double, double>>& pts, std::string_view stroke,
                double width = 1.0);
  /// anchor is "start", "middle" or "end".
  void text(double x, double y, std::string_view content, double size = 12.0,
            std::string_view anchor = "start", double rotate = 0.0);

  std::string str() const;

 private:
  double width_;
  double height_;
  std::string body_;
};

/// XML-escapes &, <, >, " and '.
std::string escape(std::string_view s);

struct BarSeries {
  std::string name;
  std::vector<double> values;  // one per category, expected in [0, 1]
  std::vector<double> errors;  // optional error bar half-widths
  std::string color;
};

/// Grouped bar chart with a [0, 1] value axis.
std::string bar_chart(const std::string& title, const std::vector<std::string>& categories,
                      const std::vector<BarSeries>& series);

struct Trace {
  std::string name;
  ScoreSeries scores;
};

/// One stacked panel per trace. Each trace is min-max scaled over its finite
/// values; ground-truth segments are shaded in every panel.
std::string trace_plot(const std::string& title, const std::vector<Trace>& traces,
                       const GroundTruth& gt);

}  // namespace driftlab::svg
