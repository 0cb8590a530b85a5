#include "driftlab/metrics.hpp"

#include "driftlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace driftlab {
namespace {

void check_scores(const GroundTruth& gt, std::span<const double> s) {
  if (static_cast<std::int64_t>(s.size()) != gt.T()) {
    throw InputError("score series has length " + std::to_string(s.size()) +
                     " but ground truth covers T=" + std::to_string(gt.T()));
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::isnan(s[i]) || s[i] == HUGE_VAL) {
      throw InputError("score at t=" + std::to_string(i + 1) + " is NaN or +inf");
    }
  }
}

void require_segments(const GroundTruth& gt) {
  if (gt.k() == 0) {
    throw DegenerateGroundTruthError("ground truth has no drift segments; the metric is undefined");
  }
}

void require_negatives(const GroundTruth& gt) {
  if (gt.positives() == gt.T()) {
    throw DegenerateGroundTruthError("ground truth covers every execution; FPR is undefined");
  }
}

enum class Numerator { Overlap, Covered };

// Direct evaluation of the per-segment overlap loop.
double overlap_score(const GroundTruth& gt, std::span<const double> s, double tau, Numerator num) {
  check_scores(gt, s);
  require_segments(gt);
  const auto pred = predicted_segments(s, tau);
  double total = 0.0;
  std::size_t j = 0;
  for (const auto& d : gt.segments()) {
    while (j < pred.size() && pred[j].hi < d.lo) ++j;
    std::int64_t covered = 0;  // |T_i|
    std::int64_t inside = 0;   // |T_i & D_i|
    std::int64_t lo = d.lo;
    std::int64_t hi = d.hi;
    bool any = false;
    // Predicted segments may straddle two true segments, so do not consume them.
    for (std::size_t q = j; q < pred.size() && pred[q].lo <= d.hi; ++q) {
      const auto& p = pred[q];
      any = true;
      covered += p.length();
      inside += std::min(p.hi, d.hi) - std::max(p.lo, d.lo) + 1;
      lo = std::min(lo, p.lo);
      hi = std::max(hi, p.hi);
    }
    if (!any) continue;
    const double numerator = static_cast<double>(num == Numerator::Overlap ? inside : covered);
    total += numerator / static_cast<double>(hi - lo + 1);
  }
  return total / static_cast<double>(gt.k());
}

// Disjoint-set forest over executions; roots carry the extent of their run.
class Runs {
 public:
  explicit Runs(std::size_t n) : parent_(n), lo_(n), hi_(n), active_(n, false) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    std::iota(lo_.begin(), lo_.end(), std::size_t{0});
    std::iota(hi_.begin(), hi_.end(), std::size_t{0});
  }

  bool active(std::size_t i) const { return active_[i]; }

  void insert(std::size_t i) {
    active_[i] = true;
    if (i > 0 && active_[i - 1]) unite(i - 1, i);
    if (i + 1 < active_.size() && active_[i + 1]) unite(i, i + 1);
  }

  std::size_t run_lo(std::size_t i) { return lo_[find(i)]; }
  std::size_t run_hi(std::size_t i) { return hi_[find(i)]; }

 private:
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    parent_[b] = a;
    lo_[a] = std::min(lo_[a], lo_[b]);
    hi_[a] = std::max(hi_[a], hi_[b]);
  }

  std::vector<std::size_t> parent_;
  std::vector<std::size_t> lo_;
  std::vector<std::size_t> hi_;
  std::vector<bool> active_;
};

void append_point(std::vector<CurvePoint>& pts, std::vector<std::int64_t>& fp_counts,
                  std::int64_t fp, double fpr_value, double value) {
  if (!fp_counts.empty() && fp_counts.back() == fp) {
    pts.back().value = std::max(pts.back().value, value);
    return;
  }
  fp_counts.push_back(fp);
  pts.push_back({fpr_value, value});
}

}  // namespace

std::vector<bool> predicted_mask(std::span<const double> s, double tau) {
  std::vector<bool> m(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) m[i] = s[i] >= tau;
  return m;
}

std::vector<Interval> predicted_segments(std::span<const double> s, double tau) {
  return decompose_mask(predicted_mask(s, tau));
}

double ols(const GroundTruth& gt, std::span<const double> s, double tau) {
  return overlap_score(gt, s, tau, Numerator::Overlap);
}

double sols(const GroundTruth& gt, std::span<const double> s, double tau) {
  return overlap_score(gt, s, tau, Numerator::Covered);
}

double fpr(const GroundTruth& gt, std::span<const double> s, double tau) {
  check_scores(gt, s);
  require_negatives(gt);
  const auto truth = gt.mask();
  std::int64_t fp = 0;
  for (std::size_t i = 0; i < s.size(); ++i) fp += (!truth[i] && s[i] >= tau) ? 1 : 0;
  return static_cast<double>(fp) / static_cast<double>(gt.T() - gt.positives());
}

double tpr(const GroundTruth& gt, std::span<const double> s, double tau) {
  check_scores(gt, s);
  require_segments(gt);
  const auto truth = gt.mask();
  std::int64_t tp = 0;
  for (std::size_t i = 0; i < s.size(); ++i) tp += (truth[i] && s[i] >= tau) ? 1 : 0;
  return static_cast<double>(tp) / static_cast<double>(gt.positives());
}

std::string to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::OLS: return "ols";
    case CurveKind::SOLS: return "sols";
    case CurveKind::TPR: return "tpr";
  }
  return "?";
}

std::string to_string(Rule rule) { return rule == Rule::Step ? "step" : "trapezoid"; }

double ThresholdCurve::integrate(Rule rule) const {
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double width = points[i + 1].fpr - points[i].fpr;
    const double height = rule == Rule::Step ? points[i].value
                                             : 0.5 * (points[i].value + points[i + 1].value);
    area += width * height;
  }
  return area;
}

SweepCurves sweep(const GroundTruth& gt, std::span<const double> s) {
  check_scores(gt, s);
  require_segments(gt);
  require_negatives(gt);

  const std::size_t T = s.size();
  const auto& segs = gt.segments();
  const std::size_t k = segs.size();
  const auto P = gt.positives();
  const auto N = gt.T() - P;

  std::vector<int> seg_of(T, -1);
  for (std::size_t i = 0; i < k; ++i) {
    for (auto t = segs[i].lo; t <= segs[i].hi; ++t) seg_of[static_cast<std::size_t>(t - 1)] = static_cast<int>(i);
  }

  std::vector<std::size_t> order;
  order.reserve(T);
  for (std::size_t i = 0; i < T; ++i) {
    if (std::isfinite(s[i])) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });

  SweepCurves out;
  out.ols.kind = CurveKind::OLS;
  out.sols.kind = CurveKind::SOLS;
  out.tpr.kind = CurveKind::TPR;
  std::vector<std::int64_t> fp_ols, fp_sols, fp_tpr;

  // Sentinel threshold above every score: nothing is flagged.
  append_point(out.ols.points, fp_ols, 0, 0.0, 0.0);
  append_point(out.sols.points, fp_sols, 0, 0.0, 0.0);
  append_point(out.tpr.points, fp_tpr, 0, 0.0, 0.0);

  Runs runs(T);
  std::vector<std::int64_t> inside(k, 0);
  std::int64_t fp = 0;
  std::int64_t tp = 0;

  for (std::size_t g = 0; g < order.size();) {
    // Lower tau to the next distinct score; flag the whole tie group at once.
    std::size_t end = g;
    while (end < order.size() && s[order[end]] == s[order[g]]) {
      const std::size_t t = order[end];
      runs.insert(t);
      if (seg_of[t] >= 0) {
        ++inside[static_cast<std::size_t>(seg_of[t])];
        ++tp;
      } else {
        ++fp;
      }
      ++end;
    }
    g = end;

    // Every predicted point inside D_i belongs to a run that intersects D_i,
    // so T_i only extends past D_i through runs covering its endpoints.
    double ols_sum = 0.0;
    double sols_sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (inside[i] == 0) continue;
      const auto lo = static_cast<std::size_t>(segs[i].lo - 1);
      const auto hi = static_cast<std::size_t>(segs[i].hi - 1);
      const std::int64_t left = runs.active(lo) ? static_cast<std::int64_t>(lo - runs.run_lo(lo)) : 0;
      const std::int64_t right = runs.active(hi) ? static_cast<std::int64_t>(runs.run_hi(hi) - hi) : 0;
      const double extent = static_cast<double>(segs[i].length() + left + right);
      ols_sum += static_cast<double>(inside[i]) / extent;
      sols_sum += static_cast<double>(inside[i] + left + right) / extent;
    }
    const double x = static_cast<double>(fp) / static_cast<double>(N);
    append_point(out.ols.points, fp_ols, fp, x, ols_sum / static_cast<double>(k));
    append_point(out.sols.points, fp_sols, fp, x, sols_sum / static_cast<double>(k));
    append_point(out.tpr.points, fp_tpr, fp, x, static_cast<double>(tp) / static_cast<double>(P));
  }
  return out;
}

ThresholdCurve threshold_curve(const GroundTruth& gt, std::span<const double> s, CurveKind kind) {
  auto curves = sweep(gt, s);
  switch (kind) {
    case CurveKind::OLS: return std::move(curves.ols);
    case CurveKind::SOLS: return std::move(curves.sols);
    case CurveKind::TPR: return std::move(curves.tpr);
  }
  return {};
}

double tauc(const GroundTruth& gt, std::span<const double> s, Rule rule) {
  return threshold_curve(gt, s, CurveKind::OLS).integrate(rule);
}

double stauc(const GroundTruth& gt, std::span<const double> s, Rule rule) {
  return threshold_curve(gt, s, CurveKind::SOLS).integrate(rule);
}

namespace {

// Trapezoid area of the uncollapsed ROC staircase, i.e. the Mann-Whitney
// statistic U / (P N) with ties counted one half.
double roc_area(const GroundTruth& gt, std::span<const double> s) {
  const auto mask = gt.mask();
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s[a] < s[b]; });

  double wins = 0.0;
  double negatives_below = 0.0;
  for (std::size_t g = 0; g < order.size();) {
    double pos = 0.0;
    double neg = 0.0;
    std::size_t end = g;
    for (; end < order.size() && s[order[end]] == s[order[g]]; ++end) {
      (mask[order[end]] ? pos : neg) += 1.0;
    }
    wins += pos * (negatives_below + 0.5 * neg);
    negatives_below += neg;
    g = end;
  }
  const auto P = static_cast<double>(gt.positives());
  return wins / (P * (static_cast<double>(gt.T()) - P));
}

}  // namespace

double auc(const GroundTruth& gt, std::span<const double> s) {
  check_scores(gt, s);
  require_segments(gt);
  require_negatives(gt);
  return roc_area(gt, s);
}

MetricReport evaluate(const GroundTruth& gt, std::span<const double> s) {
  const auto c = sweep(gt, s);
  return {c.ols.integrate(Rule::Step), c.ols.integrate(Rule::Trapezoid),
          c.sols.integrate(Rule::Step), c.sols.integrate(Rule::Trapezoid),
          roc_area(gt, s)};
}

}  // namespace driftlab
