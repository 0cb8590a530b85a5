#pragma once

#include "driftlab/ground_truth.hpp"
#include "driftlab/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace driftlab {

/// Executions flagged at threshold tau: {t : s_t >= tau}, as a 0-based mask.
std::vector<bool> predicted_mask(std::span<const double> s, double tau);

/// Drift segments of the thresholded score series.
std::vector<Interval> predicted_segments(std::span<const double> s, double tau);

/// Overlap score (OLS), averaged over the true segments.
///
/// For each true segment D_i, T_i is the union of predicted segments that
/// intersect it, and
///   o_i = |T_i & D_i| / (max(T_i | D_i) - min(T_i | D_i) + 1),  o_i = 0 if T_i is empty.
double ols(const GroundTruth& gt, std::span<const double> s, double tau);

/// Soft overlap score: as ols() with numerator |T_i|.
double sols(const GroundTruth& gt, std::span<const double> s, double tau);

/// Fraction of non-drift executions flagged at tau.
double fpr(const GroundTruth& gt, std::span<const double> s, double tau);
/// Fraction of drift executions flagged at tau.
double tpr(const GroundTruth& gt, std::span<const double> s, double tau);

enum class CurveKind { OLS, SOLS, TPR };
enum class Rule { Step, Trapezoid };

std::string to_string(CurveKind kind);
std::string to_string(Rule rule);

struct CurvePoint {
  double fpr = 0.0;
  double value = 0.0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct ThresholdCurve {
  CurveKind kind = CurveKind::OLS;
  std::vector<CurvePoint> points;  // strictly increasing fpr

  /// Area under the curve over the covered fpr range.
  double integrate(Rule rule) const;
};

/// Sweeps tau over the distinct finite scores (descending) plus a sentinel
/// above the maximum. Points sharing an fpr keep the largest value.
///
/// Entries equal to -inf are never flagged; a series made only of them
/// yields the single point (0, 0).
ThresholdCurve threshold_curve(const GroundTruth& gt, std::span<const double> s, CurveKind kind);

/// All three curves from one sweep.
struct SweepCurves {
  ThresholdCurve ols;
  ThresholdCurve sols;
  ThresholdCurve tpr;
};
SweepCurves sweep(const GroundTruth& gt, std::span<const double> s);

/// Temporal AUC: area under the FPR-OLS curve.
double tauc(const GroundTruth& gt, std::span<const double> s, Rule rule);
/// Soft temporal AUC: area under the FPR-sOLS curve.
double stauc(const GroundTruth& gt, std::span<const double> s, Rule rule);
/// Classical ROC AUC: trapezoid area of the ROC staircase before the
/// duplicate-fpr collapse, equal to the Mann-Whitney U / (P N) with ties
/// counted one half.
double auc(const GroundTruth& gt, std::span<const double> s);

struct MetricReport {
  double tauc_step = 0.0;
  double tauc_trapezoid = 0.0;
  double stauc_step = 0.0;
  double stauc_trapezoid = 0.0;
  double auc = 0.0;

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

MetricReport evaluate(const GroundTruth& gt, std::span<const double> s);

}  // namespace driftlab
