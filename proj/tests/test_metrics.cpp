#include "driftlab/error.hpp"
#include "driftlab/metrics.hpp"
#include "driftlab/rng.hpp"
#include "fixtures/naive_metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

using namespace driftlab;

namespace {

std::vector<double> indicator(std::int64_t T, const std::vector<Interval>& segs) {
  std::vector<double> s(static_cast<std::size_t>(T), 0.0);
  for (const auto& iv : segs) {
    for (auto t = iv.lo; t <= iv.hi; ++t) s[static_cast<std::size_t>(t - 1)] = 1.0;
  }
  return s;
}

/// k equal segments of total mass P*T, evenly spread over 1..T.
GroundTruth equal_segments(std::int64_t T, int k, double P) {
  const auto len = static_cast<std::int64_t>(std::llround(P * static_cast<double>(T))) / k;
  const std::int64_t stride = T / k;
  std::vector<Interval> segs;
  for (int i = 0; i < k; ++i) {
    const std::int64_t lo = i * stride + (stride - len) / 2 + 1;
    segs.push_back({lo, lo + len - 1});
  }
  return GroundTruth(T, segs);
}

}  // namespace

TEST(Thresholding, PredictedSegments) {
  const std::vector<double> s = {0, 1, 1, 0, 1};
  const std::vector<Interval> expected = {{2, 3}, {5, 5}};
  EXPECT_EQ(predicted_segments(s, 0.5), expected);
  EXPECT_TRUE(predicted_segments(s, 2.0).empty());
}

TEST(Overlap, HandExamples) {
  const GroundTruth gt(10, {{3, 5}});
  const auto s = indicator(10, {{4, 6}});
  EXPECT_DOUBLE_EQ(ols(gt, s, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(sols(gt, s, 0.5), 0.75);
  EXPECT_DOUBLE_EQ(fpr(gt, s, 0.5), 1.0 / 7.0);
  EXPECT_DOUBLE_EQ(tpr(gt, s, 0.5), 2.0 / 3.0);
}

TEST(Overlap, PerfectPredictionScoresOne) {
  const GroundTruth gt(30, {{3, 5}, {10, 20}});
  const auto s = indicator(30, gt.segments());
  EXPECT_DOUBLE_EQ(ols(gt, s, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(sols(gt, s, 0.5), 1.0);
}

TEST(Overlap, CoveringIntervalGetsFullSoftCredit) {
  const GroundTruth gt(20, {{5, 8}});
  const auto s = indicator(20, {{2, 15}});
  EXPECT_DOUBLE_EQ(sols(gt, s, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(ols(gt, s, 0.5), 4.0 / 14.0);
}

TEST(Overlap, MissedSegmentScoresZero) {
  const GroundTruth gt(20, {{5, 8}, {15, 16}});
  const auto s = indicator(20, {{5, 8}});
  EXPECT_DOUBLE_EQ(ols(gt, s, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(sols(gt, s, 0.5), 0.5);
}

TEST(Overlap, AlwaysGuesserIsPOverK) {
  const GroundTruth gt(100, {{10, 19}, {50, 59}});
  const std::vector<double> s(100, 3.0);
  EXPECT_DOUBLE_EQ(ols(gt, s, 3.0), 20.0 / (100.0 * 2));
}

TEST(Rates, Extremes) {
  const GroundTruth gt(6, {{2, 3}});
  const std::vector<double> s = {0.1, 0.5, 0.2, 0.9, 0.3, 0.4};
  EXPECT_EQ(fpr(gt, s, 1.0), 0.0);
  EXPECT_EQ(tpr(gt, s, 1.0), 0.0);
  EXPECT_EQ(fpr(gt, s, 0.1), 1.0);
  EXPECT_EQ(tpr(gt, s, 0.1), 1.0);
}

TEST(ThresholdCurve, ConstantScoreHasTwoPoints) {
  const GroundTruth gt(100, {{10, 19}, {50, 59}});
  const std::vector<double> s(100, 0.7);
  const auto c = threshold_curve(gt, s, CurveKind::OLS);
  const std::vector<CurvePoint> expected = {{0.0, 0.0}, {1.0, 0.1}};
  EXPECT_EQ(c.points, expected);
}

TEST(ThresholdCurve, PerfectDetectorReachesOneAtZeroFpr) {
  const GroundTruth gt(50, {{20, 29}});
  const auto c = threshold_curve(gt, indicator(50, gt.segments()), CurveKind::OLS);
  ASSERT_GE(c.points.size(), 2u);
  EXPECT_EQ(c.points[0], (CurvePoint{0.0, 1.0}));
  EXPECT_EQ(c.points.back().fpr, 1.0);
}

TEST(ThresholdCurve, FprStrictlyIncreasesAndSpansTheUnitInterval) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = fixtures::random_instance(rng, 30);
    for (auto kind : {CurveKind::OLS, CurveKind::SOLS, CurveKind::TPR}) {
      const auto c = threshold_curve(inst.gt, inst.scores, kind);
      ASSERT_FALSE(c.points.empty());
      EXPECT_EQ(c.points.front().fpr, 0.0);
      EXPECT_EQ(c.points.back().fpr, 1.0);
      for (std::size_t i = 1; i < c.points.size(); ++i) EXPECT_LT(c.points[i - 1].fpr, c.points[i].fpr);
    }
  }
}

TEST(ThresholdCurve, MatchesNaiveSweep) {
  Rng rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    const auto inst = fixtures::random_instance(rng);
    const std::pair<CurveKind, naive::Kind> kinds[] = {
        {CurveKind::OLS, naive::Kind::Ols}, {CurveKind::SOLS, naive::Kind::Sols}, {CurveKind::TPR, naive::Kind::Tpr}};
    for (const auto& [kind, nk] : kinds) {
      const auto got = threshold_curve(inst.gt, inst.scores, kind).points;
      const auto want = naive::curve(inst.truth, inst.scores, nk);
      ASSERT_EQ(got.size(), want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_NEAR(got[i].fpr, want[i].first, 1e-12);
        EXPECT_NEAR(got[i].value, want[i].second, 1e-12);
      }
    }
  }
}

TEST(Tauc, AlwaysAndNeverClosedForms) {
  for (int k : {1, 2, 3, 5, 10}) {
    for (double P : {0.01, 0.1, 0.5}) {
      const auto gt = equal_segments(1000, k, P);
      const double mass = static_cast<double>(gt.positives()) / 1000.0;
      const std::vector<double> always(1000, 1.0);
      EXPECT_EQ(tauc(gt, always, Rule::Step), 0.0);
      EXPECT_NEAR(tauc(gt, always, Rule::Trapezoid), mass / (2 * k), 1e-12);
      const std::vector<double> never(1000, -std::numeric_limits<double>::infinity());
      EXPECT_EQ(tauc(gt, never, Rule::Step), 0.0);
      EXPECT_EQ(tauc(gt, never, Rule::Trapezoid), 0.0);
    }
  }
}

TEST(Tauc, EqualSegmentFixtureHasRequestedMass) {
  for (int k : {1, 2, 3, 5, 10}) {
    for (double P : {0.01, 0.1, 0.5}) {
      const auto gt = equal_segments(1000, k, P);
      EXPECT_EQ(gt.k(), static_cast<std::size_t>(k));
      EXPECT_EQ(gt.positives(), static_cast<std::int64_t>(std::llround(P * 1000)) / k * k);
    }
  }
}

TEST(Tauc, AlwaysGuesserDecaysWithSegmentCount) {
  double previous = 1.0;
  for (int k = 1; k <= 10; ++k) {
    const auto gt = equal_segments(1000, k, 0.2);
    const double mass = static_cast<double>(gt.positives()) / 1000.0;
    const double v = tauc(gt, std::vector<double>(1000, 0.0), Rule::Trapezoid);
    EXPECT_NEAR(v, mass / (2 * k), 1e-12);
    EXPECT_LT(v, previous);
    previous = v;
  }
}

TEST(Tauc, ExactIndicator) {
  const GroundTruth gt(40, {{5, 9}, {20, 30}});
  const auto s = indicator(40, gt.segments());
  const auto r = evaluate(gt, s);
  EXPECT_DOUBLE_EQ(r.tauc_step, 1.0);
  // Curve (0, 1) -> (1, P/k): flagging everything leaves o_i = |D_i| / T.
  EXPECT_DOUBLE_EQ(r.tauc_trapezoid, 0.5 * (1.0 + (5.0 / 40 + 11.0 / 40) / 2));
  EXPECT_DOUBLE_EQ(r.stauc_step, 1.0);
  EXPECT_DOUBLE_EQ(r.stauc_trapezoid, 1.0);
  EXPECT_DOUBLE_EQ(r.auc, 1.0);
}

TEST(Auc, PairwiseHandExample) {
  const GroundTruth gt(6, {{4, 5}});
  const std::vector<double> s = {.1, .9, .2, .8, .7, .3};
  const std::vector<naive::Segment> truth = {{4, 5}};
  EXPECT_NEAR(auc(gt, s), naive::auc_pairs(truth, s), 1e-12);
  // Positives 0.8, 0.7 beat 0.1, 0.2, 0.3 and lose to 0.9.
  EXPECT_NEAR(auc(gt, s), 6.0 / 8.0, 1e-12);
}

TEST(Auc, TiesCountHalf) {
  const GroundTruth gt(4, {{1, 2}});
  const std::vector<double> s = {1, 1, 1, 1};
  EXPECT_DOUBLE_EQ(auc(gt, s), 0.5);
}

TEST(Metrics, MatchNaiveOraclesOnSmallInstances) {
  Rng rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto inst = fixtures::random_instance(rng);
    EXPECT_NEAR(auc(inst.gt, inst.scores), naive::auc_pairs(inst.truth, inst.scores), 1e-12);
    for (double tau : inst.scores) {
      const auto pred = naive::flagged(inst.scores, tau);
      EXPECT_NEAR(ols(inst.gt, inst.scores, tau), naive::overlap(inst.truth, pred, false), 1e-12);
      EXPECT_NEAR(sols(inst.gt, inst.scores, tau), naive::overlap(inst.truth, pred, true), 1e-12);
    }
    for (bool trap : {false, true}) {
      const Rule rule = trap ? Rule::Trapezoid : Rule::Step;
      EXPECT_NEAR(tauc(inst.gt, inst.scores, rule),
                  naive::area(naive::curve(inst.truth, inst.scores, naive::Kind::Ols), trap), 1e-12);
      EXPECT_NEAR(stauc(inst.gt, inst.scores, rule),
                  naive::area(naive::curve(inst.truth, inst.scores, naive::Kind::Sols), trap), 1e-12);
    }
  }
}

TEST(Metrics, DominanceAndBounds) {
  Rng rng(6);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto inst = fixtures::random_instance(rng, 40);
    for (double tau : inst.scores) {
      const double o = ols(inst.gt, inst.scores, tau);
      const double so = sols(inst.gt, inst.scores, tau);
      EXPECT_GE(so, o);
      EXPECT_GE(o, 0.0);
      EXPECT_LE(so, 1.0);
    }
    const auto r = evaluate(inst.gt, inst.scores);
    EXPECT_GE(r.stauc_step, r.tauc_step);
    EXPECT_GE(r.stauc_trapezoid, r.tauc_trapezoid);
    for (double v : {r.tauc_step, r.tauc_trapezoid, r.stauc_step, r.stauc_trapezoid, r.auc}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Metrics, RatesAreMonotoneInThreshold) {
  Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = fixtures::random_instance(rng, 40);
    std::vector<double> taus = inst.scores;
    std::sort(taus.begin(), taus.end());
    for (std::size_t i = 1; i < taus.size(); ++i) {
      EXPECT_LE(fpr(inst.gt, inst.scores, taus[i]), fpr(inst.gt, inst.scores, taus[i - 1]));
      EXPECT_LE(tpr(inst.gt, inst.scores, taus[i]), tpr(inst.gt, inst.scores, taus[i - 1]));
    }
  }
}

TEST(Metrics, InvariantUnderIncreasingTransforms) {
  Rng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = fixtures::random_instance(rng, 40);
    std::vector<double> t = inst.scores;
    for (auto& v : t) v = std::exp(3.0 * v) + 7.0;
    EXPECT_EQ(evaluate(inst.gt, inst.scores), evaluate(inst.gt, t));
  }
}

TEST(Metrics, LaggedPredictionFavoursSoftTauc) {
  const GroundTruth gt(500, {{200, 260}});
  const auto s = indicator(500, {{215, 275}});
  const auto r = evaluate(gt, s);
  EXPECT_GT(r.stauc_trapezoid, r.auc);
  EXPECT_GT(r.stauc_trapezoid, r.tauc_trapezoid);
}

TEST(Metrics, DegenerateGroundTruthIsRejected) {
  const std::vector<double> s(10, 0.5);
  EXPECT_THROW(tauc(GroundTruth(10, {}), s, Rule::Step), DegenerateGroundTruthError);
  EXPECT_THROW(auc(GroundTruth(10, {{1, 10}}), s), DegenerateGroundTruthError);
  EXPECT_THROW(fpr(GroundTruth(10, {{1, 10}}), s, 0.1), DegenerateGroundTruthError);
  EXPECT_THROW(ols(GroundTruth(10, {}), s, 0.1), DegenerateGroundTruthError);
}

TEST(Metrics, MalformedScoresAreRejected) {
  const GroundTruth gt(5, {{2, 3}});
  EXPECT_THROW(tauc(gt, std::vector<double>(4, 0.0), Rule::Step), InputError);
  std::vector<double> s(5, 0.0);
  s[2] = std::nan("");
  EXPECT_THROW(auc(gt, s), InputError);
  s[2] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(evaluate(gt, s), InputError);
}

TEST(Metrics, NamesOfKindsAndRules) {
  EXPECT_EQ(to_string(Rule::Step), "step");
  EXPECT_EQ(to_string(Rule::Trapezoid), "trapezoid");
  EXPECT_EQ(to_string(CurveKind::SOLS), "sols");
}
