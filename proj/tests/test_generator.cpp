#include "driftlab/error.hpp"
#include "driftlab/generator.hpp"

#include "fixtures/moving_peak.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace driftlab;

namespace {

SupportSchedule drifting_y(double a, double b, std::int64_t t0, std::int64_t t1) {
  SupportSchedule s;
  s.base = {0, 1.0, a};
  s.drifting = SupportSchedule::Coordinate::Y;
  s.drifts = {{t0, t1, a, b}};
  return s;
}

double grid_argmax(const ProcessCurveDataset& ds, Eigen::Index row) {
  Eigen::Index j = 0;
  ds.curves.row(row).maxCoeff(&j);
  return ds.sample_grids(row, j);
}

}  // namespace

TEST(Schedule, MeanFollowsDriftPieces) {
  const auto s = drifting_y(2.0, 3.0, 10, 20);
  Rng rng(1);
  EXPECT_DOUBLE_EQ(schedule_value(s, 5, rng).y, 2.0);
  EXPECT_DOUBLE_EQ(schedule_value(s, 10, rng).y, 2.0);
  EXPECT_DOUBLE_EQ(schedule_value(s, 15, rng).y, 2.5);
  EXPECT_DOUBLE_EQ(schedule_value(s, 20, rng).y, 3.0);
  EXPECT_DOUBLE_EQ(schedule_value(s, 40, rng).y, 3.0);
}

TEST(Schedule, PlateauCarriesIntoLaterDrifts) {
  SupportSchedule s;
  s.base = {1, 0.5, 0.0};
  s.drifting = SupportSchedule::Coordinate::X;
  s.drifts = {{10, 20, 0.5, 1.5}, {30, 40, 1.5, 0.0}};
  EXPECT_DOUBLE_EQ(s.mean_at(25), 1.5);
  EXPECT_DOUBLE_EQ(s.mean_at(35), 0.75);
  EXPECT_DOUBLE_EQ(s.mean_at(100), 0.0);
}

TEST(Schedule, StaticConditionIsUntouched) {
  SupportSchedule s;
  s.base = {2, 1.0, -3.0};
  s.noise_sigma = 5.0;
  Rng rng(3);
  EXPECT_EQ(schedule_value(s, 7, rng), s.base);
}

TEST(Schedule, NoiseHasRequestedSpread) {
  SupportSchedule s;
  s.base = {0, 1.0, 4.0};
  s.drifting = SupportSchedule::Coordinate::Y;
  s.noise_sigma = 0.5;
  Rng rng(9);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double v = schedule_value(s, 1, rng).y;
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 4.0, 0.02);
  EXPECT_NEAR(std::sqrt(sq / n - mean * mean), 0.5, 0.02);
}

TEST(Solver, ExactlyDeterminedLinearSystem) {
  const auto f = FunctionFamily::polynomial(1);
  const std::vector<SupportCondition> cond = {{0, 0.0, 1.0}, {0, 1.0, 3.0}};
  const std::vector<double> weights(4, 1.0);
  const auto r = solve_support(f, cond, weights, Vector::Zero(2), SolverSettings{});
  EXPECT_NEAR(r.w(0), 1.0, 1e-9);
  EXPECT_NEAR(r.w(1), 2.0, 1e-9);
  EXPECT_LT(r.residual_norm, 1e-10);
}

TEST(Solver, PeakConditionsConverge) {
  const auto f = FunctionFamily::polynomial(5);
  const auto cond = fixtures::peak_conditions();
  const std::vector<double> weights(4, 1.0);
  const auto r = solve_support(f, cond, weights, Vector::Zero(6), SolverSettings{});
  EXPECT_LT(r.residual_norm, 1e-6);
  const std::span<const double> w(r.w.data(), 6);
  EXPECT_NEAR(eval_deriv(f, w, 2.0, 0), 7.0, 1e-5);
  EXPECT_NEAR(eval_deriv(f, w, 2.0, 1), 0.0, 1e-5);
  EXPECT_NEAR(eval_deriv(f, w, 2.0, 2), -1.0, 1e-5);
}

TEST(Solver, InconsistentSystemGivesLeastSquares) {
  const auto f = FunctionFamily::polynomial(0);
  const std::vector<SupportCondition> cond = {{0, 0.0, 0.0}, {0, 0.0, 1.0}};
  const std::vector<double> weights(4, 1.0);
  const auto r = solve_support(f, cond, weights, Vector::Zero(1), SolverSettings{});
  EXPECT_NEAR(r.w(0), 0.5, 1e-9);
  EXPECT_NEAR(r.residual_norm, std::sqrt(0.5), 1e-9);
}

TEST(Solver, NonFiniteStartIsANumericFailure) {
  const auto f = FunctionFamily::polynomial(1);
  const std::vector<SupportCondition> cond = {{0, 0.0, 1.0}};
  const std::vector<double> weights(4, 1.0);
  Vector init(2);
  init << std::nan(""), 0.0;
  EXPECT_THROW(solve_support(f, cond, weights, init, SolverSettings{}, "t=3"), NumericFailure);
  try {
    solve_support(f, cond, weights, init, SolverSettings{}, "t=3");
  } catch (const NumericFailure& e) {
    EXPECT_NE(std::string(e.what()).find("t=3"), std::string::npos);
  }
}

TEST(Solver, WrongInitLengthThrows) {
  const auto f = FunctionFamily::polynomial(2);
  const std::vector<SupportCondition> cond = {{0, 0.0, 1.0}};
  const std::vector<double> weights(4, 1.0);
  EXPECT_THROW(solve_support(f, cond, weights, Vector::Zero(2), SolverSettings{}), DimensionError);
}

TEST(Generate, SingleMovingPeakCurvePeaksAtTwo) {
  auto spec = fixtures::moving_peak_dataset();
  spec.T = 1;
  for (auto& s : spec.schedules) {
    s.drifting = SupportSchedule::Coordinate::None;
    s.drifts.clear();
  }
  const auto ds = generate(spec);
  EXPECT_NEAR(grid_argmax(ds, 0), 2.0, 0.04);
  EXPECT_NEAR(ds.curves.row(0).maxCoeff(), 7.0, 1e-3);
}

TEST(Generate, PeakMovesAcrossTheSegment) {
  const auto ds = generate(fixtures::moving_peak_dataset());
  ASSERT_EQ(ds.ground_truth.segments(), (std::vector<Interval>{{1000, 1300}}));
  for (Eigen::Index t = 0; t < 999; t += 50) EXPECT_NEAR(grid_argmax(ds, t), 2.0, 0.05);
  for (Eigen::Index t = 1300; t < 2000; t += 50) EXPECT_NEAR(grid_argmax(ds, t), 3.0, 0.05);
  for (double r : ds.residual_norms) EXPECT_LT(r, 1e-6);
}

TEST(Generate, IsDeterministic) {
  const auto spec = preset(Preset::Dataset2, 0.02, 42);
  const auto a = generate(spec);
  const auto b = generate(spec);
  EXPECT_EQ(a.curves, b.curves);
  EXPECT_EQ(a.latents, b.latents);
  EXPECT_EQ(a.sample_grids, b.sample_grids);
}

TEST(Generate, SeedsChangeTheData) {
  const auto a = generate(preset(Preset::Dataset2, 0.02, 1));
  const auto b = generate(preset(Preset::Dataset2, 0.02, 2));
  EXPECT_NE(a.curves, b.curves);
}

TEST(Generate, ParallelColdStartMatchesSerial) {
  auto spec = fixtures::moving_peak_dataset();
  spec.T = 200;
  spec.schedules[0].drifts = {{50, 150, 2.0, 3.0}};
  spec.schedules[1].drifts = spec.schedules[0].drifts;
  spec.schedules[2].drifts = spec.schedules[0].drifts;
  spec.solver.warm_start = false;
  spec.workers = 1;
  const auto serial = generate(spec);
  spec.workers = 4;
  const auto parallel = generate(spec);
  EXPECT_EQ(serial.curves, parallel.curves);
}

TEST(Generate, WarmStartKeepsStaticLatentsFixed) {
  auto spec = fixtures::moving_peak_dataset();
  spec.T = 50;
  for (auto& s : spec.schedules) {
    s.drifting = SupportSchedule::Coordinate::None;
    s.drifts.clear();
  }
  const auto ds = generate(spec);
  for (Eigen::Index t = 1; t < ds.latents.rows(); ++t) {
    EXPECT_LT((ds.latents.row(t) - ds.latents.row(t - 1)).norm(), 1e-8);
  }
  for (double r : ds.residual_norms) EXPECT_LT(r, spec.solver.residual_tol);
}

TEST(Generate, NoiseFreeCurvesMatchTheFamily) {
  auto spec = fixtures::moving_peak_dataset();
  spec.T = 20;
  spec.noise.sigma_x = 0.01;
  spec.schedules[0].drifts = {{5, 15, 2.0, 2.5}};
  spec.schedules[1].drifts = spec.schedules[0].drifts;
  spec.schedules[2].drifts = spec.schedules[0].drifts;
  const auto ds = generate(spec);
  for (Eigen::Index t = 0; t < ds.curves.rows(); ++t) {
    const std::span<const double> w(ds.latents.row(t).data(), 6);
    for (Eigen::Index j = 0; j < ds.curves.cols(); ++j) {
      EXPECT_EQ(ds.curves(t, j), eval_deriv(spec.family, w, ds.sample_grids(t, j), 0));
    }
  }
}

TEST(Generate, GroundTruthIsTheUnionOfDrifts) {
  DatasetSpec spec;
  spec.family = FunctionFamily::polynomial(2);
  spec.T = 100;
  spec.schedules = {drifting_y(0.0, 1.0, 10, 20), drifting_y(2.0, 3.0, 18, 30)};
  spec.schedules[1].base.x = 2.0;
  SupportSchedule third;
  third.base = {0, 3.0, 0.0};
  third.drifting = SupportSchedule::Coordinate::Y;
  third.drifts = {{60, 70, 0.0, -1.0}};
  spec.schedules.push_back(third);
  const auto gt = spec.ground_truth();
  EXPECT_EQ(gt.segments(), (std::vector<Interval>{{10, 30}, {60, 70}}));
}

TEST(Generate, InvalidSpecsAreRejected) {
  auto spec = fixtures::moving_peak_dataset();
  spec.grid.m = 1;
  EXPECT_THROW(generate(spec), ConfigError);
  spec = fixtures::moving_peak_dataset();
  spec.schedules[0].drifts = {{1500, 2500, 2.0, 3.0}};
  EXPECT_THROW(generate(spec), ConfigError);
  spec = fixtures::moving_peak_dataset();
  spec.schedules[0].drifts = {{10, 10, 2.0, 3.0}};
  EXPECT_THROW(generate(spec), ConfigError);
  spec = fixtures::moving_peak_dataset();
  spec.schedules[0].base.order = 4;
  EXPECT_THROW(generate(spec), ConfigError);
  spec = fixtures::moving_peak_dataset();
  spec.weights = {1.0, -1.0};
  EXPECT_THROW(generate(spec), ConfigError);
}

TEST(Presets, ShapesFollowTheScaledPercentages) {
  const auto d1 = preset(Preset::Dataset1, 0.1, 7);
  EXPECT_EQ(d1.T, 1000);
  EXPECT_EQ(d1.grid.m, 100);
  EXPECT_EQ(d1.family.kind, FunctionFamily::Kind::SineProduct);
  const auto gt1 = d1.ground_truth();
  ASSERT_EQ(gt1.k(), 1u);
  EXPECT_NEAR(static_cast<double>(gt1.segments()[0].length()), 10.0, 1.0);

  const auto d2 = preset(Preset::Dataset2, 1.0, 7);
  EXPECT_EQ(d2.T, 10000);
  EXPECT_EQ(d2.grid, (SampleGrid{0.0, 0.04, 100}));
  EXPECT_EQ(d2.family, FunctionFamily::polynomial(7));
  EXPECT_EQ(d2.ground_truth().k(), 2u);
  EXPECT_NEAR(d2.ground_truth().drift_fraction(), 0.02, 0.002);

  const auto d3 = preset(Preset::Dataset3, 1.0, 7);
  EXPECT_EQ(d3.T, 30000);
  EXPECT_EQ(d3.grid.m, 400);
  EXPECT_NEAR(d3.grid.x0 + d3.grid.m * d3.grid.dx, 4.0, 1e-12);
  EXPECT_EQ(d3.ground_truth().k(), 3u);
  EXPECT_NEAR(d3.ground_truth().drift_fraction(), 0.001, 0.0002);
}

TEST(Presets, ScaledTIsCeiling) {
  EXPECT_EQ(preset(Preset::Dataset1, 0.02, 1).T, 200);
  EXPECT_EQ(preset(Preset::Dataset3, 0.1, 1).T, 3000);
  EXPECT_EQ(preset(Preset::Dataset2, 0.05, 1).T, 500);
}

TEST(Presets, NamesRoundTrip) {
  for (auto p : {Preset::Dataset1, Preset::Dataset2, Preset::Dataset3}) {
    EXPECT_EQ(parse_preset(preset_name(p)), p);
  }
  EXPECT_THROW(parse_preset("dataset-4"), ConfigError);
  EXPECT_THROW(preset(Preset::Dataset1, 0.0, 1), ConfigError);
  EXPECT_THROW(preset(Preset::Dataset1, 1.5, 1), ConfigError);
}

TEST(Presets, SmallScaleDatasetsGenerateCleanly) {
  for (auto p : {Preset::Dataset1, Preset::Dataset2, Preset::Dataset3}) {
    const auto ds = generate(preset(p, 0.02, 3));
    EXPECT_TRUE(ds.curves.allFinite());
    for (double r : ds.residual_norms) EXPECT_LT(r, 1e-6) << preset_name(p);
  }
}
