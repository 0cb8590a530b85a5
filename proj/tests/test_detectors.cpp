#include "driftlab/autoencoder.hpp"
#include "driftlab/detectors.hpp"
#include "driftlab/error.hpp"
#include "driftlab/generator.hpp"
#include "driftlab/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

using namespace driftlab;

namespace {

DetectorSpec make(DetectorKind kind) { return DetectorSpec{std::move(kind), ""}; }

AETrainSpec small_ae(int k = 2) {
  AETrainSpec ae;
  ae.latent_dim = k;
  ae.hidden_width = 16;
  ae.epochs = 10;
  ae.batch_size = 32;
  ae.learning_rate = 1e-2;
  ae.seed = 3;
  return ae;
}

/// Noisy flat curves whose level jumps by `shift` from execution `at` on.
Matrix shifted_curves(int T, int m, int at, double shift, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix c(T, m);
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < m; ++j) c(t, j) = n(rng) + (t >= at ? shift : 0.0);
  }
  return c;
}

const ProcessCurveDataset& small_preset() {
  static const ProcessCurveDataset ds = generate(preset(Preset::Dataset2, 0.05, 1));
  return ds;
}

}  // namespace

TEST(Detectors, AlwaysIsConstantOne) {
  const auto s = score(make(detector::Always{}), small_preset());
  ASSERT_EQ(static_cast<std::int64_t>(s.size()), small_preset().T());
  for (double v : s) EXPECT_EQ(v, 1.0);
}

TEST(Detectors, NeverIsNegativeInfinity) {
  const auto s = score(make(detector::Never{}), small_preset());
  for (double v : s) EXPECT_EQ(v, -std::numeric_limits<double>::infinity());
}

TEST(Detectors, RollingMeanDifferenceHandExample) {
  Matrix c(5, 1);
  c << 1, 1, 1, 5, 5;
  const Matrix grid = Matrix::Zero(5, 1);
  const auto s = score(make(detector::RollingMeanDifference{2}), CurveView{c, grid});
  const ScoreSeries expected = {0, 0, 0, 2, 2};
  EXPECT_EQ(s, expected);
}

TEST(Detectors, RollingMeanMaxIsRowMaxOfMeans) {
  Matrix c(3, 2);
  c << 1, 4, 3, 0, 5, 2;
  const auto a = rolling_mean_max(c, 2);
  EXPECT_EQ(a[0], 0.0);
  EXPECT_DOUBLE_EQ(a[1], 2.0);
  EXPECT_DOUBLE_EQ(a[2], 4.0);
}

TEST(Detectors, WarmUpPrefixIsZero) {
  const auto& ds = small_preset();
  struct Case {
    DetectorKind kind;
    int warm;
  };
  const std::vector<Case> cases = {
      {detector::RollingMeanDifference{7}, 7},
      {detector::RollingMeanStdDev{6}, 10},
      {detector::SlidingKSWIN{8, 5, 3}, 15},
      {detector::AEMeanKS{6, 4, 2, small_ae(), detector::LatentAggregation::Max}, 11},
      {detector::AEMMD{6, 4, 2, small_ae()}, 11},
  };
  for (const auto& c : cases) {
    const auto s = score(make(c.kind), ds);
    for (int t = 0; t < c.warm; ++t) EXPECT_EQ(s[static_cast<std::size_t>(t)], 0.0) << kind_name(c.kind) << " t=" << t;
    EXPECT_TRUE(std::any_of(s.begin() + c.warm, s.end(), [](double v) { return v != 0.0; })) << kind_name(c.kind);
    for (double v : s) EXPECT_TRUE(std::isfinite(v));
  }
}

TEST(Detectors, WindowLargerThanTIsAConfigError) {
  Matrix c = Matrix::Zero(10, 3);
  const CurveView view{c, c};
  EXPECT_THROW(score(make(detector::RollingMeanDifference{11}), view), ConfigError);
  EXPECT_THROW(score(make(detector::RollingMeanStdDev{6}), view), ConfigError);
  EXPECT_THROW(score(make(detector::SlidingKSWIN{5, 5, 1}), view), ConfigError);
  EXPECT_THROW(score(make(detector::Cluster{11, 0}), view), ConfigError);
  EXPECT_THROW(score(make(detector::AEMMD{5, 5, 1, small_ae()}), view), ConfigError);
}

TEST(Detectors, InvalidParametersAreRejected) {
  EXPECT_THROW(make(detector::RollingMeanDifference{1}).validate(), ConfigError);
  EXPECT_THROW(make(detector::SlidingKSWIN{2, 1, 0}).validate(), ConfigError);
  EXPECT_THROW(make(detector::SlidingKSWIN{2, 2, -1}).validate(), ConfigError);
  EXPECT_THROW(make(detector::Cluster{0, 0}).validate(), ConfigError);
  auto ae = small_ae();
  ae.latent_dim = 0;
  EXPECT_THROW(make(detector::AEMMD{3, 3, 0, ae}).validate(), ConfigError);
}

TEST(Detectors, RandomGuessIsReproducibleAndSeedDependent) {
  const auto& ds = small_preset();
  const auto a = score(make(detector::RandomGuess{5}), ds);
  EXPECT_EQ(a, score(make(detector::RandomGuess{5}), ds));
  EXPECT_NE(a, score(make(detector::RandomGuess{6}), ds));
  for (double v : a) {
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  const auto spec = make(detector::RandomGuess{5});
  EXPECT_NE(a, score(spec.reseeded(2), ds));
  EXPECT_EQ(score(spec.reseeded(2), ds), score(spec.reseeded(2), ds));
}

TEST(Detectors, EveryDetectorIsDeterministic) {
  const auto& ds = small_preset();
  const std::vector<DetectorKind> kinds = {
      detector::RollingMeanDifference{5}, detector::RollingMeanStdDev{5},
      detector::SlidingKSWIN{5, 3, 0},    detector::Cluster{4, 1},
      detector::AEMeanKS{5, 3, 0, small_ae(), detector::LatentAggregation::Mean},
      detector::AEMMD{3, 2, 0, small_ae()}};
  for (const auto& k : kinds) EXPECT_EQ(score(make(k), ds), score(make(k), ds)) << kind_name(k);
}

TEST(Detectors, KswinPeaksNearTheShift) {
  const Matrix c = shifted_curves(400, 4, 200, 3.0, 31);
  const DetectorSpec spec = make(detector::SlidingKSWIN{30, 20, 5});
  const auto s = score(spec, CurveView{c, c});
  const auto argmax = std::max_element(s.begin(), s.end()) - s.begin();
  // A shift at 0-based row 200 first enters the observation window at row 200.
  EXPECT_GE(argmax, 200);
  EXPECT_LE(argmax, 200 + 20 + 5);
}

TEST(Detectors, ScoresDoNotDependOnGroundTruth) {
  auto ds = small_preset();
  const auto spec = make(detector::SlidingKSWIN{6, 4, 1});
  const auto before = score(spec, ds);
  ds.ground_truth = GroundTruth(ds.T(), {{1, 2}});
  EXPECT_EQ(score(spec, ds), before);
}

TEST(Detectors, ClusterFindsTheOddCurve) {
  Matrix c = shifted_curves(60, 5, 1000, 0.0, 32);
  c.row(41).array() += 40.0;
  const auto s = score(make(detector::Cluster{1, 0}), CurveView{c, c});
  EXPECT_EQ(std::max_element(s.begin(), s.end()) - s.begin(), 41);
}

TEST(Detectors, NamesAndLabels) {
  EXPECT_EQ(make(detector::RollingMeanDifference{10}).name(), "RollingMeanDifference(10)");
  EXPECT_EQ(make(detector::SlidingKSWIN{20, 10, 5}).name(), "SlidingKSWIN(20,10,5)");
  EXPECT_EQ(make(detector::AEMMD{3, 2, 0, small_ae(2)}).name(), "AE(2)-MMD(3,2,0)");
  EXPECT_EQ((DetectorSpec{detector::Always{}, "const"}).name(), "const");
  EXPECT_EQ(kind_name(detector::Cluster{}), "Cluster");
}

TEST(Autoencoder, LossDecreasesOverFirstEpochs) {
  const auto& ds = small_preset();
  AETrainSpec spec;
  spec.latent_dim = 2;
  spec.epochs = 6;
  spec.seed = 4;
  const AEModel model = ae_train(ds.curves, spec);
  ASSERT_EQ(model.epoch_losses.size(), 6u);
  for (int e = 1; e < 5; ++e) EXPECT_LT(model.epoch_losses[static_cast<std::size_t>(e)], model.epoch_losses[static_cast<std::size_t>(e - 1)]);
}

TEST(Autoencoder, EncodeShape) {
  const auto& ds = small_preset();
  const AEModel model = ae_train(ds.curves, small_ae(3));
  const Matrix z = ae_encode(model, ds.curves);
  EXPECT_EQ(z.rows(), ds.T());
  EXPECT_EQ(z.cols(), 3);
  EXPECT_EQ(model.input_dim(), ds.m());
  EXPECT_TRUE(z.allFinite());
}

TEST(Autoencoder, BeatsTheMeanCurveBaseline) {
  const auto& ds = small_preset();
  AETrainSpec spec;
  spec.latent_dim = 2;
  spec.seed = 5;
  const AEModel model = ae_train(ds.curves, spec);
  const Matrix rec = ae_reconstruct(model, ds.curves);
  const double mse = (rec - ds.curves).squaredNorm() / static_cast<double>(ds.curves.size());
  const Eigen::RowVectorXd mean = ds.curves.colwise().mean();
  const double baseline = (ds.curves.rowwise() - mean).squaredNorm() / static_cast<double>(ds.curves.size());
  EXPECT_LT(mse, baseline);
}

TEST(Autoencoder, DeterministicGivenSeed) {
  const auto& ds = small_preset();
  const auto a = ae_encode(ae_train(ds.curves, small_ae()), ds.curves);
  const auto b = ae_encode(ae_train(ds.curves, small_ae()), ds.curves);
  EXPECT_EQ(a, b);
  auto other = small_ae();
  other.seed = 99;
  EXPECT_NE(a, ae_encode(ae_train(ds.curves, other), ds.curves));
}

TEST(Autoencoder, RejectsInvalidSpecs) {
  auto spec = small_ae();
  spec.learning_rate = 0.0;
  EXPECT_THROW(spec.validate(), ConfigError);
  spec = small_ae();
  spec.batch_size = 1000;
  EXPECT_THROW(ae_train(small_preset().curves, spec), ConfigError);
}
