#pragma once

#include "driftlab/autoencoder.hpp"
#include "driftlab/generator.hpp"
#include "driftlab/types.hpp"

#include <cstdint>
#include <string>
#include <variant>

namespace driftlab {

/// What a detector may look at: the curves and their sample positions. The
/// ground truth is deliberately not part of this view.
struct CurveView {
  const Matrix& curves;
  const Matrix& sample_grids;

  std::int64_t T() const noexcept { return curves.rows(); }
};

namespace detector {

/// |a_t - a_{t-1}| where a_t is the row maximum of the rolling-mean curve.
struct RollingMeanDifference {
  int window = 10;
};

/// Rolling standard deviation of the row maximum of the rolling-mean curve.
struct RollingMeanStdDev {
  int window = 10;
};

/// Sliding KS test on per-curve means.
struct SlidingKSWIN {
  int ref = 20;
  int obs = 20;
  int gap = 0;
};

/// Distance of each raw curve to its nearest k-means center.
struct Cluster {
  int n_clusters = 5;
  std::uint64_t seed = 0;
};

enum class LatentAggregation { Mean, Max };

/// Autoencoder latents aggregated to a scalar, then sliding KS.
struct AEMeanKS {
  int ref = 20;
  int obs = 20;
  int gap = 0;
  AETrainSpec ae;
  LatentAggregation aggregation = LatentAggregation::Mean;
};

/// Autoencoder latents, then sliding multivariate MMD.
struct AEMMD {
  int ref = 20;
  int obs = 20;
  int gap = 0;
  AETrainSpec ae;
};

/// I.i.d. uniform [0, 1) scores.
struct RandomGuess {
  std::uint64_t seed = 0;
};

/// Flags every execution (constant score 1).
struct Always {};

/// Never flags anything (score -inf everywhere).
struct Never {};

}  // namespace detector

using DetectorKind =
    std::variant<detector::RollingMeanDifference, detector::RollingMeanStdDev,
                 detector::SlidingKSWIN, detector::Cluster, detector::AEMeanKS, detector::AEMMD,
                 detector::RandomGuess, detector::Always, detector::Never>;

struct DetectorSpec {
  DetectorKind kind;
  std::string label;  // display name; derived from kind when empty

  std::string name() const;
  /// Throws ConfigError on invalid parameters (windows < 2, n_c < 1, ...).
  void validate() const;
  /// Copy with every internal seed mixed with `salt`.
  DetectorSpec reseeded(std::uint64_t salt) const;
};

/// Kind name used in JSON ("RollingMeanDifference", "AEMMD", ...).
std::string kind_name(const DetectorKind& kind);

/// Score every execution. Positions without enough window history score 0.
/// Throws ConfigError if a window does not fit within T.
ScoreSeries score(const DetectorSpec& spec, const CurveView& data);
ScoreSeries score(const DetectorSpec& spec, const ProcessCurveDataset& dataset);

/// Per-curve maximum of the rolling-mean curves (warm-up rows zero).
std::vector<double> rolling_mean_max(const Matrix& curves, int window);

}  // namespace driftlab
