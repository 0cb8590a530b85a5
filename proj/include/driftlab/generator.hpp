#pragma once

#include "driftlab/curve_model.hpp"
#include "driftlab/ground_truth.hpp"
#include "driftlab/rng.hpp"
#include "driftlab/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace driftlab {

/// Linear move of one support coordinate from a to b over executions [t0, t1].
struct DriftSpec {
  std::int64_t t0 = 1;
  std::int64_t t1 = 2;
  double a = 0.0;
  double b = 0.0;

  friend bool operator==(const DriftSpec&, const DriftSpec&) = default;
};

/// Trajectory of one support condition over the executions.
///
/// The drifting coordinate follows a piecewise-linear mean built from the
/// drift list and is jittered with N(0, noise_sigma^2) each execution. With
/// `Coordinate::None` the condition is static and noise-free.
struct SupportSchedule {
  enum class Coordinate { None, X, Y };

  SupportCondition base;
  Coordinate drifting = Coordinate::None;
  std::vector<DriftSpec> drifts;
  double noise_sigma = 0.0;

  /// Noise-free mean of the drifting coordinate at execution t.
  double mean_at(std::int64_t t) const;

  friend bool operator==(const SupportSchedule&, const SupportSchedule&) = default;
};

struct SolverSettings {
  int max_iters = 200;
  double residual_tol = 1e-10;
  double damping_init = 1e-3;
  bool warm_start = true;

  friend bool operator==(const SolverSettings&, const SolverSettings&) = default;
};

struct SampleGrid {
  double x0 = 0.0;  // curve j samples x0 + j * dx, j = 1..m
  double dx = 0.04;
  int m = 100;

  friend bool operator==(const SampleGrid&, const SampleGrid&) = default;
};

struct NoiseSpec {
  double sigma_x = 0.0;
  double sigma_y = 0.01;
  /// When set, sigma_y is relative to the value range of each noise-free curve.
  bool sigma_y_relative = true;

  friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

struct DatasetSpec {
  FunctionFamily family;
  std::vector<SupportSchedule> schedules;
  std::vector<double> weights;  // D_i per derivative order; empty means all ones
  std::int64_t T = 1;
  SampleGrid grid;
  NoiseSpec noise;
  std::uint64_t seed = 0;
  SolverSettings solver;
  /// Threads for independent solves (only used when warm_start is off).
  int workers = 1;

  /// Throws ConfigError describing the first violated invariant.
  void validate() const;
  /// Weights padded to max_order + 1 entries.
  std::vector<double> effective_weights() const;
  /// Merged union of all schedule drift intervals.
  GroundTruth ground_truth() const;

  friend bool operator==(const DatasetSpec&, const DatasetSpec&) = default;
};

struct ProcessCurveDataset {
  Matrix curves;        // T x m, row t-1 is C_t
  Matrix sample_grids;  // T x m, realized I_t
  Matrix latents;       // T x k, w(t)
  GroundTruth ground_truth;
  DatasetSpec spec;
  std::vector<double> residual_norms;  // final solver residual per execution

  std::int64_t T() const noexcept { return curves.rows(); }
  int m() const noexcept { return static_cast<int>(curves.cols()); }
};

/// Condition for execution t, drifting coordinate drawn around its mean.
SupportCondition schedule_value(const SupportSchedule& schedule, std::int64_t t, Rng& rng);

struct SolveResult {
  Vector w;
  double residual_norm = 0.0;
  int iterations = 0;
};

/// Damped Gauss-Newton (Levenberg-Marquardt) on the weighted support residuals.
///
/// Non-convergence is reported through residual_norm; a non-finite residual or
/// Jacobian throws NumericFailure, prefixed with `context`.
SolveResult solve_support(const FunctionFamily& family,
                          std::span<const SupportCondition> conditions,
                          std::span<const double> weights, const Vector& init,
                          const SolverSettings& settings, const std::string& context = {});

/// Runs the full generation loop. Deterministic given spec (seed included).
ProcessCurveDataset generate(const DatasetSpec& spec);

enum class Preset { Dataset1, Dataset2, Dataset3 };

Preset parse_preset(const std::string& name);
std::string preset_name(Preset p);

/// Benchmark dataset specs; `scale` in (0, 1] multiplies T.
DatasetSpec preset(Preset which, double scale, std::uint64_t seed);
DatasetSpec preset(const std::string& name, double scale, std::uint64_t seed);

}  // namespace driftlab
