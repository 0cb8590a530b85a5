#include "driftlab/error.hpp"
#include "driftlab/generator.hpp"

#include <algorithm>
#include <cmath>

// Benchmark dataset presets.
//
// Each preset fixes a function family, T, samples per curve, the number of
// drift segments and their share of T. Support positions, targets, drift
// magnitudes and jitter are chosen here.

namespace driftlab {
namespace {

using Coord = SupportSchedule::Coordinate;

struct Segment {
  std::int64_t t0;
  std::int64_t t1;
};

// Segment starting at start_frac * T covering len_frac * T executions (at least 2).
Segment segment_at(std::int64_t T, double start_frac, double len_frac) {
  const auto len = std::max<std::int64_t>(2, std::llround(len_frac * static_cast<double>(T)));
  const auto t0 = std::max<std::int64_t>(1, std::llround(start_frac * static_cast<double>(T)));
  return {t0, std::min(T, t0 + len - 1)};
}

SupportSchedule fixed(int order, double x, double y) {
  return {{order, x, y}, Coord::None, {}, 0.0};
}

SupportSchedule jittered(int order, double x, double y, double sigma) {
  return {{order, x, y}, Coord::Y, {}, sigma};
}

SupportSchedule moving_x(int order, double x, double y, Segment s, double x_to) {
  return {{order, x, y}, Coord::X, {{s.t0, s.t1, x, x_to}}, 0.0};
}

SupportSchedule moving_y(int order, double x, double y, Segment s, double y_to, double sigma) {
  return {{order, x, y}, Coord::Y, {{s.t0, s.t1, y, y_to}}, sigma};
}

std::int64_t scaled(double scale, std::int64_t full) {
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(scale * static_cast<double>(full) - 1e-9)));
}

// Global minimum of w0 x sin(pi x - w1) + w2 x at w = (1, 0, 0.5), moved right by 0.1.
DatasetSpec dataset1(double scale, std::uint64_t seed) {
  DatasetSpec spec;
  spec.family = FunctionFamily::sine_product();
  spec.T = scaled(scale, 10000);
  spec.grid = {0.0, 0.04, 100};
  spec.seed = seed;

  constexpr double x_min = 3.5143906287203097;
  constexpr double y_min = -1.7536043975298792;
  const Segment s = segment_at(spec.T, 0.6, 0.01);
  spec.schedules = {
      moving_x(1, x_min, 0.0, s, x_min + 0.1),
      moving_x(0, x_min, y_min, s, x_min + 0.1),
      jittered(0, 2.0, 1.0, 0.02),
  };
  return spec;
}

// Staking-like force curve on [0, 4]: rises from 0, peaks near x = 2.5, decays.
std::vector<SupportSchedule> staking_base(double peak_x, double peak_y, double start_slope) {
  return {
      fixed(0, 0.0, 0.0),
      jittered(1, 0.0, start_slope, 0.1),
      jittered(0, 1.0, 3.0, 0.05),
      fixed(0, peak_x, peak_y),
      fixed(1, peak_x, 0.0),
      fixed(2, peak_x, -8.0),
      jittered(0, 4.0, 6.0, 0.05),
      fixed(1, 3.5, -3.0),
  };
}

DatasetSpec dataset2(double scale, std::uint64_t seed) {
  DatasetSpec spec;
  spec.family = FunctionFamily::polynomial(7);
  spec.T = scaled(scale, 10000);
  spec.grid = {0.0, 0.04, 100};
  spec.seed = seed;

  const Segment peak = segment_at(spec.T, 0.3, 0.01);
  const Segment slope = segment_at(spec.T, 0.7, 0.01);
  spec.schedules = staking_base(2.5, 10.0, 6.0);
  // Peak position moves (value and first-order condition jointly).
  spec.schedules[3] = moving_x(0, 2.5, 10.0, peak, 2.7);
  spec.schedules[4] = moving_x(1, 2.5, 0.0, peak, 2.7);
  // Only first-order information changes.
  spec.schedules[1] = moving_y(1, 0.0, 6.0, slope, 9.0, 0.1);
  return spec;
}

DatasetSpec dataset3(double scale, std::uint64_t seed) {
  DatasetSpec spec;
  spec.family = FunctionFamily::polynomial(7);
  spec.T = scaled(scale, 30000);
  spec.grid = {0.0, 0.01, 400};
  spec.seed = seed;

  const double seg_len = 0.001 / 3.0;
  const Segment peak = segment_at(spec.T, 0.25, seg_len);
  const Segment curvature = segment_at(spec.T, 0.5, seg_len);
  const Segment slope = segment_at(spec.T, 0.75, seg_len);
  spec.schedules = staking_base(2.5, 10.0, 6.0);
  spec.schedules[3] = moving_x(0, 2.5, 10.0, peak, 2.6);
  spec.schedules[4] = moving_x(1, 2.5, 0.0, peak, 2.6);
  spec.schedules[5] = moving_y(2, 2.5, -8.0, curvature, -10.0, 0.0);
  spec.schedules[1] = moving_y(1, 0.0, 6.0, slope, 8.0, 0.1);
  return spec;
}

}  // namespace

Preset parse_preset(const std::string& name) {
  if (name == "dataset-1") return Preset::Dataset1;
  if (name == "dataset-2") return Preset::Dataset2;
  if (name == "dataset-3") return Preset::Dataset3;
  throw ConfigError("unknown preset '" + name + "' (expected dataset-1, dataset-2 or dataset-3)");
}

std::string preset_name(Preset p) {
  switch (p) {
    case Preset::Dataset1: return "dataset-1";
    case Preset::Dataset2: return "dataset-2";
    case Preset::Dataset3: return "dataset-3";
  }
  return "unknown";
}

DatasetSpec preset(Preset which, double scale, std::uint64_t seed) {
  if (!(scale > 0.0 && scale <= 1.0)) throw ConfigError("preset scale must lie in (0, 1]");
  switch (which) {
    case Preset::Dataset1: return dataset1(scale, seed);
    case Preset::Dataset2: return dataset2(scale, seed);
    case Preset::Dataset3: return dataset3(scale, seed);
  }
  throw ConfigError("unknown preset");
}

DatasetSpec preset(const std::string& name, double scale, std::uint64_t seed) {
  return preset(parse_preset(name), scale, seed);
}

}  // namespace driftlab
