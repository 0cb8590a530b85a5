#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <vector>

namespace driftlab {

/// Closed 1-based integer interval [lo, hi].
struct Interval {
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  std::int64_t length() const noexcept { return hi - lo + 1; }
  bool contains(std::int64_t t) const noexcept { return lo <= t && t <= hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Maximal runs of consecutive integers in `indices`, sorted.
std::vector<Interval> decompose_segments(const std::set<std::int64_t>& indices);

/// Maximal runs of `true` in a 0-based mask, reported 1-based.
std::vector<Interval> decompose_mask(const std::vector<bool>& mask);

/// Drift ground truth over executions 1..T.
///
/// Segments are sorted, disjoint and non-adjacent: overlapping or touching
/// inputs are merged on construction.
class GroundTruth {
 public:
  GroundTruth() = default;
  GroundTruth(std::int64_t T, std::vector<Interval> segments);

  std::int64_t T() const noexcept { return T_; }
  const std::vector<Interval>& segments() const noexcept { return segments_; }
  std::size_t k() const noexcept { return segments_.size(); }

  /// |D|, number of drifting executions.
  std::int64_t positives() const noexcept;
  /// |D| / T.
  double drift_fraction() const noexcept;
  bool contains(std::int64_t t) const noexcept;
  /// 0-based membership mask of length T.
  std::vector<bool> mask() const;

  /// Throws DegenerateGroundTruthError unless both classes are present.
  void require_nondegenerate() const;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;

 private:
  std::int64_t T_ = 0;
  std::vector<Interval> segments_;
};

}  // namespace driftlab
