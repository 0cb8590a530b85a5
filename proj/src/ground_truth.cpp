#include "driftlab/ground_truth.hpp"

#include "driftlab/error.hpp"

#include <algorithm>
#include <string>

namespace driftlab {

std::vector<Interval> decompose_segments(const std::set<std::int64_t>& indices) {
  std::vector<Interval> out;
  for (std::int64_t t : indices) {
    if (!out.empty() && out.back().hi + 1 == t) {
      out.back().hi = t;
    } else {
      out.push_back({t, t});
    }
  }
  return out;
}

std::vector<Interval> decompose_mask(const std::vector<bool>& mask) {
  std::vector<Interval> out;
  const auto n = static_cast<std::int64_t>(mask.size());
  for (std::int64_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    if (!out.empty() && out.back().hi == i) {  // previous run ended at 1-based i
      out.back().hi = i + 1;
    } else {
      out.push_back({i + 1, i + 1});
    }
  }
  return out;
}

GroundTruth::GroundTruth(std::int64_t T, std::vector<Interval> segments) : T_(T) {
  if (T < 1) throw InputError("ground truth needs T >= 1");
  for (const auto& s : segments) {
    if (s.lo > s.hi || s.lo < 1 || s.hi > T) {
      throw InputError("segment [" + std::to_string(s.lo) + ", " + std::to_string(s.hi) +
                       "] is not a valid interval within [1, " + std::to_string(T) + "]");
    }
  }
  std::sort(segments.begin(), segments.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (const auto& s : segments) {
    if (!segments_.empty() && s.lo <= segments_.back().hi + 1) {
      segments_.back().hi = std::max(segments_.back().hi, s.hi);
    } else {
      segments_.push_back(s);
    }
  }
}

std::int64_t GroundTruth::positives() const noexcept {
  std::int64_t p = 0;
  for (const auto& s : segments_) p += s.length();
  return p;
}

double GroundTruth::drift_fraction() const noexcept {
  return T_ > 0 ? static_cast<double>(positives()) / static_cast<double>(T_) : 0.0;
}

bool GroundTruth::contains(std::int64_t t) const noexcept {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](std::int64_t v, const Interval& s) { return v < s.lo; });
  return it != segments_.begin() && std::prev(it)->contains(t);
}

std::vector<bool> GroundTruth::mask() const {
  std::vector<bool> m(static_cast<std::size_t>(T_), false);
  for (const auto& s : segments_) {
    for (std::int64_t t = s.lo; t <= s.hi; ++t) m[static_cast<std::size_t>(t - 1)] = true;
  }
  return m;
}

void GroundTruth::require_nondegenerate() const {
  if (segments_.empty()) {
    throw DegenerateGroundTruthError(
        "ground truth has no drift segments; overlap scores and TPR are undefined");
  }
  if (positives() == T_) {
    throw DegenerateGroundTruthError(
        "ground truth marks every execution as drifting; FPR is undefined");
  }
}

}  // namespace driftlab
