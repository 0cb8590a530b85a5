#pragma once

// Set-based reference implementations of the temporal metrics. They share no
// code with the library: every quantity is recomputed from explicit index sets.

#include "driftlab/ground_truth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace driftlab::naive {

using Segment = std::pair<long, long>;  // closed, 1-based

inline std::vector<Segment> runs(const std::set<long>& idx) {
  std::vector<Segment> out;
  for (long t : idx) {
    if (!out.empty() && out.back().second + 1 == t) {
      out.back().second = t;
    } else {
      out.push_back({t, t});
    }
  }
  return out;
}

inline std::set<long> flagged(const std::vector<double>& s, double tau) {
  std::set<long> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] >= tau) out.insert(static_cast<long>(i) + 1);
  }
  return out;
}

/// Overlap score per the segment-union definition; `soft` selects |T_i| as numerator.
inline double overlap(const std::vector<Segment>& truth, const std::set<long>& pred, bool soft) {
  const auto predicted = runs(pred);
  double total = 0.0;
  for (const auto& [l, h] : truth) {
    std::set<long> Ti;
    for (const auto& [a, b] : predicted) {
      if (b >= l && a <= h) {
        for (long t = a; t <= b; ++t) Ti.insert(t);
      }
    }
    if (Ti.empty()) continue;
    std::set<long> uni = Ti;
    for (long t = l; t <= h; ++t) uni.insert(t);
    long inter = 0;
    for (long t : Ti) inter += (t >= l && t <= h) ? 1 : 0;
    const double denom = static_cast<double>(*uni.rbegin() - *uni.begin() + 1);
    total += (soft ? static_cast<double>(Ti.size()) : static_cast<double>(inter)) / denom;
  }
  return total / static_cast<double>(truth.size());
}

inline std::set<long> truth_set(const std::vector<Segment>& truth) {
  std::set<long> out;
  for (const auto& [l, h] : truth) {
    for (long t = l; t <= h; ++t) out.insert(t);
  }
  return out;
}

inline double fpr(const std::vector<Segment>& truth, long T, const std::set<long>& pred) {
  const auto D = truth_set(truth);
  long fp = 0;
  for (long t : pred) fp += D.count(t) ? 0 : 1;
  return static_cast<double>(fp) / static_cast<double>(T - static_cast<long>(D.size()));
}

inline double tpr(const std::vector<Segment>& truth, const std::set<long>& pred) {
  const auto D = truth_set(truth);
  long tp = 0;
  for (long t : pred) tp += D.count(t);
  return static_cast<double>(tp) / static_cast<double>(D.size());
}

/// Mann-Whitney AUC: P(score_pos > score_neg) + 0.5 P(tie).
inline double auc_pairs(const std::vector<Segment>& truth, const std::vector<double>& s) {
  const auto D = truth_set(truth);
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t p = 0; p < s.size(); ++p) {
    if (!D.count(static_cast<long>(p) + 1)) continue;
    for (std::size_t n = 0; n < s.size(); ++n) {
      if (D.count(static_cast<long>(n) + 1)) continue;
      pairs += 1.0;
      wins += s[p] > s[n] ? 1.0 : (s[p] == s[n] ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

enum class Kind { Ols, Sols, Tpr };

/// Threshold curve: every distinct score plus one threshold above the maximum;
/// points with equal fpr collapse to their largest value.
inline std::vector<std::pair<double, double>> curve(const std::vector<Segment>& truth,
                                                    const std::vector<double>& s, Kind kind) {
  std::set<double> taus(s.begin(), s.end());
  taus.insert(*taus.rbegin() + 1.0);
  std::map<double, double> best;
  const long T = static_cast<long>(s.size());
  for (double tau : taus) {
    const auto pred = flagged(s, tau);
    const double x = fpr(truth, T, pred);
    const double y = kind == Kind::Tpr ? tpr(truth, pred) : overlap(truth, pred, kind == Kind::Sols);
    auto it = best.find(x);
    if (it == best.end() || y > it->second) best[x] = y;
  }
  return {best.begin(), best.end()};
}

inline double area(const std::vector<std::pair<double, double>>& pts, bool trapezoid) {
  double a = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double w = pts[i + 1].first - pts[i].first;
    a += w * (trapezoid ? 0.5 * (pts[i].second + pts[i + 1].second) : pts[i].second);
  }
  return a;
}

}  // namespace driftlab::naive

namespace driftlab::fixtures {

struct SmallInstance {
  GroundTruth gt;
  std::vector<naive::Segment> truth;
  std::vector<double> scores;
};

/// Random non-degenerate ground truth with T in [2, max_T] and scores drawn
/// from a small value set, so ties are common.
template <class Gen>
SmallInstance random_instance(Gen& rng, int max_T = 12) {
  std::uniform_int_distribution<int> uT(2, max_T);
  const int T = uT(rng);
  std::bernoulli_distribution coin(0.4);
  std::vector<bool> mask;
  do {
    mask.assign(static_cast<std::size_t>(T), false);
    for (int t = 0; t < T; ++t) mask[static_cast<std::size_t>(t)] = coin(rng);
  } while (std::all_of(mask.begin(), mask.end(), [](bool b) { return b; }) ||
           std::none_of(mask.begin(), mask.end(), [](bool b) { return b; }));
  SmallInstance inst;
  const auto segs = decompose_mask(mask);
  inst.gt = GroundTruth(T, segs);
  for (const auto& s : segs) inst.truth.push_back({static_cast<long>(s.lo), static_cast<long>(s.hi)});
  std::uniform_int_distribution<int> levels(1, 8);
  std::uniform_int_distribution<int> value(0, levels(rng));
  inst.scores.resize(static_cast<std::size_t>(T));
  for (auto& v : inst.scores) v = 0.25 * value(rng) - 0.5;
  return inst;
}

}  // namespace driftlab::fixtures
