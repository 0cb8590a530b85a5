#pragma once

#include "driftlab/types.hpp"

#include <span>
#include <vector>

namespace driftlab {

/// Trailing rolling mean over `window` rows.
///
/// Row t (0-based) holds the mean of rows t-window+1..t. The first window-1
/// rows are warm-up and set to zero; `first_valid_row(window)` names the first
/// defined one.
Matrix rolling_mean(const Matrix& values, int window);
inline int first_valid_row(int window) { return window - 1; }

/// Trailing rolling sample standard deviation (divisor window-1).
/// Warm-up entries are zero.
std::vector<double> rolling_std(std::span<const double> values, int window);

struct KsResult {
  double statistic = 0.0;  // sup |ECDF_a - ECDF_b|
  double p_value = 1.0;
};

/// Kolmogorov survival function Q(lambda) = 2 sum_{j>=1} (-1)^(j-1) exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda);

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// (Stephens' small-sample correction), clamped to [1e-16, 1].
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Sliding KS score log(1 + 1/p_t) between a reference window of `ref` values
/// and an observation window of `obs` values, separated by `gap` values.
/// Positions without a full pair of windows score zero.
std::vector<double> kswin_score(std::span<const double> values, int ref, int obs, int gap);

/// Biased (V-statistic) squared MMD with RBF kernel exp(-|u-v|^2 / (2 h^2)),
/// floored at zero. Rows are samples.
double mmd(const Matrix& X, const Matrix& Y, double bandwidth);

/// Median of pairwise Euclidean distances among the rows of X and Y together;
/// 1.0 if that median is zero.
double median_bandwidth(const Matrix& X, const Matrix& Y);

/// Sliding MMD score between windows laid out as in kswin_score, using the
/// median heuristic per window pair.
std::vector<double> mmd_window_score(const Matrix& values, int ref, int obs, int gap);

}  // namespace driftlab
