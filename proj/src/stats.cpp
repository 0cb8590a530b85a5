#include "driftlab/stats.hpp"

#include "driftlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace driftlab {
namespace {

void check_window(int window, std::int64_t T, const char* what) {
  if (window < 1) throw ConfigError(std::string(what) + " must be positive");
  if (window > T) {
    throw ConfigError(std::string(what) + " (" + std::to_string(window) +
                      ") exceeds the series length " + std::to_string(T));
  }
}

void check_windows(int ref, int obs, int gap, std::int64_t T) {
  if (ref < 2 || obs < 2) throw ConfigError("KS/MMD windows need at least 2 values");
  if (gap < 0) throw ConfigError("window offset must be non-negative");
  if (static_cast<std::int64_t>(ref) + gap + obs > T) {
    throw ConfigError("reference + offset + observation windows (" +
                      std::to_string(ref + gap + obs) + ") exceed the series length " +
                      std::to_string(T));
  }
}

}  // namespace

Matrix rolling_mean(const Matrix& values, int window) {
  check_window(window, values.rows(), "rolling window");
  const Eigen::Index T = values.rows();
  Matrix out = Matrix::Zero(T, values.cols());
  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(values.cols());
  for (Eigen::Index t = 0; t < T; ++t) {
    if (t >= window && t % 1024 == 0) {
      // Periodic exact resum bounds the error of the running update.
      sum = values.middleRows(t - window + 1, window).colwise().sum();
    } else {
      sum += values.row(t);
      if (t >= window) sum -= values.row(t - window);
    }
    if (t >= window - 1) out.row(t) = sum / static_cast<double>(window);
  }
  return out;
}

std::vector<double> rolling_std(std::span<const double> values, int window) {
  if (window < 2) throw ConfigError("rolling std window must be at least 2");
  check_window(window, static_cast<std::int64_t>(values.size()), "rolling std window");
  std::vector<double> out(values.size(), 0.0);
  const auto n = static_cast<double>(window);
  for (std::size_t t = static_cast<std::size_t>(window) - 1; t < values.size(); ++t) {
    // Welford over the window keeps the result accurate for large offsets.
    double mean = 0.0;
    double m2 = 0.0;
    double count = 0.0;
    for (std::size_t i = t + 1 - static_cast<std::size_t>(window); i <= t; ++i) {
      count += 1.0;
      const double delta = values[i] - mean;
      mean += delta / count;
      m2 += delta * (values[i] - mean);
    }
    out[t] = std::sqrt(std::max(m2, 0.0) / (n - 1.0));
  }
  return out;
}

double kolmogorov_q(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  constexpr double pi = std::numbers::pi;
  if (lambda < 1.18) {
    // Q = 1 - sqrt(2 pi)/lambda * sum_{j>=1} exp(-(2j-1)^2 pi^2 / (8 lambda^2))
    const double c = -pi * pi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int j = 1; j < 100; ++j) {
      const double term = std::exp(c * (2.0 * j - 1.0) * (2.0 * j - 1.0));
      sum += term;
      if (term < 1e-16 * sum) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * pi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j < 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    if (term < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw ConfigError("KS test needs at least 2 values per sample");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());

  // Walk both sorted samples; compare ECDFs only after consuming every tie.
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double n_eff = na * nb / (na + nb);
  const double root = std::sqrt(n_eff);
  const double p = kolmogorov_q((root + 0.12 + 0.11 / root) * d);
  return {d, std::clamp(p, 1e-16, 1.0)};
}

std::vector<double> kswin_score(std::span<const double> values, int ref, int obs, int gap) {
  const auto T = static_cast<std::int64_t>(values.size());
  check_windows(ref, obs, gap, T);
  std::vector<double> out(values.size(), 0.0);
  const std::size_t span_len = static_cast<std::size_t>(ref + gap + obs);
  for (std::size_t end = span_len; end <= values.size(); ++end) {
    const std::size_t start = end - span_len;
    const auto r = values.subspan(start, static_cast<std::size_t>(ref));
    const auto o = values.subspan(end - static_cast<std::size_t>(obs), static_cast<std::size_t>(obs));
    out[end - 1] = std::log1p(1.0 / ks_two_sample(r, o).p_value);
  }
  return out;
}

double mmd(const Matrix& X, const Matrix& Y, double bandwidth) {
  if (X.rows() < 1 || Y.rows() < 1) throw ConfigError("MMD needs non-empty samples");
  if (X.cols() != Y.cols()) throw DimensionError("MMD samples differ in dimension");
  if (!(bandwidth > 0.0)) throw ConfigError("MMD bandwidth must be positive");
  const double gamma = 1.0 / (2.0 * bandwidth * bandwidth);
  auto mean_kernel = [gamma](const Matrix& A, const Matrix& B) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      for (Eigen::Index j = 0; j < B.rows(); ++j) {
        sum += std::exp(-gamma * (A.row(i) - B.row(j)).squaredNorm());
      }
    }
    return sum / static_cast<double>(A.rows() * B.rows());
  };
  const double v = mean_kernel(X, X) - 2.0 * mean_kernel(X, Y) + mean_kernel(Y, Y);
  return std::max(v, 0.0);
}

double median_bandwidth(const Matrix& X, const Matrix& Y) {
  Matrix Z(X.rows() + Y.rows(), X.cols());
  Z << X, Y;
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(Z.rows() * (Z.rows() - 1) / 2));
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < Z.rows(); ++j) dist.push_back((Z.row(i) - Z.row(j)).norm());
  }
  if (dist.empty()) return 1.0;
  const auto mid = dist.begin() + static_cast<std::ptrdiff_t>(dist.size() / 2);
  std::nth_element(dist.begin(), mid, dist.end());
  double med = *mid;
  if (dist.size() % 2 == 0) med = 0.5 * (med + *std::max_element(dist.begin(), mid));
  return med > 0.0 ? med : 1.0;
}

std::vector<double> mmd_window_score(const Matrix& values, int ref, int obs, int gap) {
  check_windows(ref, obs, gap, values.rows());
  std::vector<double> out(static_cast<std::size_t>(values.rows()), 0.0);
  const Eigen::Index span_len = ref + gap + obs;
  for (Eigen::Index end = span_len; end <= values.rows(); ++end) {
    const Matrix r = values.middleRows(end - span_len, ref);
    const Matrix o = values.middleRows(end - obs, obs);
    out[static_cast<std::size_t>(end - 1)] = mmd(r, o, median_bandwidth(r, o));
  }
  return out;
}

}  // namespace driftlab
