#include "driftlab/kmeans.hpp"

#include "driftlab/error.hpp"
#include "driftlab/rng.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace driftlab {
namespace {

// Index of nearest center and squared distance to it.
std::pair<int, double> nearest(const Matrix& centers, Eigen::Index rows,
                               const Eigen::Ref<const Eigen::RowVectorXd>& p) {
  int best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < rows; ++c) {
    const double d2 = (centers.row(c) - p).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<int>(c);
    }
  }
  return {best, best_d2};
}

}  // namespace

KMeansResult kmeans_fit(const Matrix& points, int n_clusters, std::uint64_t seed, int max_iters) {
  const Eigen::Index n = points.rows();
  if (n_clusters < 1) throw ConfigError("number of clusters must be at least 1");
  if (n_clusters > n) {
    throw ConfigError("number of clusters (" + std::to_string(n_clusters) +
                      ") exceeds the number of points " + std::to_string(n));
  }
  Rng rng = make_rng(seed, streams::kKMeans);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  KMeansResult out;
  out.centers.resize(n_clusters, points.cols());
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);

  // k-means++ seeding: each next center drawn with probability ~ D(x)^2.
  auto first = static_cast<Eigen::Index>(std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng));
  out.centers.row(0) = points.row(first);
  chosen[static_cast<std::size_t>(first)] = true;
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = (points.row(i) - points.row(first)).squaredNorm();

  for (int c = 1; c < n_clusters; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!chosen[static_cast<std::size_t>(i)]) total += d2[static_cast<std::size_t>(i)];
    }
    Eigen::Index pick = -1;
    if (total > 0.0) {
      double target = unit(rng) * total;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (chosen[static_cast<std::size_t>(i)]) continue;
        pick = i;
        target -= d2[static_cast<std::size_t>(i)];
        if (target < 0.0 && d2[static_cast<std::size_t>(i)] > 0.0) break;
      }
    } else {
      // Every remaining point coincides with a center: take any unchosen one.
      std::vector<Eigen::Index> rest;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!chosen[static_cast<std::size_t>(i)]) rest.push_back(i);
      }
      pick = rest[std::uniform_int_distribution<std::size_t>(0, rest.size() - 1)(rng)];
    }
    out.centers.row(c) = points.row(pick);
    chosen[static_cast<std::size_t>(pick)] = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      d2[static_cast<std::size_t>(i)] =
          std::min(d2[static_cast<std::size_t>(i)], (points.row(i) - points.row(pick)).squaredNorm());
    }
  }

  out.assignment.assign(static_cast<std::size_t>(n), -1);
  for (out.iterations = 0; out.iterations < max_iters; ++out.iterations) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int a = nearest(out.centers, n_clusters, points.row(i)).first;
      if (a != out.assignment[static_cast<std::size_t>(i)]) {
        out.assignment[static_cast<std::size_t>(i)] = a;
        changed = true;
      }
    }
    if (!changed) break;
    Matrix sums = Matrix::Zero(n_clusters, points.cols());
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(n_clusters), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int a = out.assignment[static_cast<std::size_t>(i)];
      sums.row(a) += points.row(i);
      ++counts[static_cast<std::size_t>(a)];
    }
    for (int c = 0; c < n_clusters; ++c) {
      // Empty clusters keep their previous center.
      if (counts[static_cast<std::size_t>(c)] > 0) {
        out.centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      }
    }
  }
  return out;
}

std::vector<double> kmeans_score(const Matrix& points, const Matrix& centers) {
  if (centers.rows() < 1) throw ConfigError("k-means scoring needs at least one center");
  if (centers.cols() != points.cols()) throw DimensionError("centers and points differ in dimension");
  std::vector<double> out(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = std::sqrt(nearest(centers, centers.rows(), points.row(i)).second);
  }
  return out;
}

}  // namespace driftlab
