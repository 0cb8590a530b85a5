#pragma once

#include "driftlab/types.hpp"

#include <cstdint>
#include <vector>

namespace driftlab {

struct KMeansResult {
  Matrix centers;               // n_c x d
  std::vector<int> assignment;  // nearest center per point
  int iterations = 0;
};

/// Lloyd iterations from k-means++ seeding, until the assignment stops
/// changing or `max_iters` rounds have run.
KMeansResult kmeans_fit(const Matrix& points, int n_clusters, std::uint64_t seed,
                        int max_iters = 100);

/// Euclidean distance from every point to its nearest center.
std::vector<double> kmeans_score(const Matrix& points, const Matrix& centers);

}  // namespace driftlab
