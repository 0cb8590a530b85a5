#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace driftlab {

/// Dense row-major matrix; row t holds everything about execution t.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// One real score per execution. Higher means "more likely drifting".
///
/// Entries are finite, except that negative infinity is allowed and means
/// "never flagged at any threshold" (used by the Never detector).
using ScoreSeries = std::vector<double>;

}  // namespace driftlab
