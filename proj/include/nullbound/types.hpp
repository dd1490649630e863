#pragma once

#include <Eigen/Dense>

namespace nullbound {

/// Coordinates are named x0..x9, so no chart has more than ten axes.
inline constexpr int kMaxDimension = 10;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Point = Eigen::VectorXd;

}  // namespace nullbound
