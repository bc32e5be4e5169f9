#pragma once

#include <Eigen/Core>

namespace fogforge::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace fogforge::nn
