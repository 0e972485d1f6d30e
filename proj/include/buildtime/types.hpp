#pragma once

#include <Eigen/Core>

#include <cstddef>

namespace buildtime {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

} // namespace buildtime
