#pragma once

#include <Eigen/Dense>

namespace rsm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace rsm
