#pragma once

#include <Eigen/Dense>

namespace ca {

using Vec = Eigen::VectorXd;

// Dense matrices are row-major throughout: the on-disk matrix format is
// row-major and sensing operators are generated row by row.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

} // namespace ca
