#pragma once

#include "wht/common.hpp"

namespace wht {

inline constexpr int permanent_max_size = 14;

// Ryser's formula with Gray-code row-sum updates; n <= permanent_max_size.
double permanent(const Eigen::MatrixXd& m);

} // namespace wht
