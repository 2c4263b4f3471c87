#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace nls {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

inline constexpr cplx I{0.0, 1.0};

}  // namespace nls
