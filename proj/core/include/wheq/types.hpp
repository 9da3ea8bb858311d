#pragma once

#include <Eigen/Dense>
#include <complex>

namespace wheq {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

// Japanese bracket <xi> = (1+|xi|^2)^{1/2}.
inline double bracket(const Vec& xi) { return std::sqrt(1.0 + xi.squaredNorm()); }
inline double bracket_of_norm(double r) { return std::sqrt(1.0 + r * r); }

} // namespace wheq
