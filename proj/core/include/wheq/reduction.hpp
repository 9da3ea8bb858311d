#pragma once

#include "wheq/problem.hpp"
#include "wheq/types.hpp"

#include <functional>
#include <vector>

namespace wheq {

// The Fourier side of the first-order reduction u_k = D_t^{k-1} <D_x>^{m-k} u:
//   D_t V = A(t,xi) V + B(t,xi) V + Fhat(t,xi).
// A carries <xi> on the superdiagonal and b_(j) = A_{(m-j+1)} <xi>^{j-m} in
// the last row; B is zero except the last row of lower-order remainders.
struct FirstOrderSystem {
  int m = 0;
  std::function<Mat(double, const Vec&)> A;
  std::function<Mat(double, const Vec&)> B;
  std::function<CVec(double, const Vec&)> Fhat;
  // tau-polynomial coefficients of the principal symbol: w(tau) = sum w[j] tau^j
  std::function<Vec(double, const Vec&)> w_coeffs;
  // g(tau) = sum g[j] tau^j, the lower-order symbol remainder
  std::function<Vec(double, const Vec&)> g_coeffs;
  // |b_(j)| row maximum, used by the step-control stability assertion
  std::function<double(double, const Vec&)> principal_row_max;
};

FirstOrderSystem build_system(const ProblemSpec& spec);

struct InitialData {
  std::vector<std::function<Complex(const Vec&)>> ghat; // one per k = 1..m
  double declared_order = 1.0;                          // s_g
  double declared_rate = 0.0;                           // delta_g
  bool growth = false; // ultradistribution-type data (growth characterization)
};

// V0 entries <xi>^{m-k} ghat_k(xi).
CVec initial_vector(const InitialData& data, const Vec& xi);

// uhat(t,xi) = V_1(t,xi) <xi>^{1-m}.
Complex reconstruct_uhat(const CVec& V, double bracket_xi);
std::vector<Complex> reconstruct_uhat(const std::vector<CVec>& V_trajectory,
                                      double bracket_xi);

} // namespace wheq
