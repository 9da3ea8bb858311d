#include "wheq/reduction.hpp"

#include <cmath>

namespace wheq {

FirstOrderSystem build_system(const ProblemSpec& spec) {
  FirstOrderSystem sys;
  const int m = spec.m;
  sys.m = m;

  // w_coeffs[j] = A_{(m-j)}(t,xi): column k of the last row is
  // b_(k) = A_{(m-k+1)} <xi>^{k-m} = w_coeffs[k-1] <xi>^{k-m}.
  sys.w_coeffs = [spec](double t, const Vec& xi) { return principal_parts(spec, t, xi); };
  sys.g_coeffs = [spec](double t, const Vec& xi) { return lower_parts(spec, t, xi); };

  sys.A = [spec, m](double t, const Vec& xi) {
    const double br = bracket(xi);
    Vec w = principal_parts(spec, t, xi);
    Mat A = Mat::Zero(m, m);
    for (int i = 0; i + 1 < m; ++i) A(i, i + 1) = br;
    for (int k = 1; k <= m; ++k) A(m - 1, k - 1) = w(k - 1) * std::pow(br, k - m);
    return A;
  };
  sys.B = [spec, m](double t, const Vec& xi) {
    const double br = bracket(xi);
    Vec g = lower_parts(spec, t, xi);
    Mat B = Mat::Zero(m, m);
    for (int k = 1; k <= m; ++k) B(m - 1, k - 1) = g(k - 1) * std::pow(br, k - m);
    return B;
  };
  sys.Fhat = [spec, m](double t, const Vec& xi) {
    CVec F = CVec::Zero(m);
    if (!spec.source.zero && spec.source.eval) F(m - 1) = spec.source.eval(t, xi);
    return F;
  };
  sys.principal_row_max = [spec, m](double t, const Vec& xi) {
    const double br = bracket(xi);
    Vec w = principal_parts(spec, t, xi);
    double mx = 0.0;
    for (int k = 1; k <= m; ++k)
      mx = std::max(mx, std::abs(w(k - 1)) * std::pow(br, k - m));
    return mx;
  };
  return sys;
}

CVec initial_vector(const InitialData& data, const Vec& xi) {
  const int m = static_cast<int>(data.ghat.size());
  const double br = bracket(xi);
  CVec v0(m);
  for (int k = 1; k <= m; ++k)
    v0(k - 1) = std::pow(br, m - k) * (data.ghat[k - 1] ? data.ghat[k - 1](xi) : Complex(0, 0));
  return v0;
}

Complex reconstruct_uhat(const CVec& V, double bracket_xi) {
  return V(0) * std::pow(bracket_xi, 1.0 - static_cast<double>(V.size()));
}

std::vector<Complex> reconstruct_uhat(const std::vector<CVec>& V_trajectory,
                                      double bracket_xi) {
  std::vector<Complex> out;
  out.reserve(V_trajectory.size());
  for (const auto& v : V_trajectory) out.push_back(reconstruct_uhat(v, bracket_xi));
  return out;
}

} // namespace wheq
