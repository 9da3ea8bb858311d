#pragma once

#include <vector>

namespace wheq {

// Gauss-Legendre rule on [-1,1]. Nodes ascending, weights positive and
// symmetric, sum of weights = 2.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n);
  int size() const { return static_cast<int>(nodes.size()); }

  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (int i = 0; i < size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
};

} // namespace wheq
