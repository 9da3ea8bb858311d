#pragma once

#include "wheq/types.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wheq {

// One time-dependent coefficient a_{m-j,gamma}(t). Real-valued by type;
// validation samples the evaluator for NaN/inf instead of trusting it.
struct CoefficientFunction {
  std::function<double(double)> eval;
  std::optional<double> declared_holder; // exponent in (0,1] if known
  std::string label;
};

// Multi-index gamma with graded-lexicographic ordering (total degree first).
struct MultiIndex {
  std::vector<int> k;

  int order() const {
    int s = 0;
    for (int v : k) s += v;
    return s;
  }
  bool operator==(const MultiIndex& o) const { return k == o.k; }
  bool operator<(const MultiIndex& o) const {
    int a = order(), b = o.order();
    if (a != b) return a < b;
    return k < o.k;
  }
};

// xi^gamma by repeated multiplication.
double monomial(const Vec& xi, const MultiIndex& gamma);

// Key (j, gamma) of one term a_{m-j,gamma}(t) D_x^gamma D_t^j.
struct MonomialKey {
  int j;
  MultiIndex gamma;
  bool operator<(const MonomialKey& o) const {
    if (j != o.j) return j < o.j;
    return gamma < o.gamma;
  }
};

// Source enters only through its partial Fourier transform Fhat(t,xi);
// there is no spatial-domain representation anywhere in the artifact.
struct SourceTransform {
  std::function<Complex(double, const Vec&)> eval;
  bool zero = true;
  // declared Gevrey decay |Fhat| <= C e^{-delta1 <xi>^{1/s_f}}
  double C = 0.0;
  double delta1 = std::numeric_limits<double>::infinity();
  double s_f = 1.0;

  static SourceTransform none() { return SourceTransform{}; }
};

struct ProblemSpec {
  int m = 2;      // operator order, >= 2
  int l = 0;      // degree of lower order terms, 0 <= l <= m-1
  int n = 1;      // space dimension
  double T = 1.0; // time horizon
  std::map<MonomialKey, CoefficientFunction> principal; // |gamma| = m-j
  std::map<MonomialKey, CoefficientFunction> lower;     // |gamma|+j <= l
  SourceTransform source = SourceTransform::none();
};

// A_{(m-j)}(t,xi) for j = 0..m-1 (principal parts, entry [j]).
Vec principal_parts(const ProblemSpec& spec, double t, const Vec& xi);

// (A_{m-j} - A_{(m-j)})(t,xi) for j = 0..m-1 (lower order parts, entry [j]).
Vec lower_parts(const ProblemSpec& spec, double t, const Vec& xi);

// tau^m - sum_j A_{(m-j)}(t,xi) tau^j. Monic of degree m in tau.
double principal_symbol(const ProblemSpec& spec, double t, const Vec& xi, double tau);

// g(tau) = sum_j (A_{m-j} - A_{(m-j)})(t,xi) tau^j.
double lower_symbol(const ProblemSpec& spec, double t, const Vec& xi, double tau);

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Checks key homogeneity, order bounds and evaluator sanity on a time grid.
// Violations are reported, never thrown.
ValidationReport validate_spec(const ProblemSpec& spec);

} // namespace wheq
