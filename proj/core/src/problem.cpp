#include "wheq/problem.hpp"

#include <cmath>
#include <sstream>

namespace wheq {

double monomial(const Vec& xi, const MultiIndex& gamma) {
  double p = 1.0;
  for (std::size_t i = 0; i < gamma.k.size(); ++i)
    for (int c = 0; c < gamma.k[i]; ++c) p *= xi(static_cast<Eigen::Index>(i));
  return p;
}

Vec principal_parts(const ProblemSpec& spec, double t, const Vec& xi) {
  Vec out = Vec::Zero(spec.m);
  for (const auto& [key, coeff] : spec.principal)
    out(key.j) += coeff.eval(t) * monomial(xi, key.gamma);
  return out;
}

Vec lower_parts(const ProblemSpec& spec, double t, const Vec& xi) {
  Vec out = Vec::Zero(spec.m);
  for (const auto& [key, coeff] : spec.lower)
    out(key.j) += coeff.eval(t) * monomial(xi, key.gamma);
  return out;
}

namespace {

double horner(const Vec& coeffs, double tau) {
  // coeffs[j] multiplies tau^j
  double s = 0.0;
  for (int j = static_cast<int>(coeffs.size()) - 1; j >= 0; --j) s = s * tau + coeffs(j);
  return s;
}

} // namespace

double principal_symbol(const ProblemSpec& spec, double t, const Vec& xi, double tau) {
  double p = 1.0;
  for (int k = 0; k < spec.m; ++k) p *= tau;
  return p - horner(principal_parts(spec, t, xi), tau);
}

double lower_symbol(const ProblemSpec& spec, double t, const Vec& xi, double tau) {
  return horner(lower_parts(spec, t, xi), tau);
}

ValidationReport validate_spec(const ProblemSpec& spec) {
  ValidationReport rep;
  auto add = [&rep](const std::string& s) { rep.violations.push_back(s); };

  if (spec.m < 2) add("operator order must satisfy m >= 2");
  if (spec.n < 1) add("space dimension must satisfy n >= 1");
  if (spec.T <= 0) add("time horizon must be positive");
  if (spec.l < 0 || spec.l >= spec.m)
    add("lower order degree must satisfy 0 <= l <= m-1");

  for (const auto& [key, coeff] : spec.principal) {
    if (key.j < 0 || key.j >= spec.m) {
      add("principal key '" + coeff.label + "': j out of range [0, m-1]");
      continue;
    }
    if (static_cast<int>(key.gamma.k.size()) != spec.n)
      add("principal key '" + coeff.label + "': multi-index length != n");
    if (key.gamma.order() != spec.m - key.j)
      add("principal key '" + coeff.label + "': |gamma| must equal m-j");
  }
  for (const auto& [key, coeff] : spec.lower) {
    if (key.j < 0 || key.j >= spec.m) {
      add("lower key '" + coeff.label + "': j out of range [0, m-1]");
      continue;
    }
    if (static_cast<int>(key.gamma.k.size()) != spec.n)
      add("lower key '" + coeff.label + "': multi-index length != n");
    if (key.gamma.order() + key.j > spec.l)
      add("lower key '" + coeff.label + "': |gamma|+j must be <= l");
  }

  // Sample every evaluator on a grid that includes both endpoints.
  const int grid = 33;
  auto check_eval = [&](const std::map<MonomialKey, CoefficientFunction>& coeffs,
                        const char* kind) {
    for (const auto& [key, coeff] : coeffs) {
      (void)key;
      if (!coeff.eval) {
        add(std::string(kind) + " coefficient '" + coeff.label + "' has no evaluator");
        continue;
      }
      for (int i = 0; i < grid; ++i) {
        double t = spec.T * i / (grid - 1);
        double v = coeff.eval(t);
        if (!std::isfinite(v)) {
          std::ostringstream os;
          os << kind << " coefficient '" << coeff.label << "' is not finite at t=" << t;
          add(os.str());
          break;
        }
      }
    }
  };
  check_eval(spec.principal, "principal");
  check_eval(spec.lower, "lower");
  return rep;
}

} // namespace wheq
