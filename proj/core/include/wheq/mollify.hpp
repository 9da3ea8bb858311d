#pragma once

#include "wheq/quadrature.hpp"
#include "wheq/roots.hpp"
#include "wheq/types.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace wheq {

struct HorizonTooShort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Nonnegative smooth profile supported in [-1,1], normalized so that the
// quadrature rule used by the convolutions integrates it to exactly 1.
struct MollifierSpec {
  std::function<double(double)> profile;
  std::function<double(double)> profile_deriv;
  int quadrature_nodes = 64;
  double raw_mass = 1.0; // profile mass under the N-node rule, divides it out

  // exp(-1/(1-x^2)) on (-1,1), zero outside.
  static MollifierSpec standard_bump(int nodes = 64);

  // true integral of the normalized profile, on a rule with 4N nodes
  double normalized_mass_check() const;
};

// Strictly separated regularized roots lambda_j(t,xi). Slots use the paper's
// index convention: the coinciding block occupies slots 0..r-1 (sorted within),
// the separated block slots r..m-1 (sorted within). `permutation` maps a slot
// to its sorted-root index, so lambda pairs with tau slotwise.
struct MollifiedRoots {
  RootField field;
  MollifierSpec phi;
  CaseId case_id = CaseId::Case1;
  int m = 0;
  int r = 0;
  double alpha = 1.0, beta = 1.0;
  std::vector<int> permutation;
  std::function<double(double)> eps_rule;   // bracket -> eps
  std::function<double(double)> delta_rule; // bracket -> delta (Cases 2, 3)
  double eps = 0.0, delta = 0.0;            // representative values (reported)
  double horizon = 1.0;                     // original T
  double t_end = 1.0;                       // T' < T, the usable horizon

  double eps_at(double br) const { return eps_rule(br); }
  double delta_at(double br) const { return delta_rule ? delta_rule(br) : eps_rule(br); }

  Vec lambda(double t, const Vec& xi) const;
  Vec lambda_dt(double t, const Vec& xi) const; // phi' convolution route
  void lambda_both(double t, const Vec& xi, Vec& lam, Vec& lam_dt) const;
  // characteristic roots permuted into slot order
  Vec tau_slots(double t, const Vec& xi) const;
};

// lambda_j = (tau_j * phi_eps)(t) + j eps^alpha <xi>, fixed eps. T' = T - eps.
MollifiedRoots regularize_case1(const RootField& field, const MollifierSpec& phi,
                                double eps, double alpha, double T);

// Coinciding block (given by sorted indices lower_block) at scale eps with the
// separating shift; remaining roots mollified at scale delta with no shift.
MollifiedRoots regularize_case2(const RootField& field, const MollifierSpec& phi,
                                double eps, double delta, double alpha, double beta,
                                const std::vector<int>& lower_block, double T);

// Scale rules eps = <xi>^-gamma, delta = <xi>^-1, dispatched on the
// classification (Case 3 runs the Case-2 construction with r = 1). min_bracket
// is the smallest <xi> the instance will be evaluated at; it fixes T'.
MollifiedRoots regularize_for_sweep(const RootField& field, const CaseClassification& cls,
                                    const MollifierSpec& phi, double gamma, double T,
                                    double min_bracket);

// Smallest <xi> satisfying both radius conditions of the Case-2 separation
// proof, for eps = <xi>^-gamma and delta = <xi>^-1; +inf when never satisfied.
double case2_xi_threshold(double c0_rel, double c_holder, double alpha, double beta,
                          double gamma, int r);

struct PropertyCheck {
  std::string name;
  double constant = 0.0;
  bool pass = false;
  std::string note;
};

struct RegularizationReport {
  std::vector<PropertyCheck> checks;
  double xi_threshold = 1.0; // Case 2: <xi> above which (vi),(vii) are claimed
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// Measures the constants of every stated regularization property on the probe
// grid and marks pass/fail. Construction-exact inequalities are required to
// hold up to 1e-12 <xi>; the rest must be finite with the stated rates.
RegularizationReport verify_regularization(const MollifiedRoots& mr, const RootField& field,
                                           const CaseClassification& cls,
                                           const ProbeGrid& probes);

} // namespace wheq
