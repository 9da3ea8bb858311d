#pragma once

#include "wheq/problem.hpp"
#include "wheq/types.hpp"

#include <stdexcept>
#include <vector>

namespace wheq {

struct HyperbolicityViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateData : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ClassificationAmbiguous : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sorted real characteristic roots tau_1 <= ... <= tau_m of a problem, or of
// any synthetic field in tests. Sampling is pure and thread-safe.
struct RootField {
  std::function<Vec(double, const Vec&)> sample;
  int m = 0;
  double hyperbolicity_tolerance = 1e-8; // max |Im| relative to <xi>
};

// Eigenvalues of the companion matrix of the monic principal polynomial,
// projected to real parts and sorted. Throws HyperbolicityViolation when an
// imaginary part exceeds tolerance * <xi>. For xi = 0 all roots are 0.
Vec characteristic_roots(const ProblemSpec& spec, double t, const Vec& xi,
                         double tolerance = 1e-8);

RootField make_root_field(const ProblemSpec& spec, double tolerance = 1e-8);

// Dyadic scales h with anchor points t; |t-s| = h spans the requested decades.
struct DyadicPairs {
  std::vector<double> scales;   // decreasing, in (0, T)
  std::vector<double> anchors;  // base points in [0, T]
  double horizon = 1.0;

  // |t-s| in [1e-6, 1e-1]*T over dyadic steps, 33 anchors.
  static DyadicPairs standard(double T);
  double decades() const;
};

struct HolderEstimate {
  double exponent = 1.0; // clipped to (0, 1]
  double constant = 0.0; // c in |tau(t)-tau(s)| <= c |xi| |t-s|^alpha
  bool degenerate = false;
};

// Least-squares slope of log sup_k |tau_k(t)-tau_k(s)| against log|t-s|.
// The sup over anchors is refined around the running argmax so that isolated
// kinks stay resolved as the scale shrinks.
HolderEstimate estimate_holder(const RootField& field, const std::vector<int>& k_range,
                               const DyadicPairs& grid, const Vec& xi_probe);

enum class CaseId { Case1, Case2, Case3 };

const char* case_name(CaseId id);

struct ProbeGrid {
  std::vector<double> times;
  std::vector<Vec> xis; // |xi| >= 1 each

  static ProbeGrid standard(double T, int n_dim);
};

struct CaseClassification {
  CaseId case_id = CaseId::Case1;
  int r = 0;          // size of the possibly-coinciding block (m in Case 1, 1 in Case 3)
  double alpha = 1.0; // Hoelder exponent of the coinciding block
  double beta = 1.0;  // Hoelder exponent of the separated block (= alpha in Cases 1, 3)
  double c_gap = 0.0; // measured strict-gap constant, relative to |xi|
  double c_comp = 0.0;
  double holder_constant = 0.0;
  std::vector<int> lower_block; // sorted-root indices of the coinciding block
  std::vector<int> upper_block; // the remaining, uniformly separated indices
  // where the comparability quotient peaks (reported, not asserted uniform)
  double c_comp_argmax_t = 0.0;
  double c_comp_argmax_xi = 0.0;
};

// Partitions the sorted roots into a coinciding cluster and a uniformly
// separated rest, measured over the probe grid, and assigns Case 1/2/3.
// Throws ClassificationAmbiguous when gaps dip intermittently (a crossing
// between blocks, outside the hypotheses) or when several disjoint clusters
// coincide.
CaseClassification classify(const RootField& field, const ProblemSpec& spec,
                            const ProbeGrid& probes);

} // namespace wheq
