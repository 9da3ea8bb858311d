#pragma once

#include "wheq/types.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wheq {

struct FitDegenerate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class FitModel { Decay, Growth };

// Fitted law C e^{-delta <xi>^{1/s}} (decay) or C e^{+delta <xi>^{1/s}}
// (growth), optionally times <xi>^p when the polynomial term is enabled.
// residual is max |log(sample/model)|; upper_residual keeps only overshoots
// above the model, the side that matters for an upper-bound characterization.
struct DecayFit {
  FitModel model = FitModel::Decay;
  double C = 1.0;
  double delta = 0.0;
  double s = 1.0;
  double residual = 0.0;
  double upper_residual = 0.0;
  double poly_p = 0.0;
  bool with_poly = false;
  bool non_exponential = false; // residual above the misfit gate (0.5)
  int n_samples = 0;
  int n_dropped = 0; // zero magnitudes removed before fitting
  double range_lo = 0.0;
  double range_hi = 0.0;
};

// ghat(xi) = e^{-+delta <xi>^{1/s}} e^{i theta(xi)}, theta optional (default 0).
std::function<Complex(const Vec&)> synthesize(double s, double delta,
                                              FitModel kind = FitModel::Decay,
                                              std::function<double(const Vec&)> phase = {});

struct FitOptions {
  bool with_poly = false; // include a <xi>^p factor in the model
  double s_lo = 1.0;
  double s_hi = 10.0;
};

// Nonlinear least squares on log magnitude: golden-section on s with a linear
// subfit for (log C[, p], delta). samples are (<xi>, magnitude) pairs; needs
// >= 8 positive samples spanning >= 2 dyadic decades.
DecayFit fit_decay(const std::vector<std::pair<double, double>>& samples, FitModel model,
                   FitOptions opts = {});

// Growth fit at a fixed order (Beurling-style: the order is prescribed, only
// C and delta' adapt, one linear solve).
DecayFit fit_growth_at_order(const std::vector<std::pair<double, double>>& samples, double s);

enum class Verdict {
  GevreyPreserved,
  NotPreserved,
  GrowthBounded,
  GrowthUnbounded,
  VacuousZero,
  ReportOnly
};

const char* verdict_name(Verdict v);

struct WellposednessVerdict {
  Verdict verdict = Verdict::ReportOnly;
  DecayFit fit;
  std::string note;
  bool certifies = false; // VacuousZero / ReportOnly claim nothing
  bool pass = false;
};

// Decay runs: GevreyPreserved iff the fitted order of |uhat(T,.)| stays within
// 5% of s_test with overshoot residual <= 0.2. Ultra runs (growth data at the
// endpoint index): GrowthBounded iff a growth law at order s_test fits with
// overshoot residual <= 0.2. Runs with s_test > s_sup are reported only.
WellposednessVerdict wellposedness_verdict(const DecayFit& initial_fit,
                                           const std::vector<std::pair<double, double>>& final_samples,
                                           double s_test, double s_sup, bool ultra);

} // namespace wheq
