#pragma once

#include "wheq/energy.hpp"
#include "wheq/mollify.hpp"
#include "wheq/reduction.hpp"
#include "wheq/types.hpp"

#include <array>
#include <string>
#include <vector>

namespace wheq {

struct StepUnderflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IntegrateOptions {
  double tol = 1e-10;
  double t_begin = 0.0;
  double t_end = 1.0;
  int output_points = 256;
  double max_step = std::numeric_limits<double>::infinity();
};

struct StepStats {
  long accepted = 0;
  long rejected = 0;
  double max_local_error = 0.0;
  double max_h_scale = 0.0; // max over accepted steps of h (<xi> + max|b_(j)|)
};

// One integrated Fourier mode. Output times form a uniform grid that the
// integrator lands on exactly; every output value is an integration point.
// W stores the transformed variable with the constant factor e^{rho0 <xi>^{1/s}}
// divided out (log_w_offset), which keeps large-kappa runs inside double range;
// |W|^2 monotonicity and the |W| >= 1 gate are unaffected.
struct ModeTrajectory {
  Vec xi;
  double bracket_xi = 1.0;
  std::vector<double> times;
  std::vector<CVec> V;
  StepStats stats;

  bool has_transform = false;
  std::vector<CVec> W;   // scaled: e^{(rho(t)-rho0)<xi>^{1/s}} det H H^-1 V
  double log_w_offset = 0.0;
  std::vector<CVec> dW;  // independently assembled derivative of the scaled W
  std::vector<bool> w_ge1;
  std::vector<double> bracket_coeff;   // energy bracket per output time
  std::array<double, 4> term_max{};    // max over output times of t1..t4
  std::array<double, 4> term_rate{};   // theoretical rates at this <xi>
};

// Embedded Runge-Kutta-Fehlberg; the 4th-order solution is propagated.
// Right side is dV/dt = i (A+B) V + i Fhat. Initial step min(0.01, 0.5/<xi>).
ModeTrajectory integrate_mode(const FirstOrderSystem& sys, const CVec& V0, const Vec& xi,
                              const IntegrateOptions& opts);

// Integrates V and attaches W, dW, the |W|>=1 gate and the per-time energy
// bracket. l is the lower-order degree entering the t4 rate.
ModeTrajectory integrate_with_transform(const FirstOrderSystem& sys, const CVec& V0,
                                        const Vec& xi, const EnergyParams& params,
                                        const MollifiedRoots& mr, int l,
                                        const IntegrateOptions& opts);

// |W|^2 nonincreasing in the |W| >= 1 regime, with the bracket summary.
ModeMonotonicity analyze_monotonicity(const ModeTrajectory& traj);

struct SweepGrid {
  std::vector<double> magnitudes; // |xi|, ascending
  std::vector<Vec> directions;    // unit vectors

  static std::vector<double> dyadic_magnitudes(int pow2_lo, int pow2_hi, int count);
  std::vector<Vec> points() const; // direction-major
};

struct SweepModeResult {
  Vec xi;
  double bracket_xi = 1.0;
  ModeTrajectory traj;
  ModeMonotonicity mono;
  BoundCheck bound;
  Complex uhat_final{0.0, 0.0};
  // sup of |uhat(t,xi)| over the trailing quarter of output times; the phase
  // interference of the m characteristic oscillations can null |uhat| at one
  // time slice, the envelope cannot
  double uhat_envelope = 0.0;
  std::string error; // nonempty if this mode failed; sweep continues
};

struct SweepReport {
  std::vector<SweepModeResult> modes;
  MonotonicityReport monotonicity;
  int n_errors = 0;
};

// Parallel frequency sweep. Results are stored per mode index, so reports are
// identical for any worker count.
SweepReport sweep(const ProblemSpec& spec, const InitialData& data, const EnergyParams& params,
                  const MollifiedRoots& mr, const SweepGrid& grid, const IntegrateOptions& opts,
                  int workers);

} // namespace wheq
