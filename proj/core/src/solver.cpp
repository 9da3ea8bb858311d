#include "wheq/solver.hpp"

#include "wheq/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wheq {

namespace {

struct Rhs {
  const FirstOrderSystem* sys;
  const Vec* xi;
  CVec operator()(double t, const CVec& y) const {
    Mat AB = sys->A(t, *xi) + sys->B(t, *xi);
    CVec f = sys->Fhat(t, *xi);
    const Complex i_unit(0.0, 1.0);
    return i_unit * (AB * y).eval() + i_unit * f;
  }
};

// Fehlberg 4(5) tableau. The 4th-order solution is propagated; the embedded
// 5th-order value drives the error estimate.
struct FehlbergStep {
  CVec y4, y5;
  double err;
};

FehlbergStep rkf45_step(const Rhs& f, double t, const CVec& y, double h) {
  const CVec k1 = f(t, y);
  const CVec k2 = f(t + h / 4.0, y + (h / 4.0) * k1);
  const CVec k3 = f(t + 3.0 * h / 8.0, y + h * (3.0 / 32.0 * k1 + 9.0 / 32.0 * k2));
  const CVec k4 = f(t + 12.0 * h / 13.0,
                    y + h * (1932.0 / 2197.0 * k1 - 7200.0 / 2197.0 * k2 + 7296.0 / 2197.0 * k3));
  const CVec k5 = f(t + h, y + h * (439.0 / 216.0 * k1 - 8.0 * k2 + 3680.0 / 513.0 * k3 -
                                    845.0 / 4104.0 * k4));
  const CVec k6 = f(t + h / 2.0, y + h * (-8.0 / 27.0 * k1 + 2.0 * k2 - 3544.0 / 2565.0 * k3 +
                                          1859.0 / 4104.0 * k4 - 11.0 / 40.0 * k5));
  FehlbergStep out;
  out.y4 = y + h * (25.0 / 216.0 * k1 + 1408.0 / 2565.0 * k3 + 2197.0 / 4104.0 * k4 -
                    1.0 / 5.0 * k5);
  out.y5 = y + h * (16.0 / 135.0 * k1 + 6656.0 / 12825.0 * k3 + 28561.0 / 56430.0 * k4 -
                    9.0 / 50.0 * k5 + 2.0 / 55.0 * k6);
  out.err = (out.y5 - out.y4).cwiseAbs().maxCoeff();
  return out;
}

} // namespace

ModeTrajectory integrate_mode(const FirstOrderSystem& sys, const CVec& V0, const Vec& xi,
                              const IntegrateOptions& opts) {
  if (opts.tol <= 0.0) throw std::invalid_argument("integrate_mode: tol must be positive");
  if (opts.output_points < 2)
    throw std::invalid_argument("integrate_mode: need at least 2 output points");

  ModeTrajectory traj;
  traj.xi = xi;
  traj.bracket_xi = bracket(xi);
  const double span = opts.t_end - opts.t_begin;
  if (span <= 0.0) throw std::invalid_argument("integrate_mode: empty time span");

  traj.times.resize(opts.output_points);
  for (int k = 0; k < opts.output_points; ++k)
    traj.times[k] = opts.t_begin + span * k / (opts.output_points - 1);
  traj.V.reserve(opts.output_points);
  traj.V.push_back(V0);

  Rhs f{&sys, &xi};
  CVec y = V0;
  double t = opts.t_begin;
  double h = std::min({0.01, 0.5 / traj.bracket_xi, opts.max_step});

  // Pure relative error control: the system is linear, so the scale follows
  // the state. An absolute floor would let near-underflow modes (synthesized
  // Gevrey data decays like e^{-delta <xi>^{1/s}}) take unstable steps.
  const double land_eps = 1e-13 * span;
  for (int k = 1; k < opts.output_points; ++k) {
    const double t_target = traj.times[k];
    while (t_target - t > land_eps) {
      double h_try = std::min({h, t_target - t, opts.max_step});
      if (h_try < 1e-12 * span) {
        std::ostringstream os;
        os << "step size underflow at t=" << t << ", |xi|=" << xi.norm()
           << " (stiffness beyond scope; inputs likely mis-scaled)";
        throw StepUnderflow(os.str());
      }
      FehlbergStep st = rkf45_step(f, t, y, h_try);
      double mag = std::max(y.cwiseAbs().maxCoeff(), st.y4.cwiseAbs().maxCoeff());
      double scale = opts.tol * mag;
      if (st.err <= scale || mag == 0.0) {
        t += h_try;
        y = st.y4;
        ++traj.stats.accepted;
        if (mag > 0.0)
          traj.stats.max_local_error = std::max(traj.stats.max_local_error, st.err / mag);
        traj.stats.max_h_scale =
            std::max(traj.stats.max_h_scale,
                     h_try * (traj.bracket_xi + sys.principal_row_max(t, xi)));
      } else {
        ++traj.stats.rejected;
      }
      double grow = (st.err > 0.0) ? 0.9 * std::pow(scale / st.err, 0.2) : 5.0;
      h = h_try * std::clamp(grow, 0.2, 5.0);
    }
    t = t_target; // exact landing; every output value is an integration point
    traj.V.push_back(y);
  }
  return traj;
}

ModeTrajectory integrate_with_transform(const FirstOrderSystem& sys, const CVec& V0,
                                        const Vec& xi, const EnergyParams& params,
                                        const MollifiedRoots& mr, int l,
                                        const IntegrateOptions& opts) {
  IntegrateOptions o = opts;
  o.t_end = std::min(opts.t_end, mr.t_end);
  ModeTrajectory traj = integrate_mode(sys, V0, xi, o);

  const int n = static_cast<int>(traj.times.size());
  const double br = traj.bracket_xi;
  const double bs = std::pow(br, 1.0 / params.s);
  const Complex i_unit(0.0, 1.0);

  traj.has_transform = true;
  traj.log_w_offset = params.rho0 * bs;
  traj.W.resize(n);
  traj.dW.resize(n);
  traj.w_ge1.assign(n, false);
  traj.bracket_coeff.resize(n);
  traj.term_max = {0.0, 0.0, 0.0, 0.0};

  for (int k = 0; k < n; ++k) {
    const double t = traj.times[k];
    Vec lam, lam_dt;
    mr.lambda_both(t, xi, lam, lam_dt);
    SymmetrizerBundle bundle = build_bundle(lam, br);

    const double scale = std::exp((params.rho(t) - params.rho0) * bs); // e^{-kappa t bs}
    CVec HinvV = bundle.Hinv * traj.V[k];
    traj.W[k] = scale * bundle.detH * HinvV;

    double wn = traj.W[k].norm();
    traj.w_ge1[k] = (wn > 0.0) && (std::log(wn) + traj.log_w_offset >= 0.0);

    TermEstimates te = term_estimates(bundle, sys, mr, params, l, t, xi, lam_dt);
    traj.bracket_coeff[k] = energy_bracket(te, params, bundle, sys, t, xi);
    for (int i = 0; i < 4; ++i) {
      traj.term_max[i] = std::max(traj.term_max[i], te.value(i));
      traj.term_rate[i] = te.rate[i];
    }

    // independently assembled dW (scaled consistently with W)
    double trace = 0.0;
    for (int i = 0; i < bundle.order(); ++i)
      for (int j = 0; j < i; ++j) trace += (lam_dt(i) - lam_dt(j)) / (lam(i) - lam(j));
    Mat E = conjugate_dH_closed(bundle, lam_dt);
    Mat CA = conjugate_oracle(bundle, sys.A(t, xi));
    Mat CB = conjugate_oracle(bundle, sys.B(t, xi));
    CVec dw = (-params.kappa * bs + trace) * traj.W[k];
    dw -= E * traj.W[k];
    dw += i_unit * ((CA + CB) * traj.W[k]).eval();
    CVec F = sys.Fhat(t, xi);
    if (F.norm() > 0.0) dw += i_unit * scale * bundle.detH * (bundle.Hinv * F).eval();
    traj.dW[k] = dw;
  }
  return traj;
}

ModeMonotonicity analyze_monotonicity(const ModeTrajectory& traj) {
  ModeMonotonicity mm;
  mm.bracket_xi = traj.bracket_xi;
  if (!traj.has_transform || traj.W.empty()) {
    mm.error = "trajectory carries no transform data";
    return mm;
  }
  mm.bracket_max = *std::max_element(traj.bracket_coeff.begin(), traj.bracket_coeff.end());
  mm.bracket_nonpositive = mm.bracket_max <= 0.0;

  const double w0sq = traj.W.front().squaredNorm();
  if (w0sq == 0.0) {
    mm.gated_vacuous = true;
    return mm;
  }
  bool any_gated = false;
  double prev = traj.W.front().squaredNorm();
  bool prev_gated = traj.w_ge1.front();
  for (std::size_t k = 1; k < traj.W.size(); ++k) {
    double cur = traj.W[k].squaredNorm();
    if (prev_gated && traj.w_ge1[k]) {
      any_gated = true;
      double exc = (cur - prev) / w0sq;
      mm.worst_excursion = std::max(mm.worst_excursion, exc);
    }
    prev = cur;
    prev_gated = traj.w_ge1[k];
  }
  mm.gated_vacuous = !any_gated;
  mm.monotone = mm.worst_excursion <= 1e-10;
  return mm;
}

std::vector<double> SweepGrid::dyadic_magnitudes(int pow2_lo, int pow2_hi, int count) {
  std::vector<double> mags;
  if (count < 1) return mags;
  if (count == 1) {
    mags.push_back(std::pow(2.0, pow2_lo));
    return mags;
  }
  for (int i = 0; i < count; ++i) {
    double e = pow2_lo + (pow2_hi - pow2_lo) * static_cast<double>(i) / (count - 1);
    mags.push_back(std::pow(2.0, e));
  }
  return mags;
}

std::vector<Vec> SweepGrid::points() const {
  std::vector<Vec> pts;
  pts.reserve(directions.size() * magnitudes.size());
  for (const Vec& d : directions)
    for (double m : magnitudes) pts.push_back(m * d);
  return pts;
}

SweepReport sweep(const ProblemSpec& spec, const InitialData& data, const EnergyParams& params,
                  const MollifiedRoots& mr, const SweepGrid& grid, const IntegrateOptions& opts,
                  int workers) {
  SweepReport rep;
  std::vector<Vec> pts = grid.points();
  rep.modes.resize(pts.size());
  if (pts.empty()) return rep;

  FirstOrderSystem sys = build_system(spec);
  IntegrateOptions mode_opts = opts;
  mode_opts.t_end = std::min(opts.t_end, mr.t_end);

  parallel_for(
      pts.size(),
      [&](std::size_t i) {
        SweepModeResult& r = rep.modes[i];
        r.xi = pts[i];
        r.bracket_xi = bracket(pts[i]);
        try {
          CVec V0 = initial_vector(data, pts[i]);
          r.traj = integrate_with_transform(sys, V0, pts[i], params, mr, spec.l, mode_opts);
          r.mono = analyze_monotonicity(r.traj);
          double p = loss_exponent(params, spec.m, mr.r);
          r.bound = final_bound_check(r.traj.times, r.traj.V, r.traj.w_ge1, r.traj.V.front(),
                                      params, p, r.bracket_xi);
          r.uhat_final = reconstruct_uhat(r.traj.V.back(), r.bracket_xi);
          for (std::size_t k = (3 * r.traj.V.size()) / 4; k < r.traj.V.size(); ++k)
            r.uhat_envelope = std::max(
                r.uhat_envelope, std::abs(reconstruct_uhat(r.traj.V[k], r.bracket_xi)));
        } catch (const std::exception& e) {
          r.error = e.what();
          r.mono.error = r.error;
          r.mono.bracket_xi = r.bracket_xi;
        }
      },
      workers);

  for (const auto& r : rep.modes) {
    rep.monotonicity.modes.push_back(r.mono);
    if (!r.error.empty()) ++rep.n_errors;
  }
  scan_threshold(rep.monotonicity);
  return rep;
}

} // namespace wheq
