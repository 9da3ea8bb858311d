#include "wheq/selftest.hpp"

#include "wheq/config.hpp"
#include "wheq/gevrey.hpp"
#include "wheq/mollify.hpp"
#include "wheq/reduction.hpp"
#include "wheq/scenario.hpp"
#include "wheq/solver.hpp"
#include "wheq/symmetrizer.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace wheq {

SelftestResult selftest_symmetrizer(int m_lo, int m_hi, int instances, unsigned seed) {
  SelftestResult res;
  res.name = "symmetrizer closed forms vs LU oracles";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::uniform_real_distribution<double> Ubr(1.0, 1000.0);

  double worst_det = 0.0, worst_inv = 0.0, worst_iii = 0.0, worst_iv = 0.0, worst_v = 0.0;

  for (int m = m_lo; m <= m_hi; ++m) {
    for (int inst = 0; inst < instances; ++inst) {
      const double br = Ubr(rng);
      // nodes with min gap >= 1e-3 <xi>
      Vec lam(m);
      {
        double gap_floor = 1e-3 * br;
        double x = U(rng) * br;
        for (int i = 0; i < m; ++i) {
          lam(i) = x;
          x += gap_floor + std::abs(U(rng)) * br / m;
        }
      }
      Vec tau(m), lamd(m);
      for (int i = 0; i < m; ++i) {
        tau(i) = U(rng) * br;
        lamd(i) = U(rng) * br;
      }

      SymmetrizerBundle b = build_bundle(lam, br);
      if (b.ill_conditioned) continue;

      double det_o = det_lu(lam, br);
      worst_det = std::max(worst_det, std::abs(b.detH - det_o) / std::abs(det_o));

      Mat resid = b.Hinv * b.H - Mat::Identity(m, m);
      worst_inv =
          std::max(worst_inv, resid.cwiseAbs().maxCoeff() / (1e-8 * b.cond_proxy) * 1e-8);

      // (iii) off-diagonal against a direct conjugation of the companion form
      Vec w(m);
      {
        // tau-polynomial coefficients from the roots
        std::vector<double> c(m + 1, 0.0);
        c[0] = 1.0;
        for (int i = 0; i < m; ++i)
          for (int k = i + 1; k >= 1; --k) c[k] -= tau(i) * c[k - 1];
        for (int j = 0; j < m; ++j) w(j) = -c[m - j];
      }
      Mat A = companion_symbol_matrix(w, br);
      Mat oracleA = conjugate_oracle(b, A);
      Mat closedA = conjugate_A_offdiag(b, tau);
      double scaleA = std::max(1.0, oracleA.cwiseAbs().maxCoeff());
      for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
          if (p != q)
            worst_iii = std::max(worst_iii, std::abs(closedA(p, q) - oracleA(p, q)) / scaleA);

      // (iv) against a direct conjugation of the lower-order matrix
      Vec g(m);
      for (int i = 0; i < m; ++i) g(i) = U(rng);
      Vec gvals(m);
      for (int q = 0; q < m; ++q) {
        double s = 0.0;
        for (int j = m - 1; j >= 0; --j) s = s * lam(q) + g(j);
        gvals(q) = s;
      }
      Mat B = lower_symbol_matrix(g, br);
      Mat oracleB = conjugate_oracle(b, B);
      Mat closedB = conjugate_B_closed(b, gvals);
      double scaleB = std::max(1.0, oracleB.cwiseAbs().maxCoeff());
      worst_iv = std::max(worst_iv, (closedB - oracleB).cwiseAbs().maxCoeff() / scaleB);

      // (v) against Hinv * dH/dt
      Mat oracleE = b.Hinv * dH_dt(b, lamd);
      Mat closedE = conjugate_dH_closed(b, lamd);
      double scaleE = std::max(1.0, oracleE.cwiseAbs().maxCoeff());
      worst_v = std::max(worst_v, (closedE - oracleE).cwiseAbs().maxCoeff() / scaleE);
    }
  }

  std::ostringstream os;
  os << "worst rel err: det " << worst_det << ", inv " << worst_inv << ", (iii) " << worst_iii
     << ", (iv) " << worst_iv << ", (v) " << worst_v;
  res.detail = os.str();
  res.pass = worst_det <= 1e-10 && worst_inv <= 1e-8 && worst_iii <= 1e-6 &&
             worst_iv <= 1e-6 && worst_v <= 1e-6;
  return res;
}

namespace {

SelftestResult selftest_mollifier() {
  SelftestResult res;
  res.name = "mollifier quadrature exactness";
  MollifierSpec phi = MollifierSpec::standard_bump(64);
  double mass_err = std::abs(phi.normalized_mass_check() - 1.0);

  // linear root field: convolution must reproduce tau(t) = t exactly
  RootField lin;
  lin.m = 1;
  lin.sample = [](double t, const Vec&) {
    Vec v(1);
    v(0) = t;
    return v;
  };
  MollifiedRoots mr = regularize_case1(lin, phi, 0.1, 1.0, 1.0);
  Vec xi(1);
  xi(0) = 1.0;
  double conv_err = 0.0;
  for (double t : {0.15, 0.4, 0.77}) {
    double lam = mr.lambda(t, xi)(0) - 1.0 * std::pow(0.1, 1.0) * bracket(xi); // minus shift
    conv_err = std::max(conv_err, std::abs(lam - t));
  }
  std::ostringstream os;
  os << "4N mass error " << mass_err << ", linear-field convolution error " << conv_err;
  res.detail = os.str();
  res.pass = mass_err <= 1e-10 && conv_err <= 1e-12;
  return res;
}

SelftestResult selftest_integrator() {
  SelftestResult res;
  res.name = "integrator order on the closed-form wave";
  // m=2, constant a(t)=1, xi=3: A^2 = omega^2 I with omega = 3
  ProblemSpec spec;
  spec.m = 2;
  spec.l = 0;
  spec.n = 1;
  spec.T = 1.0;
  MonomialKey key{0, MultiIndex{{2}}};
  spec.principal[key] = CoefficientFunction{[](double) { return 1.0; }, 1.0, "a=1"};
  FirstOrderSystem sys = build_system(spec);
  Vec xi(1);
  xi(0) = 3.0;
  const double br = bracket(xi);
  Mat A(2, 2);
  A << 0.0, br, 9.0 / br, 0.0;
  const double omega = 3.0;
  CVec V0(2);
  V0 << Complex(1.0, 0.0), Complex(0.0, 0.0);
  auto exact = [&](double t) -> CVec {
    // e^{iAt} = cos(wt) I + i sin(wt)/w A
    return std::cos(omega * t) * V0 + Complex(0, 1) * (std::sin(omega * t) / omega) * (A * V0).eval();
  };
  auto endpoint_err = [&](double h) {
    IntegrateOptions o;
    o.tol = 1e30; // fixed step: every step accepted at max_step
    o.max_step = h;
    o.t_begin = 0.0;
    o.t_end = 1.0;
    o.output_points = 2;
    ModeTrajectory tr = integrate_mode(sys, V0, xi, o);
    return (tr.V.back() - exact(1.0)).norm();
  };
  double e1 = endpoint_err(1.0 / 64.0);
  double e2 = endpoint_err(1.0 / 128.0);
  double ratio = e1 / e2;
  std::ostringstream os;
  os << "error ratio for halved step " << ratio << " (expect ~16)";
  res.detail = os.str();
  res.pass = ratio > 12.8 && ratio < 19.2;
  return res;
}

SelftestResult selftest_gevrey() {
  SelftestResult res;
  res.name = "gevrey fit round-trip";
  auto g = synthesize(2.0, 0.5);
  std::vector<std::pair<double, double>> samples;
  for (int k = 2; k <= 14; ++k) {
    Vec xi(1);
    xi(0) = std::pow(2.0, k);
    samples.emplace_back(bracket(xi), std::abs(g(xi)));
  }
  DecayFit fit = fit_decay(samples, FitModel::Decay);
  double s_err = std::abs(fit.s - 2.0) / 2.0;
  double d_err = std::abs(fit.delta - 0.5) / 0.5;
  std::ostringstream os;
  os << "recovered s=" << fit.s << " delta=" << fit.delta;
  res.detail = os.str();
  res.pass = s_err <= 0.02 && d_err <= 0.02;
  return res;
}

SelftestResult selftest_config() {
  SelftestResult res;
  res.name = "config round-trip";
  RunConfig a = scenario_config("example1");
  RunConfig b = RunConfig::parse(a.emit());
  RunConfig c = RunConfig::parse(b.emit());
  res.pass = (a == b) && (b == c);
  res.detail = res.pass ? "parse(emit(parse)) stable" : "round-trip mismatch";
  return res;
}

} // namespace

std::vector<SelftestResult> run_selftests() {
  std::vector<SelftestResult> out;
  out.push_back(selftest_symmetrizer(2, 6, 100, 20240901u));
  out.push_back(selftest_mollifier());
  out.push_back(selftest_integrator());
  out.push_back(selftest_gevrey());
  out.push_back(selftest_config());
  return out;
}

} // namespace wheq
