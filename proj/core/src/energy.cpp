#include "wheq/energy.hpp"

#include "wheq/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace wheq {

namespace {

long long gcd_ll(long long a, long long b) {
  a = std::abs(a);
  b = std::abs(b);
  while (b) {
    long long t = a % b;
    a = b;
    b = t;
  }
  return a;
}

} // namespace

Rational::Rational(long long n, long long d) : num(n), den(d) {
  if (den == 0) {
    num = 1; // +inf
    return;
  }
  if (den < 0) {
    num = -num;
    den = -den;
  }
  long long g = gcd_ll(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

double Rational::value() const {
  if (is_inf()) return std::numeric_limits<double>::infinity();
  return static_cast<double>(num) / static_cast<double>(den);
}

Rational Rational::operator+(const Rational& o) const {
  if (is_inf() || o.is_inf()) return inf();
  return Rational(num * o.den + o.num * den, den * o.den);
}
Rational Rational::operator-(const Rational& o) const {
  if (is_inf()) return inf();
  return Rational(num * o.den - o.num * den, den * o.den);
}
Rational Rational::operator*(const Rational& o) const {
  if (is_inf() || o.is_inf()) return inf();
  return Rational(num * o.num, den * o.den);
}
Rational Rational::operator/(const Rational& o) const {
  if (o.is_inf()) return Rational(0, 1);
  if (o.num == 0) return inf(); // the 1/0 = +inf convention
  return Rational(num * o.den, den * o.num);
}
bool Rational::operator<(const Rational& o) const {
  if (is_inf()) return false;
  if (o.is_inf()) return true;
  return num * o.den < o.num * den;
}

Rational rat_min(const Rational& a, const Rational& b) { return a < b ? a : b; }

GammaSRat select_case1(int m, int l, Rational alpha) {
  Rational one(1, 1);
  GammaSRat out;
  out.gamma = rat_min(one / (one + alpha), Rational(m - l, 1) / (alpha * Rational(m, 1)));
  out.s_sup = one + rat_min(alpha, Rational(m - l, 1) / Rational(l, 1));
  return out;
}

GammaSRat select_case2(int m, int l, int r, Rational alpha, Rational beta) {
  Rational one(1, 1);
  GammaSRat out;
  Rational ar = alpha * Rational(r, 1);
  out.gamma = rat_min(one / (one + alpha), rat_min(beta / ar, Rational(m - l, 1) / ar));
  out.s_sup = one + rat_min(alpha, beta / (Rational(r, 1) - beta));
  return out;
}

GammaSRat select_case3(Rational beta) {
  Rational one(1, 1);
  GammaSRat out;
  out.gamma = one;
  out.s_sup = one + beta / (one - beta);
  return out;
}

GammaS select_gamma_s(const CaseClassification& cls, int m, int l) {
  GammaS out;
  const double a = cls.alpha, b = cls.beta;
  switch (cls.case_id) {
    case CaseId::Case1: {
      out.gamma = std::min(1.0 / (1.0 + a), (m - l) / (a * m));
      double second = (l == 0) ? std::numeric_limits<double>::infinity()
                               : static_cast<double>(m - l) / l;
      out.s_sup = 1.0 + std::min(a, second);
      break;
    }
    case CaseId::Case2: {
      const int r = cls.r;
      out.gamma = std::min({1.0 / (1.0 + a), b / (a * r), (m - l) / (a * r)});
      out.s_sup = 1.0 + std::min(a, b / (r - b));
      break;
    }
    case CaseId::Case3: {
      out.gamma = 1.0; // alpha = beta in Case 3
      out.s_sup = (b >= 1.0) ? std::numeric_limits<double>::infinity()
                             : 1.0 + b / (1.0 - b);
      break;
    }
  }
  return out;
}

std::vector<std::string> validate_params(const EnergyParams& p, double t_end) {
  std::vector<std::string> bad;
  if (!(p.rho0 < p.delta1)) bad.push_back("rho(0) must stay below the source decay rate delta1");
  if (!(p.rho(t_end) > 0.0))
    bad.push_back("rho must stay positive on [0, T'] (kappa too large or rho0 too small)");
  if (!(p.kappa >= 0.0)) bad.push_back("kappa must be nonnegative");
  if (!(p.s >= 1.0)) bad.push_back("Gevrey order under test must satisfy s >= 1");
  if (!(p.gamma > 0.0 && p.gamma <= 1.0)) bad.push_back("gamma must lie in (0, 1]");
  return bad;
}

double loss_exponent(const EnergyParams& p, int m, int r) {
  double blocks = (p.case_id == CaseId::Case1) ? static_cast<double>(m) * (m - 1)
                                               : static_cast<double>(r) * (r - 1);
  return p.gamma * p.alpha * blocks / 2.0;
}

namespace {

double op_norm(const Mat& M) {
  return Eigen::JacobiSVD<Mat>(M).singularValues()(0);
}

double horner_at(const Vec& coeffs, double x) {
  double s = 0.0;
  for (int j = static_cast<int>(coeffs.size()) - 1; j >= 0; --j) s = s * x + coeffs(j);
  return s;
}

TermEstimates term_estimates_impl(const SymmetrizerBundle& bundle, const FirstOrderSystem& sys,
                                  const MollifiedRoots& mr, const EnergyParams& params, int l,
                                  double t, const Vec& xi, const Vec& lambda_dt) {
  if (bundle.ill_conditioned) {
    std::ostringstream os;
    os << "symmetrizer bundle past the conditioning gate (cond proxy " << bundle.cond_proxy
       << ")";
    throw IllConditioned(os.str());
  }
  TermEstimates te;
  const int m = bundle.order();
  const double br = bundle.bracket_xi;
  const Vec& lam = bundle.lambda;

  double tr = 0.0, tr_up = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < i; ++j) {
      double q = (lambda_dt(i) - lambda_dt(j)) / (lam(i) - lam(j));
      tr += q;
      tr_up += std::abs(q);
    }
  te.t1 = std::abs(tr);
  te.t1_upper = tr_up;

  te.t2 = op_norm(conjugate_dH_closed(bundle, lambda_dt));

  Vec tau = mr.tau_slots(t, xi);
  Mat C = conjugate_A_offdiag(bundle, tau);
  te.t3 = op_norm(C - C.transpose());

  Vec gc = sys.g_coeffs(t, xi);
  Vec gv(m);
  for (int q = 0; q < m; ++q) gv(q) = horner_at(gc, lam(q));
  Mat D = conjugate_B_closed(bundle, gv);
  te.t4 = op_norm(D - D.transpose());

  const double eps = mr.eps_at(br);
  const double delta = mr.delta_at(br);
  const double a = mr.alpha, b = mr.beta;
  const int r = mr.r;
  switch (mr.case_id) {
    case CaseId::Case1:
      te.rate = {1.0 / eps, 1.0 / eps, std::pow(eps, a) * br,
                 std::pow(eps, a * (1.0 - m)) * std::pow(br, l - m + 1)};
      break;
    case CaseId::Case2:
      te.rate = {std::max(1.0 / eps, std::pow(delta, b - 1.0)),
                 std::max(1.0 / eps, std::pow(delta, b - 1.0) * std::pow(eps, a * (1.0 - r))),
                 std::max(std::pow(eps, a), std::pow(delta, b) * std::pow(eps, a * (1.0 - r))) * br,
                 std::pow(eps, a * (1.0 - r)) * std::pow(br, l - m + 1)};
      break;
    case CaseId::Case3:
      te.rate = {std::max(std::pow(eps, a - 1.0), std::pow(delta, b - 1.0)),
                 std::max(std::pow(eps, a - 1.0), std::pow(delta, b - 1.0)),
                 std::max(std::pow(eps, a), std::pow(delta, b)) * br,
                 std::pow(br, l - m + 1)};
      break;
  }
  for (int i = 0; i < 4; ++i) te.constant[i] = te.value(i) / te.rate[i];
  (void)params;
  return te;
}

} // namespace

TermEstimates term_estimates(const SymmetrizerBundle& bundle, const FirstOrderSystem& sys,
                             const MollifiedRoots& mr, const EnergyParams& params, int l,
                             double t, const Vec& xi) {
  return term_estimates_impl(bundle, sys, mr, params, l, t, xi, mr.lambda_dt(t, xi));
}

TermEstimates term_estimates(const SymmetrizerBundle& bundle, const FirstOrderSystem& sys,
                             const MollifiedRoots& mr, const EnergyParams& params, int l,
                             double t, const Vec& xi, const Vec& lambda_dt) {
  return term_estimates_impl(bundle, sys, mr, params, l, t, xi, lambda_dt);
}

double energy_derivative(const CVec& W, const CVec& dW) {
  return 2.0 * W.dot(dW).real();
}

double energy_bracket(const TermEstimates& te, const EnergyParams& params,
                      const SymmetrizerBundle& bundle, const FirstOrderSystem& sys,
                      double t, const Vec& xi) {
  const double bs = std::pow(bundle.bracket_xi, 1.0 / params.s);
  double coeff = -2.0 * params.kappa * bs + 2.0 * te.t1 + 2.0 * te.t2 + te.t3 + te.t4;
  CVec F = sys.Fhat(t, xi);
  double fmag = F.norm();
  if (fmag > 0.0) {
    // 2 e^{rho(t)<xi>^{1/s}} |det H| ||H^-1|| |Fhat|, assembled in logs
    double lg = std::log(2.0) + params.rho(t) * bs + std::log(std::abs(bundle.detH)) +
                std::log(op_norm(bundle.Hinv)) + std::log(fmag);
    coeff += (lg > 700.0) ? std::numeric_limits<double>::infinity() : std::exp(lg);
  }
  return coeff;
}

void MonotonicityReport::require_threshold() const {
  if (!threshold_found)
    throw NoThreshold(
        "energy bracket never becomes nonpositive on the grid "
        "(s too close to its supremum for the measured constants, or kappa too small)");
}

// Xi0 = smallest grid magnitude above which every mode's bracket max is <= 0.
// Modes below the small-frequency floor are excluded from asymptotic verdicts.
void scan_threshold(MonotonicityReport& rep) {
  const double floor_bracket = 2.0;
  std::vector<std::pair<double, bool>> by_mag; // (bracket_xi, nonpositive)
  for (const auto& m : rep.modes) {
    if (!m.error.empty()) continue;
    by_mag.emplace_back(m.bracket_xi, m.bracket_nonpositive);
  }
  std::sort(by_mag.begin(), by_mag.end());
  double xi0 = std::numeric_limits<double>::infinity();
  bool found = false;
  // walk from the top; extend the all-nonpositive suffix
  for (auto it = by_mag.rbegin(); it != by_mag.rend(); ++it) {
    if (it->first < floor_bracket) break;
    if (!it->second) break;
    xi0 = it->first;
    found = true;
  }
  rep.threshold_found = found;
  rep.Xi0 = xi0;
  rep.violations_above_threshold = 0;
  if (found)
    for (const auto& m : rep.modes)
      if (m.error.empty() && m.bracket_xi >= xi0 && !m.monotone)
        ++rep.violations_above_threshold;
}

MonotonicityReport certify_monotonicity(const ProblemSpec& spec, const InitialData& data,
                                        const EnergyParams& params, const MollifiedRoots& mr,
                                        const std::vector<double>& t_grid,
                                        const std::vector<Vec>& xi_grid, double tol) {
  if (xi_grid.empty() || t_grid.size() < 2)
    throw std::invalid_argument("certify_monotonicity: need a nonempty sweep grid");
  FirstOrderSystem sys = build_system(spec);
  IntegrateOptions opts;
  opts.tol = tol;
  opts.t_begin = t_grid.front();
  opts.t_end = std::min(t_grid.back(), mr.t_end);
  opts.output_points = static_cast<int>(t_grid.size());

  MonotonicityReport rep;
  for (const Vec& xi : xi_grid) {
    ModeMonotonicity mm;
    mm.bracket_xi = bracket(xi);
    try {
      CVec V0 = initial_vector(data, xi);
      ModeTrajectory traj = integrate_with_transform(sys, V0, xi, params, mr, spec.l, opts);
      mm = analyze_monotonicity(traj);
    } catch (const std::exception& e) {
      mm.error = e.what();
    }
    rep.modes.push_back(std::move(mm));
  }
  scan_threshold(rep);
  return rep;
}

BoundCheck final_bound_check(const std::vector<double>& times, const std::vector<CVec>& V,
                             const std::vector<bool>& w_ge1, const CVec& V0,
                             const EnergyParams& params, double loss_p, double bracket_xi) {
  BoundCheck out;
  const double bs = std::pow(bracket_xi, 1.0 / params.s);
  const double lbr = std::log(bracket_xi);
  const double v0 = V0.norm();
  double lg_ge1 = -std::numeric_limits<double>::infinity();
  double lg_lt1 = -std::numeric_limits<double>::infinity();
  bool any_nonzero = false;
  for (std::size_t k = 0; k < times.size(); ++k) {
    double vn = V[k].norm();
    if (vn <= 0.0) continue;
    any_nonzero = true;
    double lv = std::log(vn);
    if (w_ge1.empty() || w_ge1[k]) {
      if (v0 > 0.0) {
        double lb = (params.rho0 - params.rho(times[k])) * bs + loss_p * lbr + std::log(v0);
        double m = lv - lb;
        if (m > lg_ge1) {
          lg_ge1 = m;
          out.worst_t = times[k];
        }
      }
    } else {
      double lb = -params.rho(times[k]) * bs + loss_p * lbr;
      double m = lv - lb;
      if (m > lg_lt1) {
        lg_lt1 = m;
        out.worst_t = times[k];
      }
    }
  }
  if (!any_nonzero) {
    out.vacuous = true; // zero data, zero source: bound holds with margin inf
    out.pass = true;
    return out;
  }
  out.log_c_ge1 = lg_ge1;
  out.log_c_lt1 = lg_lt1;
  out.c_ge1 = std::exp(lg_ge1);
  out.c_lt1 = std::exp(lg_lt1);
  out.pass = std::isfinite(out.c_ge1) || lg_ge1 == -std::numeric_limits<double>::infinity();
  if (std::isinf(lg_lt1) && lg_lt1 > 0) out.pass = false;
  return out;
}

} // namespace wheq
