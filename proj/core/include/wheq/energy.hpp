#pragma once

#include "wheq/mollify.hpp"
#include "wheq/reduction.hpp"
#include "wheq/roots.hpp"
#include "wheq/symmetrizer.hpp"
#include "wheq/types.hpp"

#include <array>
#include <vector>

namespace wheq {

struct NoThreshold : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IllConditioned : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact fractions for the index formulas; den == 0 encodes +infinity
// (the 1/0 = +inf convention of the index statements).
struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n, long long d);
  static Rational inf() { return Rational(1, 0); }
  bool is_inf() const { return den == 0; }
  double value() const;

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
  bool operator<(const Rational& o) const;
};

Rational rat_min(const Rational& a, const Rational& b);

struct GammaSRat {
  Rational gamma;
  Rational s_sup;
};

// gamma = min{1/(1+a), (m-l)/(a m)},  s_sup = 1 + min{a, (m-l)/l}
GammaSRat select_case1(int m, int l, Rational alpha);
// gamma = min{1/(1+a), b/(a r), (m-l)/(a r)},  s_sup = 1 + min{a, b/(r-b)}
GammaSRat select_case2(int m, int l, int r, Rational alpha, Rational beta);
// gamma = 1 (alpha = beta),  s_sup = 1 + b/(1-b)
GammaSRat select_case3(Rational beta);

struct GammaS {
  double gamma = 0.5;
  double s_sup = 1.0;
};

// Double-precision dispatch on a measured classification.
GammaS select_gamma_s(const CaseClassification& cls, int m, int l);

// Proof parameters for the transform W = e^{rho(t)<xi>^{1/s}} det H H^-1 V
// with rho(t) = rho0 - kappa t.
struct EnergyParams {
  CaseId case_id = CaseId::Case1;
  double gamma = 0.5;
  double alpha = 1.0; // exponent entering the loss factor
  double s = 1.5;     // Gevrey order under test
  double rho0 = 1.0;
  double kappa = 1.0;
  double delta1 = std::numeric_limits<double>::infinity(); // source decay rate

  double rho(double t) const { return rho0 - kappa * t; }
  double eps_of(double br) const { return std::pow(br, -gamma); }
  double delta_of(double br) const { return 1.0 / br; }
};

// rho0 < delta1 and rho(t_end) > 0; violations reported as strings.
std::vector<std::string> validate_params(const EnergyParams& p, double t_end);

// gamma*alpha*m(m-1)/2 in Case 1, gamma*alpha*r(r-1)/2 otherwise.
double loss_exponent(const EnergyParams& p, int m, int r);

// The four measured quantities of the energy argument at one (t,xi), each
// with its theoretical rate and the implied constant.
struct TermEstimates {
  double t1 = 0; // |d/dt det H / det H|
  double t2 = 0; // ||H^-1 dH/dt||
  double t3 = 0; // ||H^-1 A H - (H^-1 A H)*||
  double t4 = 0; // ||H^-1 B H - (H^-1 B H)*||
  double t1_upper = 0; // sum |dl_i - dl_j| / |l_i - l_j|, dominates t1 exactly
  std::array<double, 4> rate{};     // theoretical rate values at this (t,xi)
  std::array<double, 4> constant{}; // measured / rate
  bool ill_conditioned = false;

  double value(int i) const { return i == 0 ? t1 : i == 1 ? t2 : i == 2 ? t3 : t4; }
};

// pre: bundle built at mr.lambda(t,xi). Throws IllConditioned past the gate.
TermEstimates term_estimates(const SymmetrizerBundle& bundle, const FirstOrderSystem& sys,
                             const MollifiedRoots& mr, const EnergyParams& params, int l,
                             double t, const Vec& xi);

// Same, with lambda'(t,xi) already evaluated (shared with the W transform).
TermEstimates term_estimates(const SymmetrizerBundle& bundle, const FirstOrderSystem& sys,
                             const MollifiedRoots& mr, const EnergyParams& params, int l,
                             double t, const Vec& xi, const Vec& lambda_dt);

// d/dt |W|^2 = 2 Re(dW, W).
double energy_derivative(const CVec& W, const CVec& dW);

// Coefficient multiplying |W|^2 in the energy inequality at (t,xi):
//   2 rho' <xi>^{1/s} + 2 t1 + 2 t2 + t3 + t4 + source term.
// Monotonicity of |W| is certified wherever its max over t is <= 0.
double energy_bracket(const TermEstimates& te, const EnergyParams& params,
                      const SymmetrizerBundle& bundle, const FirstOrderSystem& sys,
                      double t, const Vec& xi);

struct ModeMonotonicity {
  double bracket_xi = 0;
  double bracket_max = 0; // max over grid times of the energy bracket
  bool bracket_nonpositive = false;
  bool monotone = true;      // |W|^2 nonincreasing where |W| >= 1
  double worst_excursion = 0; // positive jump relative to |W(0)|^2
  bool gated_vacuous = false; // |W| never reached 1
  std::string error;          // per-mode failure, sweep not aborted
};

struct MonotonicityReport {
  bool threshold_found = false;
  double Xi0 = std::numeric_limits<double>::infinity();
  std::vector<ModeMonotonicity> modes;
  int violations_above_threshold = 0;

  void require_threshold() const;
};

// Fills Xi0 and the violation count from the per-mode entries: the smallest
// grid <xi> above which every bracket max is nonpositive. Modes below <xi>=2
// are excluded from asymptotic verdicts.
void scan_threshold(MonotonicityReport& rep);

// Evaluates the bracket over the grid, finds the frequency threshold Xi0
// above which it stays nonpositive, and checks |W|^2 monotonicity on
// integrated trajectories for all modes with <xi> >= Xi0 (|W| >= 1 regime,
// excursions up to 1e-10 |W(0)|^2 attributed to integration error).
MonotonicityReport certify_monotonicity(const ProblemSpec& spec, const InitialData& data,
                                        const EnergyParams& params, const MollifiedRoots& mr,
                                        const std::vector<double>& t_grid,
                                        const std::vector<Vec>& xi_grid, double tol);

struct BoundCheck {
  double c_ge1 = 0.0;       // fitted constant in the |W| >= 1 branch
  double c_lt1 = 0.0;       // fitted constant in the |W| < 1 branch
  double log_c_ge1 = -std::numeric_limits<double>::infinity();
  double log_c_lt1 = -std::numeric_limits<double>::infinity();
  bool vacuous = false;     // V0 = 0
  bool pass = false;
  double worst_t = 0.0;
};

// Pointwise check of |V(t)| <= c e^{(rho0-rho(t))<xi>^{1/s}} <xi>^p |V(0)|
// (|W| >= 1) and the direct e^{-rho(t)} variant (|W| < 1), p the loss
// exponent. The constant is fitted, never assumed.
BoundCheck final_bound_check(const std::vector<double>& times, const std::vector<CVec>& V,
                             const std::vector<bool>& w_ge1, const CVec& V0,
                             const EnergyParams& params, double loss_p, double bracket_xi);

} // namespace wheq
