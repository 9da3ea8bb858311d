#include "wheq/gevrey.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace wheq {

std::function<Complex(const Vec&)> synthesize(double s, double delta, FitModel kind,
                                              std::function<double(const Vec&)> phase) {
  if (s < 1.0) throw std::invalid_argument("synthesize: need s >= 1");
  if (delta <= 0.0) throw std::invalid_argument("synthesize: need delta > 0");
  double sign = (kind == FitModel::Decay) ? -1.0 : 1.0;
  return [=](const Vec& xi) -> Complex {
    double mag = std::exp(sign * delta * std::pow(bracket(xi), 1.0 / s));
    double th = phase ? phase(xi) : 0.0;
    return mag * Complex(std::cos(th), std::sin(th));
  };
}

namespace {

struct LinFit {
  double logC = 0.0, p = 0.0, delta = 0.0;
  double sse = std::numeric_limits<double>::infinity();
};

// log|g| = logC [+ p log x] + sign * delta * x^{1/s}
LinFit linear_subfit(const std::vector<double>& x, const std::vector<double>& logy, double s,
                     double sign, bool with_poly) {
  const int n = static_cast<int>(x.size());
  const int cols = with_poly ? 3 : 2;
  Mat A(n, cols);
  Vec b(n);
  for (int i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = sign * std::pow(x[i], 1.0 / s);
    if (with_poly) A(i, 2) = std::log(x[i]);
    b(i) = logy[i];
  }
  Vec sol = A.colPivHouseholderQr().solve(b);
  LinFit f;
  f.logC = sol(0);
  f.delta = sol(1);
  if (with_poly) f.p = sol(2);
  f.sse = (A * sol - b).squaredNorm();
  return f;
}

} // namespace

DecayFit fit_decay(const std::vector<std::pair<double, double>>& samples, FitModel model,
                   FitOptions opts) {
  std::vector<double> x, ly;
  int dropped = 0;
  for (const auto& [xi, mag] : samples) {
    if (!(mag > 0.0) || !std::isfinite(mag)) {
      ++dropped;
      continue;
    }
    x.push_back(xi);
    ly.push_back(std::log(mag));
  }
  if (static_cast<int>(x.size()) < 8)
    throw std::invalid_argument("fit_decay: need at least 8 positive samples");
  auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  if (*hi_it < 4.0 * *lo_it)
    throw std::invalid_argument("fit_decay: samples must span >= 2 dyadic decades");
  {
    auto [mn, mx] = std::minmax_element(ly.begin(), ly.end());
    if (*mx - *mn < 1e-14)
      throw FitDegenerate("fit_decay: magnitudes are flat to 1e-14");
  }

  const double sign = (model == FitModel::Decay) ? -1.0 : 1.0;
  auto sse_at = [&](double s) { return linear_subfit(x, ly, s, sign, opts.with_poly).sse; };

  // coarse scan, then golden-section refinement around the best bracket
  const int n_scan = 41;
  double best_s = opts.s_lo, best_sse = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_scan; ++i) {
    double s = opts.s_lo * std::pow(opts.s_hi / opts.s_lo,
                                    static_cast<double>(i) / (n_scan - 1));
    double v = sse_at(s);
    if (v < best_sse) {
      best_sse = v;
      best_s = s;
    }
  }
  double step = std::pow(opts.s_hi / opts.s_lo, 1.0 / (n_scan - 1));
  double lo = std::max(opts.s_lo, best_s / step), hi = std::min(opts.s_hi, best_s * step);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = sse_at(c), fd = sse_at(d);
  for (int it = 0; it < 80; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = sse_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = sse_at(d);
    }
  }
  double s_star = (a + b) / 2.0;
  if (sse_at(best_s) < sse_at(s_star)) s_star = best_s;

  LinFit f = linear_subfit(x, ly, s_star, sign, opts.with_poly);
  DecayFit out;
  out.model = model;
  out.C = std::exp(f.logC);
  out.delta = f.delta;
  out.s = s_star;
  out.poly_p = f.p;
  out.with_poly = opts.with_poly;
  out.n_samples = static_cast<int>(x.size());
  out.n_dropped = dropped;
  out.range_lo = *lo_it;
  out.range_hi = *hi_it;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double m = f.logC + sign * f.delta * std::pow(x[i], 1.0 / s_star) +
               (opts.with_poly ? f.p * std::log(x[i]) : 0.0);
    double r = ly[i] - m;
    out.residual = std::max(out.residual, std::abs(r));
    out.upper_residual = std::max(out.upper_residual, r);
  }
  out.non_exponential = out.residual > 0.5;
  return out;
}

DecayFit fit_growth_at_order(const std::vector<std::pair<double, double>>& samples, double s) {
  std::vector<double> x, ly;
  int dropped = 0;
  for (const auto& [xi, mag] : samples) {
    if (!(mag > 0.0) || !std::isfinite(mag)) {
      ++dropped;
      continue;
    }
    x.push_back(xi);
    ly.push_back(std::log(mag));
  }
  if (static_cast<int>(x.size()) < 8)
    throw std::invalid_argument("fit_growth_at_order: need at least 8 positive samples");
  LinFit f = linear_subfit(x, ly, s, +1.0, false);
  DecayFit out;
  out.model = FitModel::Growth;
  out.C = std::exp(f.logC);
  out.delta = f.delta;
  out.s = s;
  out.n_samples = static_cast<int>(x.size());
  out.n_dropped = dropped;
  auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  out.range_lo = *lo_it;
  out.range_hi = *hi_it;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double m = f.logC + f.delta * std::pow(x[i], 1.0 / s);
    double r = ly[i] - m;
    out.residual = std::max(out.residual, std::abs(r));
    out.upper_residual = std::max(out.upper_residual, r);
  }
  out.non_exponential = out.residual > 0.5;
  return out;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::GevreyPreserved: return "GEVREY_PRESERVED";
    case Verdict::NotPreserved: return "NOT_PRESERVED";
    case Verdict::GrowthBounded: return "GROWTH_BOUNDED";
    case Verdict::GrowthUnbounded: return "GROWTH_UNBOUNDED";
    case Verdict::VacuousZero: return "VACUOUS_ZERO";
    case Verdict::ReportOnly: return "REPORT_ONLY";
  }
  return "?";
}

WellposednessVerdict wellposedness_verdict(const DecayFit& initial_fit,
                                           const std::vector<std::pair<double, double>>& final_samples,
                                           double s_test, double s_sup, bool ultra) {
  WellposednessVerdict out;
  bool all_zero = true;
  for (const auto& [xi, mag] : final_samples) {
    (void)xi;
    if (mag > 0.0) {
      all_zero = false;
      break;
    }
  }
  if (all_zero) {
    out.verdict = Verdict::VacuousZero;
    out.pass = true;
    out.certifies = false;
    out.note = "solution transform vanished at t=T; nothing to certify";
    return out;
  }
  if (!ultra && s_test > s_sup) {
    out.verdict = Verdict::ReportOnly;
    out.certifies = false;
    out.fit = fit_decay(final_samples, FitModel::Decay, FitOptions{true});
    std::ostringstream os;
    os << "s_test=" << s_test << " exceeds the admissible supremum " << s_sup
       << "; the theorems make no claim here";
    out.note = os.str();
    return out;
  }
  out.certifies = true;
  if (ultra) {
    // Beurling-style growth check at the prescribed order
    out.fit = fit_growth_at_order(final_samples, s_test);
    bool ok = out.fit.upper_residual <= 0.2 && std::isfinite(out.fit.delta);
    out.verdict = ok ? Verdict::GrowthBounded : Verdict::GrowthUnbounded;
    out.pass = ok;
  } else {
    out.fit = fit_decay(final_samples, FitModel::Decay, FitOptions{true});
    bool order_ok = out.fit.s <= s_test * 1.05;
    bool is_decay = out.fit.delta > 0.0;
    bool resid_ok = out.fit.upper_residual <= 0.2;
    out.pass = order_ok && is_decay && resid_ok;
    out.verdict = out.pass ? Verdict::GevreyPreserved : Verdict::NotPreserved;
    if (!out.pass) {
      std::ostringstream os;
      os << "fitted order " << out.fit.s << " vs allowed " << s_test * 1.05
         << ", delta=" << out.fit.delta << ", overshoot=" << out.fit.upper_residual;
      out.note = os.str();
    }
  }
  if (initial_fit.n_samples > 0 && out.note.empty()) {
    std::ostringstream os;
    os << "initial data fitted at s=" << initial_fit.s << ", delta=" << initial_fit.delta;
    out.note = os.str();
  }
  return out;
}

} // namespace wheq
