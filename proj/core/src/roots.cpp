#include "wheq/roots.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wheq {

Vec characteristic_roots(const ProblemSpec& spec, double t, const Vec& xi, double tolerance) {
  const int m = spec.m;
  if (xi.size() == 0 || xi.isZero(0.0)) return Vec::Zero(m); // 1-homogeneity
  Vec parts = principal_parts(spec, t, xi);                  // [j] = A_{(m-j)}(t,xi)

  // Frobenius companion of tau^m - sum_j parts[j] tau^j.
  Mat comp = Mat::Zero(m, m);
  for (int i = 1; i < m; ++i) comp(i, i - 1) = 1.0;
  for (int j = 0; j < m; ++j) comp(j, m - 1) = parts(j);

  Eigen::EigenSolver<Mat> es(comp);
  const double scale = bracket(xi);
  Vec roots(m);
  for (int i = 0; i < m; ++i) {
    Complex ev = es.eigenvalues()(i);
    if (std::abs(ev.imag()) > tolerance * scale) {
      std::ostringstream os;
      os << "complex characteristic root " << ev.real() << (ev.imag() < 0 ? "-" : "+")
         << std::abs(ev.imag()) << "i at t=" << t << ", |xi|=" << xi.norm()
         << " (not weakly hyperbolic)";
      throw HyperbolicityViolation(os.str());
    }
    roots(i) = ev.real();
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

RootField make_root_field(const ProblemSpec& spec, double tolerance) {
  RootField f;
  f.m = spec.m;
  f.hyperbolicity_tolerance = tolerance;
  f.sample = [spec, tolerance](double t, const Vec& xi) {
    return characteristic_roots(spec, t, xi, tolerance);
  };
  return f;
}

DyadicPairs DyadicPairs::standard(double T) {
  DyadicPairs g;
  g.horizon = T;
  for (double h = 0.1 * T; h >= 0.99e-6 * T; h *= 0.5) g.scales.push_back(h);
  const int n_anchor = 33;
  for (int i = 0; i < n_anchor; ++i) g.anchors.push_back(T * i / (n_anchor - 1));
  return g;
}

double DyadicPairs::decades() const {
  if (scales.size() < 2) return 0.0;
  return std::log10(scales.front() / scales.back());
}

HolderEstimate estimate_holder(const RootField& field, const std::vector<int>& k_range,
                               const DyadicPairs& grid, const Vec& xi_probe) {
  if (grid.decades() < 3.0)
    throw std::invalid_argument("estimate_holder: scales must span >= 3 dyadic decades");
  if (k_range.empty()) throw std::invalid_argument("estimate_holder: empty index set");

  const double T = grid.horizon;
  const double xin = xi_probe.norm();
  const double br = bracket(xi_probe);

  auto diff_at = [&](double t, double h) {
    Vec a = field.sample(t, xi_probe);
    Vec b = field.sample(t + h, xi_probe);
    double d = 0.0;
    for (int k : k_range) d = std::max(d, std::abs(b(k) - a(k)));
    return d;
  };

  std::vector<double> hh, dd;
  double argmax_t = grid.anchors.empty() ? 0.0 : grid.anchors.front();
  bool have_argmax = false;
  for (double h : grid.scales) {
    double best = -1.0, best_t = 0.0;
    auto consider = [&](double t) {
      if (t < 0.0 || t + h > T) return;
      double d = diff_at(t, h);
      if (d > best) {
        best = d;
        best_t = t;
      }
    };
    for (double t : grid.anchors) consider(t);
    if (have_argmax) {
      // keep kinks resolved: re-scan a window around the previous argmax
      const int refine = 33;
      double lo = argmax_t - 2.0 * h, hi = argmax_t + 2.0 * h;
      for (int i = 0; i < refine; ++i) consider(lo + (hi - lo) * i / (refine - 1));
    }
    if (best < 0.0) continue;
    argmax_t = best_t;
    have_argmax = true;
    hh.push_back(h);
    dd.push_back(best);
  }

  HolderEstimate est;
  const double floor = 1e-14 * br;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < hh.size(); ++i)
    if (dd[i] > floor) {
      lx.push_back(std::log(hh[i]));
      ly.push_back(std::log(dd[i]));
    }
  if (lx.size() < 4) {
    est.degenerate = true;
    est.constant = 0.0;
    est.exponent = 1.0;
    return est;
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(lx.size());
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  est.exponent = std::min(1.0, std::max(1e-6, slope));

  // witness constant: smallest c with d <= c |xi| h^alpha on all used scales
  double c = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i)
    c = std::max(c, std::exp(ly[i] - est.exponent * lx[i]));
  est.constant = c / std::max(xin, 1e-300);
  return est;
}

const char* case_name(CaseId id) {
  switch (id) {
    case CaseId::Case1: return "case1";
    case CaseId::Case2: return "case2";
    case CaseId::Case3: return "case3";
  }
  return "?";
}

ProbeGrid ProbeGrid::standard(double T, int n_dim) {
  ProbeGrid g;
  const int nt = 129;
  for (int i = 0; i < nt; ++i) g.times.push_back(T * i / (nt - 1));
  Vec e1 = Vec::Zero(n_dim);
  e1(0) = 1.0;
  for (double mag : {1.0, 16.0, 128.0, 1024.0}) g.xis.push_back(mag * e1);
  if (n_dim > 1) {
    Vec diag = Vec::Ones(n_dim) / std::sqrt(static_cast<double>(n_dim));
    g.xis.push_back(128.0 * diag);
  }
  return g;
}

namespace {

// Minimum of gap_k(t) = tau_{k+1}(t)-tau_k(t) over [0,T], found on the probe
// times and sharpened by iterated zoom: touching pairs with a Hoelder kink
// need t-resolution far below the coarse grid to reveal a near-zero gap.
double refined_min_gap(const RootField& field, const Vec& xi, int k,
                       const std::vector<double>& times, double* argmin_t) {
  auto gap = [&](double t) {
    Vec r = field.sample(t, xi);
    return r(k + 1) - r(k);
  };
  double best = std::numeric_limits<double>::infinity(), best_t = 0.0;
  for (double t : times) {
    double g = gap(t);
    if (g < best) {
      best = g;
      best_t = t;
    }
  }
  const double T = times.back();
  double radius = times.size() > 1 ? (times[1] - times[0]) : T;
  for (int round = 0; round < 14 && radius > 1e-15 * T; ++round) {
    double lo = std::max(0.0, best_t - radius), hi = std::min(T, best_t + radius);
    const int pts = 33;
    for (int i = 0; i < pts; ++i) {
      double t = lo + (hi - lo) * i / (pts - 1);
      double g = gap(t);
      if (g < best) {
        best = g;
        best_t = t;
      }
    }
    radius = (hi - lo) / 8.0;
  }
  if (argmin_t) *argmin_t = best_t;
  return best;
}

} // namespace

CaseClassification classify(const RootField& field, const ProblemSpec& spec,
                            const ProbeGrid& probes) {
  if (probes.times.empty() || probes.xis.empty())
    throw std::invalid_argument("classify: empty probe grid");
  const int m = field.m;

  // Per adjacent pair: min gap relative to |xi| over all probes.
  std::vector<double> gmin(m - 1, std::numeric_limits<double>::infinity());
  for (const Vec& xi : probes.xis) {
    const double xin = xi.norm();
    for (int k = 0; k + 1 < m; ++k) {
      double g = refined_min_gap(field, xi, k, probes.times, nullptr);
      gmin[k] = std::min(gmin[k], g / xin);
    }
  }

  // touch / gray / uniform split of each adjacent gap. A gap in the gray zone
  // is an intermittent dip: a crossing between the coinciding and the distinct
  // block, outside the hypotheses.
  const double touch_thresh = 1e-5;
  const double uniform_thresh = 1e-3;
  std::vector<bool> touch(m - 1, false);
  for (int k = 0; k + 1 < m; ++k) {
    if (gmin[k] <= touch_thresh) {
      touch[k] = true;
    } else if (gmin[k] < uniform_thresh) {
      std::ostringstream os;
      os << "gap between sorted roots " << k + 1 << " and " << k + 2
         << " dips intermittently (min relative gap " << gmin[k]
         << " is neither a coincidence nor uniformly separated)";
      throw ClassificationAmbiguous(os.str());
    }
  }

  // connected components under touching gaps
  std::vector<std::pair<int, int>> clusters; // [first, last] sorted indices
  for (int k = 0; k + 1 < m;) {
    if (!touch[k]) {
      ++k;
      continue;
    }
    int start = k;
    while (k + 1 < m && touch[k]) ++k;
    clusters.emplace_back(start, k);
  }
  if (clusters.size() > 1)
    throw ClassificationAmbiguous(
        "several disjoint coinciding clusters; the hypotheses allow exactly one");

  CaseClassification cls;
  if (clusters.empty()) {
    cls.case_id = CaseId::Case3;
    cls.r = 1;
    cls.lower_block = {0};
    for (int i = 1; i < m; ++i) cls.upper_block.push_back(i);
  } else {
    int lo = clusters[0].first, hi = clusters[0].second;
    for (int i = lo; i <= hi; ++i) cls.lower_block.push_back(i);
    for (int i = 0; i < m; ++i)
      if (i < lo || i > hi) cls.upper_block.push_back(i);
    cls.r = static_cast<int>(cls.lower_block.size());
    cls.case_id = (cls.r == m) ? CaseId::Case1 : CaseId::Case2;
  }

  // c_gap: min over every pair not inside the cluster
  double cgap = std::numeric_limits<double>::infinity();
  bool any_separated = false;
  auto in_cluster = [&](int i) {
    return std::find(cls.lower_block.begin(), cls.lower_block.end(), i) !=
           cls.lower_block.end();
  };
  for (const Vec& xi : probes.xis) {
    const double xin = xi.norm();
    for (double t : probes.times) {
      Vec r = field.sample(t, xi);
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
          if (cls.case_id != CaseId::Case3 && in_cluster(i) && in_cluster(j)) continue;
          any_separated = true;
          cgap = std::min(cgap, std::abs(r(j) - r(i)) / xin);
        }
    }
  }
  cls.c_gap = any_separated ? cgap : 0.0;

  // comparability constant over the coinciding block
  double ccomp = 0.0;
  if (cls.case_id != CaseId::Case3 && cls.r >= 2) {
    for (const Vec& xi : probes.xis) {
      const double br = bracket(xi);
      for (double t : probes.times) {
        Vec r = field.sample(t, xi);
        for (std::size_t ki = 1; ki < cls.lower_block.size(); ++ki) {
          double denom = r(cls.lower_block[ki]) - r(cls.lower_block[ki - 1]);
          if (denom <= 1e-12 * br) continue; // vacuous at exact coincidence
          for (int a : cls.lower_block)
            for (int b : cls.lower_block) {
              double q = std::abs(r(a) - r(b)) / denom;
              if (q > ccomp) {
                ccomp = q;
                cls.c_comp_argmax_t = t;
                cls.c_comp_argmax_xi = xi.norm();
              }
            }
        }
      }
    }
  }
  cls.c_comp = ccomp;

  // Hoelder exponents: alpha on the coinciding block, beta on the rest.
  const Vec& xi_h = probes.xis.back();
  DyadicPairs pairs = DyadicPairs::standard(spec.T);
  if (cls.case_id == CaseId::Case3) {
    std::vector<int> all(m);
    for (int i = 0; i < m; ++i) all[i] = i;
    HolderEstimate h = estimate_holder(field, all, pairs, xi_h);
    cls.alpha = cls.beta = h.exponent;
    cls.holder_constant = h.constant;
  } else {
    HolderEstimate ha = estimate_holder(field, cls.lower_block, pairs, xi_h);
    cls.alpha = ha.exponent;
    cls.holder_constant = ha.constant;
    if (!cls.upper_block.empty()) {
      HolderEstimate hb = estimate_holder(field, cls.upper_block, pairs, xi_h);
      cls.beta = hb.exponent;
      cls.holder_constant = std::max(cls.holder_constant, hb.constant);
    } else {
      cls.beta = cls.alpha;
    }
  }
  return cls;
}

} // namespace wheq
