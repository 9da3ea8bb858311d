#include "wheq/scenario.hpp"

#include "wheq/gevrey.hpp"

#include <cmath>
#include <sstream>

namespace wheq {

CoefficientFunction make_coefficient(const std::string& descriptor) {
  Descriptor d = parse_descriptor(descriptor);
  const double mult = d.param("mult", 1.0);
  CoefficientFunction cf;
  cf.label = descriptor;

  if (d.name == "constant") {
    double v = d.param("v", 1.0);
    cf.eval = [=](double) { return mult * v; };
    cf.declared_holder = 1.0;
  } else if (d.name == "t_power") {
    double p = d.param("p", 1.0), scale = d.param("scale", 1.0);
    cf.eval = [=](double t) { return mult * scale * std::pow(t, p); };
    cf.declared_holder = std::min(1.0, p);
  } else if (d.name == "abs_kink") {
    double c = d.param("c", 0.5), p = d.param("p", 1.0);
    double scale = d.param("scale", 1.0), offset = d.param("offset", 0.0);
    cf.eval = [=](double t) { return mult * (offset + scale * std::pow(std::abs(t - c), p)); };
    cf.declared_holder = std::min(1.0, p);
  } else if (d.name == "smooth_step") {
    double c = d.param("c", 0.5), w = d.param("w", 0.1);
    double lo = d.param("lo", 0.0), hi = d.param("hi", 1.0);
    cf.eval = [=](double t) {
      return mult * (lo + (hi - lo) * 0.5 * (1.0 + std::tanh((t - c) / w)));
    };
    cf.declared_holder = 1.0;
  } else if (d.name == "kink_sq") {
    double a = d.param("a", 1.0), b = d.param("b", 0.0);
    double c = d.param("c", 0.5), p = d.param("p", 1.0);
    cf.eval = [=](double t) {
      double u = a + b * std::pow(std::abs(t - c), p);
      return mult * u * u;
    };
    cf.declared_holder = std::min(1.0, p);
  } else if (d.name == "poly_plus_kink") {
    double q = d.param("q", 2.0), offset = d.param("offset", 0.0);
    double scale = d.param("scale", 1.0), c = d.param("c", 0.5), p = d.param("p", 1.0);
    cf.eval = [=](double t) {
      return mult * (std::pow(t, q) + offset + scale * std::pow(std::abs(t - c), p));
    };
    cf.declared_holder = std::min(1.0, std::min(p, q));
  } else if (d.name == "poly_times_kink") {
    double q = d.param("q", 2.0), offset = d.param("offset", 0.0);
    double scale = d.param("scale", 1.0), c = d.param("c", 0.5), p = d.param("p", 1.0);
    cf.eval = [=](double t) {
      return mult * std::pow(t, q) * (offset + scale * std::pow(std::abs(t - c), p));
    };
    cf.declared_holder = std::min(1.0, std::min(p, q));
  } else {
    throw ConfigError("unknown coefficient function: " + d.name);
  }
  return cf;
}

std::vector<std::string> scenario_names() { return {"example1", "example2", "case3"}; }

RunConfig scenario_config(const std::string& name) {
  RunConfig cfg;
  auto common = [&cfg](const std::string& out_dir) {
    cfg.set("sweep.pow2_lo", "4");
    cfg.set("sweep.pow2_hi", "10");
    cfg.set("sweep.modes", "200");
    cfg.set("sweep.output_points", "256");
    cfg.set("sweep.tol", "1e-10");
    cfg.set("energy.s_rule", "midpoint");
    cfg.set("energy.kappa", "1");
    cfg.set("energy.kappa_ladder", "1 4 16 64 256");
    cfg.set("energy.rho0_rule", "auto");
    cfg.set("energy.data_delta", "0.5");
    cfg.set("energy.ultra", "0");
    cfg.set("output.dir", out_dir);
  };

  if (name == "example1") {
    // D_t^3 u = -a(t) D_t Delta u + c D_x u, a(t) = t^2
    cfg.set("scenario.name", "example1");
    cfg.set("spec.m", "3");
    cfg.set("spec.l", "1");
    cfg.set("spec.n", "1");
    cfg.set("spec.T", "1");
    cfg.set("spec.principal.1.2", "t_power p=2");
    cfg.set("spec.lower.0.1", "constant v=1");
    cfg.set("spec.source", "none");
    common("out/example1");
  } else if (name == "example2") {
    // D_t^4 u = -(a+b) D_t^2 Delta u - a b Delta^2 u,
    // a(t) = t^2, b(t) = 4 + |t-0.6|^{3/4}
    cfg.set("scenario.name", "example2");
    cfg.set("spec.m", "4");
    cfg.set("spec.l", "0");
    cfg.set("spec.n", "1");
    cfg.set("spec.T", "1");
    cfg.set("spec.principal.2.2", "poly_plus_kink q=2 offset=4 scale=1 c=0.6 p=0.75");
    cfg.set("spec.principal.0.4", "poly_times_kink q=2 offset=4 scale=1 c=0.6 p=0.75 mult=-1");
    cfg.set("spec.source", "none");
    common("out/example2");
  } else if (name == "case3") {
    // strictly hyperbolic: roots 0, +-(2 + 0.3 |t-1/2|^{1/2}) |xi|
    cfg.set("scenario.name", "case3");
    cfg.set("spec.m", "3");
    cfg.set("spec.l", "1");
    cfg.set("spec.n", "1");
    cfg.set("spec.T", "1");
    cfg.set("spec.principal.1.2", "kink_sq a=2 b=0.3 c=0.5 p=0.5");
    cfg.set("spec.lower.0.1", "constant v=1");
    cfg.set("spec.source", "none");
    common("out/case3");
    cfg.set("sweep.modes", "120");
  } else {
    throw ConfigError("unknown scenario: " + name +
                      " (available: example1, example2, case3)");
  }
  return cfg;
}

namespace {

MultiIndex parse_gamma(const std::string& text, int n) {
  MultiIndex g;
  std::string tok;
  std::istringstream in(text);
  while (std::getline(in, tok, ',')) {
    try {
      g.k.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw ConfigError("bad multi-index component: " + tok);
    }
  }
  while (static_cast<int>(g.k.size()) < n) g.k.push_back(0);
  return g;
}

} // namespace

ProblemSpec build_problem(const RunConfig& cfg) {
  ProblemSpec spec;
  spec.m = cfg.get_int("spec.m", 2);
  spec.l = cfg.get_int("spec.l", 0);
  spec.n = cfg.get_int("spec.n", 1);
  spec.T = cfg.get_double("spec.T", 1.0);

  for (const auto& [dk, value] : cfg.kv) {
    bool principal = dk.rfind("spec.principal.", 0) == 0;
    bool lower = dk.rfind("spec.lower.", 0) == 0;
    if (!principal && !lower) continue;
    std::string rest = dk.substr(principal ? 15 : 11); // "<j>.<gamma>"
    std::size_t dot = rest.find('.');
    if (dot == std::string::npos)
      throw ConfigError("coefficient key must be <j>.<gamma>: " + dk);
    MonomialKey key;
    try {
      key.j = std::stoi(rest.substr(0, dot));
    } catch (const std::exception&) {
      throw ConfigError("bad derivative index in " + dk);
    }
    key.gamma = parse_gamma(rest.substr(dot + 1), spec.n);
    CoefficientFunction cf = make_coefficient(value);
    (principal ? spec.principal : spec.lower)[key] = cf;
  }

  std::string src = cfg.get("spec.source", "none");
  if (src != "none" && !src.empty()) {
    Descriptor d = parse_descriptor(src);
    if (d.name != "gevrey")
      throw ConfigError("unknown source kind: " + d.name + " (use none or gevrey)");
    double C = d.param("C", 1.0);
    double delta1 = d.param("delta", 1.0);
    double sf = d.param("s", 1.0);
    spec.source.zero = false;
    spec.source.C = C;
    spec.source.delta1 = delta1;
    spec.source.s_f = sf;
    spec.source.eval = [=](double, const Vec& xi) -> Complex {
      return Complex(C * std::exp(-delta1 * std::pow(bracket(xi), 1.0 / sf)), 0.0);
    };
  }
  return spec;
}

InitialData synthesized_data(int m, double s, double delta, bool growth) {
  InitialData data;
  data.declared_order = s;
  data.declared_rate = delta;
  data.growth = growth;
  auto g = synthesize(s, delta, growth ? FitModel::Growth : FitModel::Decay);
  for (int k = 0; k < m; ++k) data.ghat.push_back(g);
  return data;
}

} // namespace wheq
