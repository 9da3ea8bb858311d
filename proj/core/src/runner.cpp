#include "wheq/runner.hpp"

#include "wheq/energy.hpp"
#include "wheq/gevrey.hpp"
#include "wheq/mollify.hpp"
#include "wheq/parallel.hpp"
#include "wheq/report.hpp"
#include "wheq/roots.hpp"
#include "wheq/scenario.hpp"
#include "wheq/selftest.hpp"
#include "wheq/solver.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wheq {

namespace {

using json = nlohmann::ordered_json;

json json_double(double v) {
  // inf/nan are not valid JSON numbers; report them as strings
  if (std::isfinite(v)) return v;
  return format_double(v);
}

std::vector<Vec> parse_directions(const RunConfig& cfg, int n) {
  std::vector<Vec> dirs;
  std::string text = cfg.get("sweep.directions", "");
  if (text.empty()) {
    Vec e1 = Vec::Zero(n);
    e1(0) = 1.0;
    dirs.push_back(e1);
    return dirs;
  }
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ';')) {
    std::istringstream comp(tok);
    std::string c;
    std::vector<double> vals;
    while (std::getline(comp, c, ',')) {
      if (c.find_first_not_of(" \t") == std::string::npos) continue;
      vals.push_back(std::stod(c));
    }
    if (static_cast<int>(vals.size()) != n)
      throw ConfigError("direction has wrong dimension: " + tok);
    Vec d(n);
    for (int i = 0; i < n; ++i) d(i) = vals[i];
    double nn = d.norm();
    if (nn == 0.0) throw ConfigError("zero direction vector");
    dirs.push_back(d / nn);
  }
  return dirs;
}

struct SlopeFit {
  double slope = 0.0;
  bool valid = false;
};

SlopeFit fit_loglog(const std::vector<std::pair<double, double>>& xy) {
  std::vector<double> lx, ly;
  for (const auto& [x, y] : xy)
    if (x > 0 && y > 0) {
      lx.push_back(std::log(x));
      ly.push_back(std::log(y));
    }
  SlopeFit out;
  if (lx.size() < 3) return out;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double n = static_cast<double>(lx.size());
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-30) return out;
  out.slope = (n * sxy - sx * sy) / denom;
  out.valid = true;
  return out;
}

json fit_to_json(const DecayFit& f) {
  json j;
  j["model"] = f.model == FitModel::Decay ? "decay" : "growth";
  j["C"] = json_double(f.C);
  j["delta"] = json_double(f.delta);
  j["s"] = json_double(f.s);
  j["poly_p"] = json_double(f.poly_p);
  j["with_poly"] = f.with_poly;
  j["residual"] = json_double(f.residual);
  j["upper_residual"] = json_double(f.upper_residual);
  j["non_exponential"] = f.non_exponential;
  j["n_samples"] = f.n_samples;
  j["n_dropped"] = f.n_dropped;
  j["range"] = {json_double(f.range_lo), json_double(f.range_hi)};
  return j;
}

void add_fit_row(CsvTable& t, const std::string& which, const DecayFit& f) {
  t.add_row({which, f.model == FitModel::Decay ? "decay" : "growth", format_double(f.C),
             format_double(f.delta), format_double(f.s), format_double(f.poly_p),
             format_double(f.residual), format_double(f.upper_residual),
             std::to_string(f.n_samples), format_double(f.range_lo),
             format_double(f.range_hi)});
}

double auto_rho0(double kappa, double t_end, double data_delta, double delta1) {
  double rho0 = std::max(1.25 * kappa * t_end, 1.2 * data_delta + 0.01);
  if (std::isfinite(delta1)) rho0 = std::min(rho0, 0.9 * delta1);
  return rho0;
}

} // namespace

RunResult run(const RunConfig& cfg) {
  RunResult result;
  std::vector<std::string>& failures = result.failures;
  json report;
  const std::string out_dir = cfg.get("output.dir", "out/run");
  result.report_path = out_dir + "/report.json";
  const int workers = worker_count_from_env();

  auto finish = [&](bool wrote_tables) {
    report["failures"] = failures;
    report["pass"] = failures.empty();
    write_text_file(result.report_path, report.dump(2) + "\n");
    (void)wrote_tables;
    result.exit_code = failures.empty() ? 0 : 1;
    return result;
  };

  report["scenario"] = cfg.get("scenario.name", "custom");

  // ---- problem -------------------------------------------------------------
  ProblemSpec spec;
  try {
    spec = build_problem(cfg);
  } catch (const std::exception& e) {
    failures.push_back(std::string("config: ") + e.what());
    return finish(false);
  }
  ValidationReport validation = validate_spec(spec);
  report["spec"] = {{"m", spec.m},
                    {"l", spec.l},
                    {"n", spec.n},
                    {"T", json_double(spec.T)},
                    {"violations", validation.violations}};
  if (!validation.ok()) {
    for (const auto& v : validation.violations) failures.push_back("validation: " + v);
    return finish(false);
  }

  // ---- classification ------------------------------------------------------
  RootField field = make_root_field(spec);
  ProbeGrid probes = ProbeGrid::standard(spec.T, spec.n);
  CaseClassification cls;
  try {
    cls = classify(field, spec, probes);
  } catch (const std::exception& e) {
    failures.push_back(std::string("classification: ") + e.what());
    return finish(false);
  }
  report["classification"] = {{"case", case_name(cls.case_id)},
                              {"r", cls.r},
                              {"alpha", json_double(cls.alpha)},
                              {"beta", json_double(cls.beta)},
                              {"c_gap", json_double(cls.c_gap)},
                              {"c_comp", json_double(cls.c_comp)},
                              {"c_comp_argmax_t", json_double(cls.c_comp_argmax_t)},
                              {"c_comp_argmax_xi", json_double(cls.c_comp_argmax_xi)},
                              {"holder_constant", json_double(cls.holder_constant)}};

  // ---- indices ---------------------------------------------------------
  GammaS gs = select_gamma_s(cls, spec.m, spec.l);
  double s_test;
  std::string s_rule = cfg.get("energy.s_rule", "midpoint");
  if (s_rule == "midpoint") {
    s_test = std::isfinite(gs.s_sup) ? 1.0 + 0.5 * (gs.s_sup - 1.0) : 2.0;
  } else if (s_rule == "value") {
    s_test = cfg.get_double("energy.s_value", 1.5);
  } else {
    failures.push_back("config: unknown energy.s_rule " + s_rule);
    return finish(false);
  }
  report["indices"] = {{"gamma", json_double(gs.gamma)},
                       {"s_sup", json_double(gs.s_sup)},
                       {"s_test", json_double(s_test)}};

  // ---- sweep grid ------------------------------------------------------
  const int modes = cfg.get_int("sweep.modes", 200);
  SweepGrid grid;
  grid.magnitudes = SweepGrid::dyadic_magnitudes(cfg.get_int("sweep.pow2_lo", 4),
                                                 cfg.get_int("sweep.pow2_hi", 10), modes);
  try {
    grid.directions = parse_directions(cfg, spec.n);
  } catch (const std::exception& e) {
    failures.push_back(std::string("config: ") + e.what());
    return finish(false);
  }
  if (grid.magnitudes.empty()) {
    report["sweep"] = {{"n_modes", 0}, {"warning", "empty sweep grid, nothing to certify"}};
    return finish(false); // exit 0 with warning: no failures recorded
  }

  // ---- mollification -----------------------------------------------------
  const int nodes = cfg.get_int("mollifier.nodes", 64);
  MollifierSpec phi = MollifierSpec::standard_bump(nodes);
  double min_bracket = bracket_of_norm(grid.magnitudes.front());
  MollifiedRoots mr;
  try {
    mr = regularize_for_sweep(field, cls, phi, gs.gamma, spec.T, min_bracket);
  } catch (const std::exception& e) {
    failures.push_back(std::string("mollification: ") + e.what());
    return finish(false);
  }
  RegularizationReport mrep = verify_regularization(mr, field, cls, probes);
  {
    json checks = json::array();
    for (const auto& c : mrep.checks) {
      checks.push_back({{"name", c.name},
                        {"constant", json_double(c.constant)},
                        {"pass", c.pass},
                        {"note", c.note}});
      if (!c.pass) failures.push_back("mollification: " + c.name);
    }
    report["mollification"] = {{"t_end", json_double(mr.t_end)},
                               {"eps_at_min", json_double(mr.eps)},
                               {"xi_threshold", json_double(mrep.xi_threshold)},
                               {"checks", checks}};
  }

  // ---- energy parameters -----------------------------------------------
  const double kappa = cfg.get_double("energy.kappa", 1.0);
  const double data_delta = cfg.get_double("energy.data_delta", 0.5);
  const double delta1 = spec.source.zero ? std::numeric_limits<double>::infinity()
                                         : spec.source.delta1;
  EnergyParams params;
  params.case_id = cls.case_id;
  params.gamma = gs.gamma;
  params.alpha = cls.alpha;
  params.s = s_test;
  params.kappa = kappa;
  params.delta1 = delta1;
  std::string rho0_rule = cfg.get("energy.rho0_rule", "auto");
  params.rho0 = (rho0_rule == "auto") ? auto_rho0(kappa, mr.t_end, data_delta, delta1)
                                      : cfg.get_double("energy.rho0", 1.0);
  for (const auto& bad : validate_params(params, mr.t_end))
    failures.push_back("energy params: " + bad);
  report["energy_params"] = {{"s", json_double(params.s)},
                             {"rho0", json_double(params.rho0)},
                             {"kappa", json_double(params.kappa)},
                             {"delta1", json_double(params.delta1)},
                             {"data_delta", json_double(data_delta)}};

  // ---- symmetrizer self-test ---------------------------------------------
  SelftestResult sym = selftest_symmetrizer(2, 6, 100, 20240901u);
  report["symmetrizer_selftest"] = {{"pass", sym.pass}, {"detail", sym.detail}};
  if (!sym.pass) failures.push_back("symmetrizer self-test: " + sym.detail);

  // ---- sweep ----------------------------------------------------------
  InitialData data = synthesized_data(spec.m, s_test, data_delta, false);
  IntegrateOptions opts;
  opts.tol = cfg.get_double("sweep.tol", 1e-10);
  opts.t_begin = 0.0;
  opts.t_end = mr.t_end;
  opts.output_points = cfg.get_int("sweep.output_points", 256);
  SweepReport swp = sweep(spec, data, params, mr, grid, opts, workers);

  int monotone_count = 0;
  for (const auto& m : swp.monotonicity.modes)
    if (m.error.empty() && m.monotone) ++monotone_count;
  report["sweep"] = {
      {"n_modes", static_cast<int>(swp.modes.size())},
      {"n_errors", swp.n_errors},
      {"threshold_found", swp.monotonicity.threshold_found},
      {"Xi0", json_double(swp.monotonicity.Xi0)},
      {"violations_above_threshold", swp.monotonicity.violations_above_threshold},
      {"monotone_modes", monotone_count}};
  if (swp.n_errors > 0) {
    for (const auto& m : swp.modes)
      if (!m.error.empty()) {
        failures.push_back("mode |xi|=" + format_double(m.xi.norm()) + ": " + m.error);
        break; // one representative; the table carries the rest
      }
  }
  if (!swp.monotonicity.threshold_found)
    failures.push_back("energy: no frequency threshold with nonpositive bracket (NoThreshold)");
  else if (swp.monotonicity.violations_above_threshold > 0)
    failures.push_back("energy: |W| monotonicity violated above the threshold");

  // ---- final bound aggregation ---------------------------------------------
  {
    double log_c_single = -std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, double>> c_by_xi;
    bool bound_ok = true;
    for (const auto& m : swp.modes) {
      if (!m.error.empty()) continue;
      if (swp.monotonicity.threshold_found && m.bracket_xi >= swp.monotonicity.Xi0) {
        if (!m.bound.pass && !m.bound.vacuous) bound_ok = false;
        if (std::isfinite(m.bound.log_c_ge1)) {
          log_c_single = std::max(log_c_single, m.bound.log_c_ge1);
          c_by_xi.emplace_back(m.bracket_xi, std::exp(m.bound.log_c_ge1));
        }
      }
    }
    SlopeFit cs = fit_loglog(c_by_xi);
    report["final_bound"] = {{"loss_exponent", json_double(loss_exponent(params, spec.m, mr.r))},
                             {"log_c_single", json_double(log_c_single)},
                             {"constant_slope_vs_xi", json_double(cs.valid ? cs.slope : 0.0)},
                             {"pass", bound_ok}};
    if (!bound_ok) failures.push_back("energy: final V-bound failed on a mode above threshold");
  }

  // ---- term rate fits --------------------------------------------------
  json rates = json::array();
  CsvTable rate_table({"term", "slope_measured", "slope_theoretical", "constant_max"});
  {
    const char* names[4] = {"t1_det_ratio", "t2_dH_norm", "t3_A_skew", "t4_B_skew"};
    std::size_t nmag = grid.magnitudes.size();
    for (int term = 0; term < 4; ++term) {
      std::vector<std::pair<double, double>> meas, theo;
      double cmax = 0.0;
      for (std::size_t k = 0; k < nmag; ++k) { // first direction block
        const auto& m = swp.modes[k];
        if (!m.error.empty() || m.bracket_xi < 2.0) continue;
        meas.emplace_back(m.bracket_xi, m.traj.term_max[term]);
        theo.emplace_back(m.bracket_xi, m.traj.term_rate[term]);
        if (m.traj.term_rate[term] > 0)
          cmax = std::max(cmax, m.traj.term_max[term] / m.traj.term_rate[term]);
      }
      SlopeFit sm = fit_loglog(meas), st = fit_loglog(theo);
      rates.push_back({{"term", names[term]},
                       {"slope_measured", json_double(sm.valid ? sm.slope : 0.0)},
                       {"slope_theoretical", json_double(st.valid ? st.slope : 0.0)},
                       {"constant_max", json_double(cmax)}});
      rate_table.add_row({names[term], format_double(sm.valid ? sm.slope : 0.0),
                          format_double(st.valid ? st.slope : 0.0), format_double(cmax)});
    }
    report["rates"] = rates;
  }

  // ---- Gevrey verdicts -------------------------------------------------
  CsvTable fit_table({"which", "model", "C", "delta", "s", "poly_p", "residual",
                      "upper_residual", "n_samples", "range_lo", "range_hi"});
  {
    std::vector<std::pair<double, double>> init_samples;
    for (double mag : grid.magnitudes) {
      Vec xi = mag * grid.directions.front();
      init_samples.emplace_back(bracket(xi), std::abs(data.ghat[0](xi)));
    }
    DecayFit init_fit;
    json verdicts = json::array();
    bool gevrey_ok = true;
    try {
      init_fit = fit_decay(init_samples, FitModel::Decay);
      report["gevrey_initial_fit"] = fit_to_json(init_fit);
      add_fit_row(fit_table, "initial", init_fit);
    } catch (const std::exception& e) {
      failures.push_back(std::string("gevrey initial fit: ") + e.what());
    }
    std::size_t nmag = grid.magnitudes.size();
    for (std::size_t d = 0; d < grid.directions.size(); ++d) {
      std::vector<std::pair<double, double>> final_samples;
      for (std::size_t k = 0; k < nmag; ++k) {
        const auto& m = swp.modes[d * nmag + k];
        if (!m.error.empty()) continue;
        final_samples.emplace_back(m.bracket_xi, m.uhat_envelope);
      }
      try {
        WellposednessVerdict v =
            wellposedness_verdict(init_fit, final_samples, s_test, gs.s_sup, false);
        verdicts.push_back({{"direction", static_cast<int>(d)},
                            {"verdict", verdict_name(v.verdict)},
                            {"pass", v.pass},
                            {"note", v.note},
                            {"fit", fit_to_json(v.fit)}});
        add_fit_row(fit_table, "final_dir" + std::to_string(d), v.fit);
        if (v.certifies && !v.pass) gevrey_ok = false;
      } catch (const std::exception& e) {
        failures.push_back(std::string("gevrey verdict: ") + e.what());
        gevrey_ok = false;
      }
    }
    report["gevrey_verdicts"] = verdicts;
    if (!gevrey_ok) failures.push_back("gevrey: preservation verdict failed");
  }

  // ---- ultradistribution growth check (optional) ---------------------------
  if (cfg.get_int("energy.ultra", 0) != 0) {
    json ultra;
    if (!std::isfinite(gs.s_sup)) {
      ultra["note"] = "s_sup is infinite; endpoint growth check not applicable";
    } else {
      std::vector<double> ladder = cfg.get_doubles("energy.kappa_ladder");
      if (ladder.empty()) ladder = {1.0, 4.0, 16.0, 64.0, 256.0};
      InitialData gdata = synthesized_data(spec.m, gs.s_sup, data_delta, true);
      double kappa_min = std::numeric_limits<double>::infinity();
      json attempts = json::array();
      for (double k : ladder) {
        EnergyParams pk = params;
        pk.s = gs.s_sup;
        pk.kappa = k;
        pk.rho0 = auto_rho0(k, mr.t_end, data_delta, delta1);
        SweepReport s2 = sweep(spec, gdata, pk, mr, grid, opts, workers);
        std::vector<std::pair<double, double>> fin;
        std::size_t nmag = grid.magnitudes.size();
        for (std::size_t i = 0; i < nmag; ++i) {
          const auto& m = s2.modes[i];
          if (m.error.empty()) fin.emplace_back(m.bracket_xi, m.uhat_envelope);
        }
        bool pass = false;
        json att = {{"kappa", json_double(k)},
                    {"threshold_found", s2.monotonicity.threshold_found}};
        try {
          WellposednessVerdict v = wellposedness_verdict(DecayFit{}, fin, gs.s_sup, gs.s_sup, true);
          att["verdict"] = verdict_name(v.verdict);
          att["fit"] = fit_to_json(v.fit);
          pass = v.pass && s2.monotonicity.threshold_found;
          if (pass) add_fit_row(fit_table, "ultra_kappa" + format_double(k), v.fit);
        } catch (const std::exception& e) {
          att["error"] = e.what();
        }
        att["pass"] = pass;
        attempts.push_back(att);
        if (pass) {
          kappa_min = k;
          break;
        }
      }
      ultra["attempts"] = attempts;
      ultra["kappa_min"] = json_double(kappa_min);
      if (!std::isfinite(kappa_min))
        failures.push_back("ultra: no kappa in the ladder certifies the growth bound");
    }
    report["ultra"] = ultra;
  }

  // ---- tables ------------------------------------------------------------
  CsvTable mode_table({"index", "xi_norm", "bracket_xi", "direction", "bracket_max",
                       "above_threshold", "monotone", "worst_excursion", "gated_vacuous",
                       "bound_log_c_ge1", "bound_log_c_lt1", "uhat_abs_final", "uhat_envelope",
                       "steps_accepted", "max_local_error", "error"});
  {
    std::size_t nmag = grid.magnitudes.size();
    for (std::size_t i = 0; i < swp.modes.size(); ++i) {
      const auto& m = swp.modes[i];
      bool above = swp.monotonicity.threshold_found &&
                   m.bracket_xi >= swp.monotonicity.Xi0;
      mode_table.add_row(
          {std::to_string(i), format_double(m.xi.norm()), format_double(m.bracket_xi),
           std::to_string(i / nmag), format_double(m.mono.bracket_max),
           above ? "1" : "0", m.mono.monotone ? "1" : "0",
           format_double(m.mono.worst_excursion), m.mono.gated_vacuous ? "1" : "0",
           format_double(m.bound.log_c_ge1), format_double(m.bound.log_c_lt1),
           format_double(std::abs(m.uhat_final)), format_double(m.uhat_envelope),
           std::to_string(m.traj.stats.accepted),
           format_double(m.traj.stats.max_local_error), m.error});
    }
  }
  write_text_file(out_dir + "/modes.csv", mode_table.to_string());
  write_text_file(out_dir + "/rates.csv", rate_table.to_string());
  write_text_file(out_dir + "/fits.csv", fit_table.to_string());

  return finish(true);
}

} // namespace wheq
