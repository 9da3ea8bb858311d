#pragma once

#include "wheq/config.hpp"
#include "wheq/problem.hpp"
#include "wheq/reduction.hpp"

#include <string>
#include <vector>

namespace wheq {

// Named time-coefficient registry. Descriptors are "name k=v ...":
//   constant        v
//   t_power         p scale
//   abs_kink        c p scale offset      offset + scale |t-c|^p
//   smooth_step     c w lo hi             tanh ramp from lo to hi around c
//   kink_sq         a b c p               (a + b |t-c|^p)^2
//   poly_plus_kink  q offset scale c p    t^q + offset + scale |t-c|^p
//   poly_times_kink q offset scale c p    t^q (offset + scale |t-c|^p)
// Every atom accepts mult=<v> multiplying the whole value.
CoefficientFunction make_coefficient(const std::string& descriptor);

std::vector<std::string> scenario_names();

// Complete RunConfig for a built-in scenario (example1, example2, case3).
RunConfig scenario_config(const std::string& name);

// [spec] section -> ProblemSpec. Coefficient keys look like
// principal.<j>.<g1,g2,...> with |gamma| components comma-separated.
ProblemSpec build_problem(const RunConfig& cfg);

// Synthesized initial data at order s with rate delta; every component ghat_k
// carries the same magnitude law (growth = true for ultradistribution runs).
InitialData synthesized_data(int m, double s, double delta, bool growth);

} // namespace wheq
