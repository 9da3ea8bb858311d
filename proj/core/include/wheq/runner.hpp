#pragma once

#include "wheq/config.hpp"

#include <string>
#include <vector>

namespace wheq {

struct RunResult {
  int exit_code = 0;
  std::string report_path;
  std::vector<std::string> failures;
};

// Executes classify -> mollify-verify -> symmetrizer self-tests -> sweep ->
// energy certifications -> Gevrey verdicts, writes report.json and the flat
// tables into output.dir. Exit code 0 iff every enabled certification passes.
RunResult run(const RunConfig& cfg);

} // namespace wheq
