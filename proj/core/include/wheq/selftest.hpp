#pragma once

#include <string>
#include <vector>

namespace wheq {

struct SelftestResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Fast property suites over every module: symmetrizer closed forms against
// LU oracles, mollifier quadrature exactness, integrator order, Gevrey fit
// round-trip, config round-trip. Seeded, deterministic.
std::vector<SelftestResult> run_selftests();

// Closed forms vs oracles on `instances` random bundles per order m in
// [m_lo, m_hi]; worst relative errors reported in detail.
SelftestResult selftest_symmetrizer(int m_lo, int m_hi, int instances, unsigned seed);

} // namespace wheq
