#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "somor/model.hpp"

namespace somor {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured quantity
  double tolerance = 0.0;  // bound it was compared against
  std::string detail;
};

/// Random structural system with SPD M and K and Rayleigh damping
/// D = 0.05 M + 1e-3 K, all entries drawn from `seed`.
LinearSecondOrderSystem random_structural_system(Eigen::Index n, Eigen::Index m, Eigen::Index p,
                                                 std::uint64_t seed);

inline constexpr std::uint64_t kVerifySeed = 20240611;

/// Property suites: krylov, nlmm, integrator, or all.
std::vector<CheckResult> run_verify_suite(const std::string& suite, std::uint64_t seed = kVerifySeed);

}  // namespace somor
