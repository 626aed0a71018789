#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "somor/model.hpp"

namespace somor {

/// Fixed-free chain of point masses joined by springs with force law
/// s(δ) = k_lin δ + k_quad δ² + k_cub δ³ on the relative displacement
/// δ_j = q_j − q_{j−1} (q_0 = 0).
///
/// `cub_spread` ∈ [0, 1) scatters the cubic coefficient per spring as
/// k_cub·(1 + cub_spread·u_j), u_j uniform in [−1, 1] drawn from `seed`.
/// Explicit per-spring vectors override the scalar coefficients.
struct DuffingChainSpec {
  int n_masses = 1;
  double mass = 1.0;    // [kg]
  double k_lin = 1.0;   // [N/m]
  double k_quad = 0.0;  // [N/m²]
  double k_cub = 0.0;   // [N/m³]
  double cub_spread = 0.0;
  std::uint64_t seed = 1;
  std::vector<double> k_lin_springs, k_quad_springs, k_cub_springs;
  std::optional<RayleighSpec> rayleigh;
  int input_node = -1;   // 1-based; −1 means the tip
  int output_node = -1;  // 1-based; −1 means the tip

  void validate() const;
};

struct SpringCoefficients {
  std::vector<double> k1, k2, k3;
};

/// Per-spring coefficients after applying spread and overrides.
SpringCoefficients spring_coefficients(const DuffingChainSpec& spec);

NonlinearSecondOrderSystem build_duffing_chain(const DuffingChainSpec& spec);

/// Same chain with k_quad = k_cub = 0, as a linear system.
LinearSecondOrderSystem linear_chain(const DuffingChainSpec& spec);

}  // namespace somor
