#pragma once

#include <cstdint>

namespace somor::instrumentation {

/// Per-thread work counters. Builders snapshot them before and after a phase
/// to report offline cost.
struct Counters {
  std::uint64_t full_order_steps = 0;  // time steps on n-dimensional systems
  std::uint64_t reduced_steps = 0;     // time steps on reduced models
  std::uint64_t newton_solves = 0;     // calls to newton_solve
  std::uint64_t newton_iterations = 0;
};

Counters& counters();

inline Counters delta(const Counters& after, const Counters& before) {
  return {after.full_order_steps - before.full_order_steps, after.reduced_steps - before.reduced_steps,
          after.newton_solves - before.newton_solves, after.newton_iterations - before.newton_iterations};
}

}  // namespace somor::instrumentation
