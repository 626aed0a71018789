#pragma once

#include <optional>
#include <string>
#include <vector>

#include "somor/chain.hpp"
#include "somor/mmio.hpp"
#include "somor/nlmm.hpp"
#include "somor/timeint.hpp"

namespace somor {

struct ModelSpec {
  enum class Kind { chain, matrix_market };
  Kind kind = Kind::chain;
  DuffingChainSpec chain;
  LinearSystemPaths files;
};

/// Training signal generator for SO-NLMM.
///
/// prescribed-sinusoid: one column per frequency, q_i = a sin(ω_i t) and
/// F = force_gain·q_i on every input. linear: one column per real shift σ_i,
/// direction r_i = 1 on every input. zero: one column per q0 value.
struct GeneratorSpec {
  enum class Kind { prescribed_sinusoid, linear, zero };
  Kind kind = Kind::prescribed_sinusoid;
  double amplitude = 1.0;
  std::vector<double> frequencies{10.0};  // [rad/s]
  double force_gain = 1.0;                // [N]
  std::vector<double> shifts;             // [1/s]
  std::vector<double> q0{1.0};
  double window_start = 0.0, window_end = 1.0;  // [s]
  std::size_t snapshots = 10;
};

/// F(t) = amplitude·sin(frequency·t) on every input.
struct SineInput {
  double amplitude = 1.0;  // [N]
  double frequency = 1.0;  // [rad/s]
  double duration = 1.0;   // [s]
};

struct RunManifest {
  std::string source;    // file the manifest was read from, if any
  std::string base_dir;  // relative paths resolve against this
  ModelSpec model;
  GeneratorSpec generator;
  NlmmConfig nlmm;
  Eigen::Index nlmm_rank = 10;
  Eigen::Index pod_rank = 10;
  int pod_stride = 1;
  Eigen::Index modal_rank = 10;
  std::vector<double> krylov_shifts;  // empty: generator shifts
  GeneralizedAlphaConfig integrator;
  SineInput training{1.0, 10.0, 1.0};
  SineInput test{1.0, 31.0, 1.0};
  double discard_fraction = 0.0;
  std::vector<std::string> methods{"nlmm", "pod", "modal"};
  std::uint64_t seed = 1;
  std::string output_dir = "results";
  bool export_rom = false;
  bool rho_inf_given = false;  // false when the integrator default was used

  /// Cross-field checks: referenced files exist, ranks ≥ 1, known methods.
  void validate() const;
};

/// Parses the text of a manifest. Errors are ParseError with line numbers.
RunManifest parse_manifest(const std::string& text, const std::string& base_dir = ".",
                           const std::string& source = "<string>");
RunManifest load_manifest(const std::string& path);

}  // namespace somor
