#pragma once

#include <optional>
#include <string>
#include <vector>

#include "somor/baselines.hpp"
#include "somor/manifest.hpp"
#include "somor/reduce.hpp"

namespace somor {

NonlinearSecondOrderSystem build_model(const ModelSpec& spec);

/// amplitude·sin(frequency·t) on every input channel.
InputFn sine_input(const SineInput& in, Eigen::Index m);

/// Generator trajectories sampled on the manifest's snapshot grid.
std::vector<GeneratorTrajectory> generator_trajectories(const GeneratorSpec& g, Eigen::Index m);

struct MethodBasis {
  std::string method;
  OrthonormalBasis basis;
  instrumentation::Counters cost;  // work on the calling thread while building
  double seconds = 0.0;
  std::size_t planned_solves = 0;  // r·K for nlmm
  std::vector<double> coupled_residual;
  std::optional<MatrixXd> training_snapshots;  // pod only
};

/// One of nlmm, pod, modal, krylov, identity.
MethodBasis build_method_basis(const RunManifest& manifest, const NonlinearSecondOrderSystem& sys,
                               const std::string& method);

/// max_t ‖f(q) − K₀q‖ / max_t ‖K₀q‖ over the columns of Q, K₀ = J_f(0).
double nonlinear_force_ratio(const NonlinearSecondOrderSystem& sys, const MatrixXd& Q);

struct MethodOutcome {
  MethodBasis basis;
  ReducedSecondOrderModel rom;
  Trajectory trajectory;
  SteadyStateError error;
};

struct ReportBundle {
  std::string out_dir;
  Trajectory fom;
  std::vector<MethodOutcome> methods;
  std::vector<std::string> files;  // written, relative to out_dir
  std::vector<std::string> flags;  // caveats repeated in report.txt
  double nonlinear_ratio = 0.0;
  std::string nonlinear_ratio_source;

  const MethodOutcome* find(const std::string& method) const;
};

/// Worker count for independent ROM integrations: SOMOR_THREADS if set,
/// otherwise the hardware concurrency.
unsigned worker_count();

/// Builds every basis, reduces, integrates FOM and ROMs under the test input
/// and writes the report bundle. On failure the files written so far stay,
/// a FAILED marker is added and the exception propagates.
ReportBundle run_experiment(const RunManifest& manifest, const std::optional<std::string>& out_dir = {});

/// basis.csv plus basis_meta.txt in `dir`.
void save_basis(const std::string& dir, const MethodBasis& mb, const RunManifest& manifest);

/// M_r, D_r, K_r (linear only), B_r, C_r and V as Matrix Market files.
void export_rom(const std::string& dir, const ReducedSecondOrderModel& rom);

}  // namespace somor
