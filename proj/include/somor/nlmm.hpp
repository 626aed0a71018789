#pragma once

#include <optional>
#include <string>
#include <vector>

#include "somor/basis.hpp"
#include "somor/instrumentation.hpp"
#include "somor/model.hpp"
#include "somor/newton.hpp"
#include "somor/siggen.hpp"

namespace somor {

enum class InitialGuess { zero_sg_solution, linearized_krylov, previous_snapshot, previous_shift, user };

const char* to_string(InitialGuess g);
InitialGuess initial_guess_from_string(const std::string& s);

struct NlmmConfig {
  NewtonConfig newton;
  InitialGuess initial_guess = InitialGuess::previous_snapshot;
  bool orthogonalize_inline = false;
  bool deflate = true;
  DeflationMode deflation;
  VectorXd linearization_point;        // q_eq for linearized guesses; empty means 0
  std::vector<VectorXd> user_guesses;  // indexed i*K + k
};

/// One time-snapshot (t*_k, q, q̇, q̈, F) of column i.
struct Snapshot {
  double t = 0.0;
  double q = 0.0, qd = 0.0, qdd = 0.0;
  VectorXd F;
};

Snapshot snapshot_at(const GeneratorTrajectory& tr, std::size_t k);

struct ColumnSolve {
  VectorXd v;
  NewtonReport report;
};

/// Solves M v q̈ + D v q̇ + f(v q) − B F = 0 for v.
ColumnSolve nlmm_column(const NonlinearSecondOrderSystem& sys, const Snapshot& snap,
                        const VectorXd& v0, const NlmmConfig& cfg = {});

/// Solves f(v q0) = B r q0 for v.
ColumnSolve nlmm_column_zero_sg(const NonlinearSecondOrderSystem& sys, const VectorXd& r_i,
                                double q0_i, const VectorXd& v0, const NlmmConfig& cfg = {});

struct GuessContext {
  const NonlinearSecondOrderSystem* sys = nullptr;
  const Snapshot* snapshot = nullptr;
  const VectorXd* previous_snapshot = nullptr;  // v_{i,k−1}
  const VectorXd* previous_shift = nullptr;     // v_{i−1,K}
  const VectorXd* user = nullptr;
  VectorXd linearization_point;
  NewtonConfig newton;
};

struct Guess {
  VectorXd v0;
  InitialGuess used = InitialGuess::linearized_krylov;
  bool fell_back = false;
};

/// Initial guess for one column solve. Missing context falls back to
/// linearized_krylov: (q̈ M + q̇ D + q K) v0 = B F with K = J_f(q_eq).
Guess initial_guess(InitialGuess strategy, const GuessContext& ctx);

struct NlmmResult {
  OrthonormalBasis basis;
  std::vector<NewtonReport> reports;        // one per (i,k), in loop order
  std::vector<std::string> skipped;         // non-converged or rejected snapshots
  std::vector<InitialGuess> guesses_used;
  instrumentation::Counters cost;           // work done inside build_basis
  std::vector<double> coupled_residual;     // per snapshot of the stacked system; diagnostic only
  std::size_t planned_solves = 0;           // r·K
};

/// Column-wise Newton solves over every snapshot of every trajectory,
/// optional inline Gram-Schmidt, then optional SVD deflation.
NlmmResult build_basis(const NonlinearSecondOrderSystem& sys,
                       const std::vector<GeneratorTrajectory>& trajectories,
                       const NlmmConfig& cfg = {});

}  // namespace somor
