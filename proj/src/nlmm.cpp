#include "somor/nlmm.hpp"

#include <cmath>

namespace somor {

namespace {

constexpr double kDegenerateSnapshot = 1e-12;

VectorXd q_eq_or_zero(const VectorXd& q_eq, Eigen::Index n) {
  return q_eq.size() ? q_eq : VectorXd::Zero(n);
}

std::string label(std::size_t i, std::size_t k) {
  return "i=" + std::to_string(i) + " k=" + std::to_string(k);
}

}  // namespace

const char* to_string(InitialGuess g) {
  switch (g) {
    case InitialGuess::zero_sg_solution: return "zero_sg_solution";
    case InitialGuess::linearized_krylov: return "linearized_krylov";
    case InitialGuess::previous_snapshot: return "previous_snapshot";
    case InitialGuess::previous_shift: return "previous_shift";
    case InitialGuess::user: return "user";
  }
  return "?";
}

InitialGuess initial_guess_from_string(const std::string& s) {
  for (auto g : {InitialGuess::zero_sg_solution, InitialGuess::linearized_krylov,
                 InitialGuess::previous_snapshot, InitialGuess::previous_shift, InitialGuess::user}) {
    if (s == to_string(g)) return g;
  }
  throw ArgumentError("unknown initial guess strategy '" + s + "'");
}

Snapshot snapshot_at(const GeneratorTrajectory& tr, std::size_t k) {
  if (k >= tr.size()) throw ArgumentError("snapshot index out of range");
  if (tr.is_complex) throw UnsupportedError("NLMM needs real trajectories; complex shift given");
  return {tr.times[k], tr.q[k], tr.qd[k], tr.qdd[k], tr.F[k]};
}

ColumnSolve nlmm_column(const NonlinearSecondOrderSystem& sys, const Snapshot& snap,
                        const VectorXd& v0, const NlmmConfig& cfg) {
  if (!std::isfinite(snap.q) || !std::isfinite(snap.qd) || !std::isfinite(snap.qdd) || !snap.F.allFinite()) {
    throw ArgumentError("snapshot values must be finite");
  }
  if (std::abs(snap.q) <= kDegenerateSnapshot) {
    throw ArgumentError("degenerate snapshot at t=" + std::to_string(snap.t) +
                        ": q_r is zero, so the residual does not depend on v nonlinearly; "
                        "shift the snapshot grid");
  }
  if (snap.F.size() != sys.m()) throw ArgumentError("snapshot input has wrong length");
  if (v0.size() != sys.n()) throw ArgumentError("initial guess has wrong length");
  const VectorXd BF = sys.B() * snap.F;
  const MatrixXd linear_part = snap.qdd * sys.M() + snap.qd * sys.D();
  const double q = snap.q;
  auto residual = [&](const VectorXd& v) -> VectorXd {
    return linear_part * v + eval_force(sys, v * q) - BF;
  };
  auto jacobian = [&](const VectorXd& v) -> MatrixXd {
    return linear_part + eval_jacobian(sys, v * q) * q;
  };
  auto res = newton_solve(residual, jacobian, v0, cfg.newton, BF.norm());
  return {std::move(res.v), std::move(res.report)};
}

ColumnSolve nlmm_column_zero_sg(const NonlinearSecondOrderSystem& sys, const VectorXd& r_i,
                                double q0_i, const VectorXd& v0, const NlmmConfig& cfg) {
  if (q0_i == 0.0) throw ArgumentError("degenerate excitation: q0 is zero");
  if (r_i.size() != sys.m()) throw ArgumentError("direction has wrong length");
  return nlmm_column(sys, Snapshot{0.0, q0_i, 0.0, 0.0, r_i * q0_i}, v0, cfg);
}

Guess initial_guess(InitialGuess strategy, const GuessContext& ctx) {
  if (!ctx.sys || !ctx.snapshot) throw ArgumentError("initial_guess needs a system and a snapshot");
  const auto& sys = *ctx.sys;
  const auto& snap = *ctx.snapshot;
  auto linearized = [&]() -> VectorXd {
    const MatrixXd K = eval_jacobian(sys, q_eq_or_zero(ctx.linearization_point, sys.n()));
    const MatrixXd A = snap.qdd * sys.M() + snap.qd * sys.D() + snap.q * K;
    return RealFactorization(A, "linearized snapshot operator").solve(sys.B() * snap.F);
  };
  Guess g;
  g.used = strategy;
  switch (strategy) {
    case InitialGuess::previous_snapshot:
      if (ctx.previous_snapshot) {
        g.v0 = *ctx.previous_snapshot;
        return g;
      }
      break;
    case InitialGuess::previous_shift:
      if (ctx.previous_shift) {
        g.v0 = *ctx.previous_shift;
        return g;
      }
      break;
    case InitialGuess::user:
      if (ctx.user && ctx.user->size() == sys.n()) {
        g.v0 = *ctx.user;
        return g;
      }
      break;
    case InitialGuess::zero_sg_solution: {
      // static counterpart f(v q) = B F of the current snapshot
      NlmmConfig cfg;
      cfg.newton = ctx.newton;
      Snapshot stat{snap.t, snap.q, 0.0, 0.0, snap.F};
      auto sol = nlmm_column(sys, stat, linearized(), cfg);
      if (sol.report.converged) {
        g.v0 = std::move(sol.v);
        return g;
      }
      break;
    }
    case InitialGuess::linearized_krylov:
      g.v0 = linearized();
      return g;
  }
  g.used = InitialGuess::linearized_krylov;
  g.fell_back = true;
  g.v0 = linearized();
  return g;
}

NlmmResult build_basis(const NonlinearSecondOrderSystem& sys,
                       const std::vector<GeneratorTrajectory>& trajectories, const NlmmConfig& cfg) {
  if (trajectories.empty()) throw ArgumentError("build_basis needs at least one trajectory");
  for (const auto& tr : trajectories) tr.check();
  const auto before = instrumentation::counters();

  NlmmResult out;
  MatrixXd raw(sys.n(), 0);
  MatrixXd inline_basis(sys.n(), 0);
  std::vector<std::string> provenance;
  std::optional<VectorXd> last_of_previous_column;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const auto& tr = trajectories[i];
    out.planned_solves += tr.size();
    std::optional<VectorXd> previous;
    for (std::size_t k = 0; k < tr.size(); ++k) {
      const Snapshot snap = snapshot_at(tr, k);
      if (std::abs(snap.q) <= kDegenerateSnapshot) {
        out.skipped.push_back(label(i, k) + ": degenerate snapshot (q_r = 0)");
        previous.reset();
        continue;
      }
      GuessContext ctx;
      ctx.sys = &sys;
      ctx.snapshot = &snap;
      ctx.previous_snapshot = previous ? &*previous : nullptr;
      ctx.previous_shift = last_of_previous_column ? &*last_of_previous_column : nullptr;
      const std::size_t flat = out.planned_solves - tr.size() + k;
      ctx.user = flat < cfg.user_guesses.size() ? &cfg.user_guesses[flat] : nullptr;
      ctx.linearization_point = cfg.linearization_point;
      ctx.newton = cfg.newton;
      Guess guess = initial_guess(cfg.initial_guess, ctx);
      out.guesses_used.push_back(guess.used);

      ColumnSolve sol;
      try {
        sol = nlmm_column(sys, snap, guess.v0, cfg);
      } catch (const SingularityError& e) {
        out.reports.push_back(NewtonReport{});
        out.skipped.push_back(label(i, k) + ": " + e.what());
        previous.reset();
        continue;
      }
      out.reports.push_back(sol.report);
      if (!sol.report.converged) {
        out.skipped.push_back(label(i, k) + ": Newton did not converge (residual " +
                              std::to_string(sol.report.residual) + ")");
        previous.reset();
        continue;
      }
      raw.conservativeResize(sys.n(), raw.cols() + 1);
      raw.col(raw.cols() - 1) = sol.v;
      provenance.push_back(tr.kind + " " + label(i, k) + " t=" + std::to_string(snap.t));
      if (cfg.orthogonalize_inline) gram_schmidt_append(inline_basis, sol.v);
      previous = sol.v;
    }
    last_of_previous_column = previous;
  }

  // Stacked-system residual at each shared snapshot time (diagnostic).
  bool shared_times = true;
  for (const auto& tr : trajectories) shared_times = shared_times && tr.times == trajectories.front().times;
  if (shared_times && raw.cols() == static_cast<Eigen::Index>(out.planned_solves)) {
    const std::size_t K = trajectories.front().size();
    for (std::size_t k = 0; k < K; ++k) {
      VectorXd Vq = VectorXd::Zero(sys.n()), Vqd = Vq, Vqdd = Vq;
      VectorXd F = VectorXd::Zero(sys.m());
      for (std::size_t i = 0; i < trajectories.size(); ++i) {
        const auto& tr = trajectories[i];
        const VectorXd v = raw.col(static_cast<Eigen::Index>(i * K + k));
        Vq += v * tr.q[k];
        Vqd += v * tr.qd[k];
        Vqdd += v * tr.qdd[k];
        F += tr.F[k];
      }
      const VectorXd BF = sys.B() * F;
      const VectorXd res = sys.M() * Vqdd + sys.D() * Vqd + eval_force(sys, Vq) - BF;
      out.coupled_residual.push_back(res.norm() / (1.0 + BF.norm()));
    }
  }

  if (raw.cols() == 0) throw ConvergenceError("build_basis: every column solve failed; basis is empty");
  if (cfg.deflate) {
    out.basis = svd_deflate(cfg.orthogonalize_inline ? inline_basis : raw, cfg.deflation);
    out.basis.raw = raw;
    if (cfg.deflation.kind == DeflationMode::Kind::fixed && out.basis.rank() < cfg.deflation.r_defl) {
      out.basis.warnings.push_back("achieved rank " + std::to_string(out.basis.rank()) +
                                   " is below the requested " + std::to_string(cfg.deflation.r_defl));
    }
  } else if (cfg.orthogonalize_inline) {
    out.basis.V = inline_basis;
    out.basis.raw = raw;
  } else {
    out.basis = orthonormalize_columns(raw, provenance, "nlmm");
  }
  out.basis.method = "nlmm";
  out.basis.raw_provenance = provenance;
  for (const auto& s : out.skipped) out.basis.warnings.push_back("skipped " + s);
  out.cost = instrumentation::delta(instrumentation::counters(), before);
  return out;
}

}  // namespace somor
