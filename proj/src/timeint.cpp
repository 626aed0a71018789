#include "somor/timeint.hpp"

#include <cmath>
#include <optional>

#include "somor/instrumentation.hpp"

namespace somor {

void GeneralizedAlphaConfig::validate() const {
  if (!(rho_inf >= 0.0 && rho_inf <= 1.0)) throw ArgumentError("rho_inf must lie in [0, 1]");
  if (!(h > 0.0)) throw ArgumentError("step size must be positive");
  if (!(newton_tol > 0.0) || newton_max_iter < 1) throw ArgumentError("invalid inner Newton settings");
}

namespace {

struct Dynamics {
  const MatrixXd& M;
  const MatrixXd& D;
  const MatrixXd& B;
  const MatrixXd& C;
  std::function<VectorXd(const VectorXd&)> force;
  std::function<MatrixXd(const VectorXd&)> jacobian;
  const MatrixXd* K = nullptr;  // set for linear dynamics
  bool full_order = true;
  std::string tag;
};

Trajectory run(const Dynamics& dyn, const InputFn& F, const VectorXd& q0, const VectorXd& qd0, double T,
               const GeneralizedAlphaConfig& cfg) {
  cfg.validate();
  const auto n = dyn.M.rows();
  if (q0.size() != n || qd0.size() != n) throw ArgumentError("initial conditions have wrong length");
  if (!(T >= 0.0)) throw ArgumentError("horizon must be nonnegative");
  const auto steps = static_cast<std::size_t>(std::llround(T / cfg.h));
  const double h = cfg.h;
  const double am = cfg.alpha_m(), af = cfg.alpha_f(), ga = cfg.gamma(), be = cfg.beta();

  auto input = [&](double t) -> VectorXd {
    VectorXd u = F(t);
    if (u.size() != dyn.B.cols()) throw ArgumentError("input has wrong length");
    return u;
  };

  Trajectory tr;
  tr.system_tag = dyn.tag;
  tr.times.resize(steps + 1);
  tr.Q.resize(n, static_cast<Eigen::Index>(steps + 1));
  tr.Qd.resize(n, tr.Q.cols());
  tr.Qdd.resize(n, tr.Q.cols());

  VectorXd q = q0, v = qd0;
  VectorXd f_n = dyn.force(q);
  VectorXd F_n = input(0.0);
  const RealFactorization mass(dyn.M, "mass matrix");
  VectorXd a = mass.solve(dyn.B * F_n - dyn.D * v - f_n);

  const double cm = (1.0 - am) / (be * h * h);
  const double cd = (1.0 - af) * ga / (be * h);
  std::optional<RealFactorization> linear_tangent;
  if (dyn.K) linear_tangent.emplace(cm * dyn.M + cd * dyn.D + (1.0 - af) * *dyn.K, "effective tangent");

  auto& counters = instrumentation::counters();
  auto store = [&](std::size_t k) {
    const auto c = static_cast<Eigen::Index>(k);
    tr.times[k] = static_cast<double>(k) * h;
    tr.Q.col(c) = q;
    tr.Qd.col(c) = v;
    tr.Qdd.col(c) = a;
  };
  store(0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t1 = static_cast<double>(k + 1) * h;
    const VectorXd F_1 = input(t1);
    const VectorXd load = dyn.B * ((1.0 - af) * F_1 + af * F_n);
    const VectorXd q_base = q + h * v + h * h * (0.5 - be) * a;  // q_{n+1} when a_{n+1} = 0
    VectorXd q1 = q_base;
    VectorXd a1, v1, f_1;
    auto kinematics = [&]() {
      a1 = (q1 - q_base) / (be * h * h);
      v1 = v + h * ((1.0 - ga) * a + ga * a1);
    };
    bool converged = false;
    for (int it = 0; it <= cfg.newton_max_iter; ++it) {
      kinematics();
      f_1 = dyn.force(q1);
      const VectorXd inertia = dyn.M * ((1.0 - am) * a1 + am * a);
      const VectorXd damping = dyn.D * ((1.0 - af) * v1 + af * v);
      const VectorXd R = inertia + damping + (1.0 - af) * f_1 + af * f_n - load;
      const double ref = load.norm() + inertia.norm() + damping.norm() + f_1.norm() + f_n.norm();
      const double rn = R.norm();
      if (!std::isfinite(rn)) throw ConvergenceError("divergence: non-finite residual at step " + std::to_string(k + 1));
      if (rn <= cfg.newton_tol * ref || rn == 0.0) {
        converged = true;
        break;
      }
      if (it == cfg.newton_max_iter) break;
      VectorXd dq;
      if (linear_tangent) {
        dq = linear_tangent->solve(-R);
      } else {
        const MatrixXd Kt = cm * dyn.M + cd * dyn.D + (1.0 - af) * dyn.jacobian(q1);
        dq = RealFactorization(Kt, "effective tangent").solve(-R);
      }
      q1 += dq;
      if (dq.norm() <= 1e-15 * (1.0 + q1.norm())) {
        kinematics();
        f_1 = dyn.force(q1);
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw ConvergenceError("inner Newton failed at step " + std::to_string(k + 1) + " (t=" +
                             std::to_string(t1) + ")");
    }
    if (!q1.allFinite() || !v1.allFinite()) {
      throw ConvergenceError("divergence: non-finite state at step " + std::to_string(k + 1));
    }
    q = std::move(q1);
    v = std::move(v1);
    a = std::move(a1);
    f_n = std::move(f_1);
    F_n = F_1;
    store(k + 1);
    if (dyn.full_order) {
      ++counters.full_order_steps;
    } else {
      ++counters.reduced_steps;
    }
  }
  tr.Y = dyn.C * tr.Q;
  return tr;
}

}  // namespace

Trajectory integrate(const LinearSecondOrderSystem& sys, const InputFn& F, const VectorXd& q0,
                     const VectorXd& qd0, double T, const GeneralizedAlphaConfig& cfg) {
  const MatrixXd& K = sys.K;
  Dynamics dyn{sys.M, sys.D, sys.B, sys.C, [&K](const VectorXd& q) -> VectorXd { return K * q; },
               [&K](const VectorXd&) -> MatrixXd { return K; }, &sys.K, true, "linear-fom"};
  return run(dyn, F, q0, qd0, T, cfg);
}

Trajectory integrate(const NonlinearSecondOrderSystem& sys, const InputFn& F, const VectorXd& q0,
                     const VectorXd& qd0, double T, const GeneralizedAlphaConfig& cfg) {
  Dynamics dyn{sys.M(), sys.D(), sys.B(), sys.C(),
               [&sys](const VectorXd& q) { return eval_force(sys, q); },
               [&sys](const VectorXd& q) { return eval_jacobian(sys, q); }, nullptr, true, sys.tag()};
  return run(dyn, F, q0, qd0, T, cfg);
}

Trajectory integrate(const ReducedSecondOrderModel& rom, const InputFn& F, const VectorXd& q0,
                     const VectorXd& qd0, double T, const GeneralizedAlphaConfig& cfg) {
  Dynamics dyn{rom.M_r, rom.D_r, rom.B_r, rom.C_r, rom.force, rom.jacobian,
               rom.K_r ? &*rom.K_r : nullptr, false, rom.tag};
  return run(dyn, F, q0, qd0, T, cfg);
}

EquilibriumResult static_equilibrium(const NonlinearSecondOrderSystem& sys, const VectorXd& F_const,
                                     EquilibriumStart start, NewtonConfig cfg) {
  if (F_const.size() != sys.m()) throw ArgumentError("constant input has wrong length");
  const VectorXd BF = sys.B() * F_const;
  VectorXd q0 = VectorXd::Zero(sys.n());
  if (start == EquilibriumStart::linearized) {
    q0 = RealFactorization(eval_jacobian(sys, q0), "K(0)").solve(BF);
  }
  auto res = newton_solve([&](const VectorXd& q) -> VectorXd { return eval_force(sys, q) - BF; },
                          [&](const VectorXd& q) { return eval_jacobian(sys, q); }, q0, cfg, BF.norm());
  if (!res.report.converged) {
    std::string hist;
    for (double r : res.report.history) hist += " " + std::to_string(r);
    throw ConvergenceError("static equilibrium did not converge; residual history:" + hist);
  }
  return {std::move(res.v), std::move(res.report)};
}

SteadyStateError steady_state_error(const Trajectory& fom, const Trajectory& rom, double discard_fraction) {
  if (fom.times.size() != rom.times.size() || fom.Y.rows() != rom.Y.rows() ||
      fom.Y.cols() != rom.Y.cols()) {
    throw ArgumentError("steady_state_error: time grids or output dimensions differ");
  }
  for (std::size_t k = 0; k < fom.times.size(); ++k) {
    if (std::abs(fom.times[k] - rom.times[k]) > 1e-12 * (1.0 + std::abs(fom.times[k]))) {
      throw ArgumentError("steady_state_error: time grids differ");
    }
  }
  if (!(discard_fraction >= 0.0 && discard_fraction < 1.0)) {
    throw ArgumentError("discard_fraction must lie in [0, 1)");
  }
  const auto N = fom.times.size();
  const auto first = static_cast<std::size_t>(std::floor(discard_fraction * static_cast<double>(N)));
  SteadyStateError out;
  std::vector<double> ynorm;
  for (std::size_t k = first; k < N; ++k) {
    const auto c = static_cast<Eigen::Index>(k);
    out.times.push_back(fom.times[k]);
    out.abs_error.push_back((fom.Y.col(c) - rom.Y.col(c)).norm());
    ynorm.push_back(fom.Y.col(c).norm());
  }
  auto trapezoid_sq = [&](const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t k = 1; k < x.size(); ++k) {
      s += 0.5 * (out.times[k] - out.times[k - 1]) * (x[k] * x[k] + x[k - 1] * x[k - 1]);
    }
    return std::sqrt(s);
  };
  const double y_l2 = trapezoid_sq(ynorm);
  const double e_l2 = trapezoid_sq(out.abs_error);
  for (std::size_t k = 0; k < out.abs_error.size(); ++k) {
    out.relative.push_back(y_l2 > 0.0 ? out.abs_error[k] / y_l2 : (out.abs_error[k] == 0.0 ? 0.0 : INFINITY));
    out.max_abs_error = std::max(out.max_abs_error, out.abs_error[k]);
    out.max_abs_output = std::max(out.max_abs_output, ynorm[k]);
  }
  out.relative_l2 = y_l2 > 0.0 ? e_l2 / y_l2 : (e_l2 == 0.0 ? 0.0 : INFINITY);
  return out;
}

}  // namespace somor
