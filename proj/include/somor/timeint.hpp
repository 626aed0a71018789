#pragma once

#include <functional>
#include <string>
#include <vector>

#include "somor/model.hpp"
#include "somor/newton.hpp"
#include "somor/reduce.hpp"

namespace somor {

/// Generalized-α parameters from the spectral radius at infinity:
/// α_m = (2ρ−1)/(ρ+1), α_f = ρ/(ρ+1), γ = ½ − α_m + α_f, β = ¼(1 − α_m + α_f)².
struct GeneralizedAlphaConfig {
  double rho_inf = 0.9;
  double h = 1e-3;  // [s]
  double newton_tol = 1e-10;
  int newton_max_iter = 25;

  double alpha_m() const { return (2.0 * rho_inf - 1.0) / (rho_inf + 1.0); }
  double alpha_f() const { return rho_inf / (rho_inf + 1.0); }
  double gamma() const { return 0.5 - alpha_m() + alpha_f(); }
  double beta() const {
    const double a = 1.0 - alpha_m() + alpha_f();
    return 0.25 * a * a;
  }
  void validate() const;
};

using InputFn = std::function<VectorXd(double)>;

/// Uniformly sampled solution. Column j of Q/Qd/Qdd/Y belongs to times[j].
struct Trajectory {
  std::vector<double> times;
  MatrixXd Q, Qd, Qdd, Y;
  std::string system_tag, input_tag;

  std::size_t size() const { return times.size(); }
};

Trajectory integrate(const LinearSecondOrderSystem& sys, const InputFn& F, const VectorXd& q0,
                     const VectorXd& qd0, double T, const GeneralizedAlphaConfig& cfg = {});
Trajectory integrate(const NonlinearSecondOrderSystem& sys, const InputFn& F, const VectorXd& q0,
                     const VectorXd& qd0, double T, const GeneralizedAlphaConfig& cfg = {});
Trajectory integrate(const ReducedSecondOrderModel& rom, const InputFn& F, const VectorXd& q0,
                     const VectorXd& qd0, double T, const GeneralizedAlphaConfig& cfg = {});

enum class EquilibriumStart { linearized, zero };

struct EquilibriumResult {
  VectorXd q;
  NewtonReport report;
};

/// Solves f(q∞) = B F_const by damped Newton. Throws ConvergenceError with the
/// residual history on failure.
EquilibriumResult static_equilibrium(const NonlinearSecondOrderSystem& sys, const VectorXd& F_const,
                                     EquilibriumStart start = EquilibriumStart::linearized,
                                     NewtonConfig cfg = {});

struct SteadyStateError {
  std::vector<double> times;
  std::vector<double> abs_error;      // |y(t) − y_r(t)|
  std::vector<double> relative;       // |y(t) − y_r(t)| / ‖y‖_L2
  double relative_l2 = 0.0;           // ‖y − y_r‖_L2 / ‖y‖_L2
  double max_abs_error = 0.0;
  double max_abs_output = 0.0;
};

/// Output error between two trajectories on the same grid. The first
/// `discard_fraction` of samples is dropped before measuring.
SteadyStateError steady_state_error(const Trajectory& fom, const Trajectory& rom,
                                    double discard_fraction = 0.0);

}  // namespace somor
