#pragma once

#include <optional>
#include <string>
#include <utility>

#include "somor/basis.hpp"
#include "somor/model.hpp"

namespace somor {

/// M_r q̈_r + D_r q̇_r + f_r(q_r) = B_r F,  y_r = C_r q_r.
///
/// For linear sources f_r(q_r) = K_r q_r. For nonlinear sources the full
/// force is evaluated at the lifted state, f_r(q_r) = Wᵀ f(V q_r).
struct ReducedSecondOrderModel {
  MatrixXd M_r, D_r, B_r, C_r;
  std::optional<MatrixXd> K_r;
  ForceFn force;
  JacobianFn jacobian;
  MatrixXd V, W;
  std::string tag;

  Eigen::Index r() const { return M_r.rows(); }
  Eigen::Index n() const { return V.rows(); }
  bool is_linear() const { return K_r.has_value(); }

  VectorXd reduced_force(const VectorXd& q_r) const { return force(q_r); }
  MatrixXd reduced_jacobian(const VectorXd& q_r) const { return jacobian(q_r); }

  /// Reduced matrices as a linear system; UnsupportedError for nonlinear ROMs.
  LinearSecondOrderSystem as_linear() const;
  /// The ROM as a (small) nonlinear system, usable wherever a full model is.
  NonlinearSecondOrderSystem as_nonlinear() const;
};

ReducedSecondOrderModel galerkin_reduce(const LinearSecondOrderSystem& sys, const MatrixXd& V);
ReducedSecondOrderModel galerkin_reduce(const NonlinearSecondOrderSystem& sys, const MatrixXd& V);
inline ReducedSecondOrderModel galerkin_reduce(const LinearSecondOrderSystem& sys, const OrthonormalBasis& b) {
  return galerkin_reduce(sys, b.V);
}
inline ReducedSecondOrderModel galerkin_reduce(const NonlinearSecondOrderSystem& sys, const OrthonormalBasis& b) {
  return galerkin_reduce(sys, b.V);
}

/// {M_r, D_r, K_r} = Wᵀ{M, D, K}V, B_r = WᵀB, C_r = CV. Throws when WᵀMV is singular.
ReducedSecondOrderModel petrov_galerkin_reduce(const LinearSecondOrderSystem& sys, const MatrixXd& V,
                                               const MatrixXd& W);

/// (Wᵀq0, Wᵀq̇0).
std::pair<VectorXd, VectorXd> project_initial_conditions(const VectorXd& q0, const VectorXd& qd0,
                                                         const MatrixXd& W);

/// V q_r.
VectorXd lift(const ReducedSecondOrderModel& rom, const VectorXd& q_r);
/// C_r q_r.
VectorXd reduced_output(const ReducedSecondOrderModel& rom, const VectorXd& q_r);

}  // namespace somor
