#pragma once

#include <functional>
#include <string>

#include "somor/linalg.hpp"

namespace somor {

/// M q̈ + D q̇ + K q = B F,  y = C q.
struct LinearSecondOrderSystem {
  MatrixXd M, D, K, B, C;

  LinearSecondOrderSystem() = default;
  /// Validates dimensions and invertibility of M.
  LinearSecondOrderSystem(MatrixXd M, MatrixXd D, MatrixXd K, MatrixXd B, MatrixXd C);

  Eigen::Index n() const { return M.rows(); }
  Eigen::Index m() const { return B.cols(); }
  Eigen::Index p() const { return C.rows(); }
};

using ForceFn = std::function<VectorXd(const VectorXd&)>;
using JacobianFn = std::function<MatrixXd(const VectorXd&)>;

/// M q̈ + D q̇ + f(q) = B F,  y = C q.
///
/// The force callback carries the linear stiffness as well; no K is stored.
/// Without an analytic Jacobian a central-difference fallback is used and
/// `analytic_jacobian()` reports false. Callbacks must be pure.
class NonlinearSecondOrderSystem {
 public:
  NonlinearSecondOrderSystem() = default;
  NonlinearSecondOrderSystem(MatrixXd M, MatrixXd D, MatrixXd B, MatrixXd C, ForceFn force,
                             JacobianFn jacobian = {}, std::string tag = "nonlinear");

  const MatrixXd& M() const { return M_; }
  const MatrixXd& D() const { return D_; }
  const MatrixXd& B() const { return B_; }
  const MatrixXd& C() const { return C_; }
  Eigen::Index n() const { return M_.rows(); }
  Eigen::Index m() const { return B_.cols(); }
  Eigen::Index p() const { return C_.rows(); }
  bool analytic_jacobian() const { return static_cast<bool>(jacobian_); }
  const std::string& tag() const { return tag_; }

  const ForceFn& force_fn() const { return force_; }
  const JacobianFn& jacobian_fn() const { return jacobian_; }

  /// Copy with a different damping matrix.
  NonlinearSecondOrderSystem with_damping(MatrixXd D) const;

 private:
  MatrixXd M_, D_, B_, C_;
  ForceFn force_;
  JacobianFn jacobian_;
  std::string tag_;
};

struct RayleighSpec {
  double alpha = 0.0;  // [1/s]
  double beta = 0.0;   // [s]
  VectorXd q0;         // linearization point; empty means the origin
};

VectorXd eval_force(const NonlinearSecondOrderSystem& sys, const VectorXd& q);
MatrixXd eval_jacobian(const NonlinearSecondOrderSystem& sys, const VectorXd& q);

/// Central differences with step 1e-6·(1+|q_j|).
MatrixXd finite_difference_jacobian(const ForceFn& force, const VectorXd& q);

/// max|J − FD(f)| / (1 + max|J|).
double jacobian_consistency_error(const ForceFn& force, const JacobianFn& jacobian,
                                  const VectorXd& q);

/// D = α M + β K0.
MatrixXd rayleigh_damping(const MatrixXd& M, const MatrixXd& K0, const RayleighSpec& spec);

/// Rayleigh damping with K0 = J_f(spec.q0).
MatrixXd rayleigh_damping(const NonlinearSecondOrderSystem& sys, const RayleighSpec& spec);

struct Linearization {
  LinearSecondOrderSystem system;  // K = J_f(q0)
  VectorXd offset;                 // f(q0) − K q0, not part of the tangent model
};

Linearization linearize(const NonlinearSecondOrderSystem& sys, const VectorXd& q0);

/// f(q) = K q with J_f ≡ K.
NonlinearSecondOrderSystem wrap_linear(const LinearSecondOrderSystem& sys);

/// G(s) = C (s² M + s D + K)⁻¹ B.
MatrixXcd transfer_function(const LinearSecondOrderSystem& sys, cplx s);

/// s² M + s D + K as a complex matrix.
MatrixXcd shifted_stiffness(const LinearSecondOrderSystem& sys, cplx s);

}  // namespace somor
