#include "somor/model.hpp"

#include <cmath>
#include <utility>

namespace somor {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ArgumentError(msg);
}

std::string dims(const MatrixXd& A) {
  return std::to_string(A.rows()) + "x" + std::to_string(A.cols());
}

void check_finite(const VectorXd& v, const std::string& what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i))) {
      throw EvaluationError(what + " is non-finite at index " + std::to_string(i));
    }
  }
}

}  // namespace

LinearSecondOrderSystem::LinearSecondOrderSystem(MatrixXd M_, MatrixXd D_, MatrixXd K_,
                                                 MatrixXd B_, MatrixXd C_)
    : M(std::move(M_)), D(std::move(D_)), K(std::move(K_)), B(std::move(B_)), C(std::move(C_)) {
  const auto n = M.rows();
  require(n > 0 && M.cols() == n, "M must be square, got " + dims(M));
  require(D.rows() == n && D.cols() == n, "D must be " + std::to_string(n) + "x" +
                                              std::to_string(n) + ", got " + dims(D));
  require(K.rows() == n && K.cols() == n, "K must be " + std::to_string(n) + "x" +
                                              std::to_string(n) + ", got " + dims(K));
  require(B.rows() == n && B.cols() > 0, "B must have " + std::to_string(n) + " rows, got " + dims(B));
  require(C.cols() == n && C.rows() > 0, "C must have " + std::to_string(n) + " columns, got " + dims(C));
  RealFactorization(M, "mass matrix");
}

NonlinearSecondOrderSystem::NonlinearSecondOrderSystem(MatrixXd M, MatrixXd D, MatrixXd B,
                                                       MatrixXd C, ForceFn force,
                                                       JacobianFn jacobian, std::string tag)
    : M_(std::move(M)),
      D_(std::move(D)),
      B_(std::move(B)),
      C_(std::move(C)),
      force_(std::move(force)),
      jacobian_(std::move(jacobian)),
      tag_(std::move(tag)) {
  const auto n = M_.rows();
  require(n > 0 && M_.cols() == n, "M must be square, got " + dims(M_));
  require(D_.rows() == n && D_.cols() == n, "D must match M, got " + dims(D_));
  require(B_.rows() == n && B_.cols() > 0, "B must have " + std::to_string(n) + " rows");
  require(C_.cols() == n && C_.rows() > 0, "C must have " + std::to_string(n) + " columns");
  require(static_cast<bool>(force_), "force callback is required");
  RealFactorization(M_, "mass matrix");
  VectorXd f0 = force_(VectorXd::Zero(n));
  require(f0.size() == n, "force callback returned wrong length");
  check_finite(f0, "f(0)");
}

NonlinearSecondOrderSystem NonlinearSecondOrderSystem::with_damping(MatrixXd D) const {
  return NonlinearSecondOrderSystem(M_, std::move(D), B_, C_, force_, jacobian_, tag_);
}

VectorXd eval_force(const NonlinearSecondOrderSystem& sys, const VectorXd& q) {
  require(q.size() == sys.n(), "state has length " + std::to_string(q.size()) + ", expected " +
                                   std::to_string(sys.n()));
  VectorXd f = sys.force_fn()(q);
  require(f.size() == sys.n(), "force callback returned wrong length");
  check_finite(f, "force");
  return f;
}

MatrixXd finite_difference_jacobian(const ForceFn& force, const VectorXd& q) {
  const auto n = q.size();
  MatrixXd J(n, n);
  VectorXd qp = q;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = 1e-6 * (1.0 + std::abs(q(j)));
    qp(j) = q(j) + h;
    VectorXd fp = force(qp);
    qp(j) = q(j) - h;
    VectorXd fm = force(qp);
    qp(j) = q(j);
    J.col(j) = (fp - fm) / (2.0 * h);
  }
  return J;
}

MatrixXd eval_jacobian(const NonlinearSecondOrderSystem& sys, const VectorXd& q) {
  require(q.size() == sys.n(), "state has length " + std::to_string(q.size()) + ", expected " +
                                   std::to_string(sys.n()));
  MatrixXd J = sys.analytic_jacobian() ? sys.jacobian_fn()(q)
                                       : finite_difference_jacobian(sys.force_fn(), q);
  require(J.rows() == sys.n() && J.cols() == sys.n(), "jacobian callback returned " + dims(J));
  if (!J.allFinite()) throw EvaluationError("jacobian is non-finite");
  return J;
}

double jacobian_consistency_error(const ForceFn& force, const JacobianFn& jacobian,
                                  const VectorXd& q) {
  MatrixXd J = jacobian(q);
  MatrixXd Jfd = finite_difference_jacobian(force, q);
  return (J - Jfd).cwiseAbs().maxCoeff() / (1.0 + J.cwiseAbs().maxCoeff());
}

MatrixXd rayleigh_damping(const MatrixXd& M, const MatrixXd& K0, const RayleighSpec& spec) {
  require(M.rows() == M.cols() && K0.rows() == K0.cols() && M.rows() == K0.rows(),
          "rayleigh_damping: M is " + dims(M) + " but K0 is " + dims(K0));
  require(spec.alpha >= 0.0 && spec.beta >= 0.0, "Rayleigh coefficients must be nonnegative");
  return spec.alpha * M + spec.beta * K0;
}

MatrixXd rayleigh_damping(const NonlinearSecondOrderSystem& sys, const RayleighSpec& spec) {
  VectorXd q0 = spec.q0.size() ? spec.q0 : VectorXd::Zero(sys.n());
  return rayleigh_damping(sys.M(), eval_jacobian(sys, q0), spec);
}

Linearization linearize(const NonlinearSecondOrderSystem& sys, const VectorXd& q0) {
  MatrixXd K = eval_jacobian(sys, q0);
  VectorXd offset = eval_force(sys, q0) - K * q0;
  return {LinearSecondOrderSystem(sys.M(), sys.D(), std::move(K), sys.B(), sys.C()),
          std::move(offset)};
}

NonlinearSecondOrderSystem wrap_linear(const LinearSecondOrderSystem& sys) {
  const MatrixXd K = sys.K;
  return NonlinearSecondOrderSystem(
      sys.M, sys.D, sys.B, sys.C, [K](const VectorXd& q) -> VectorXd { return K * q; },
      [K](const VectorXd&) -> MatrixXd { return K; }, "wrapped-linear");
}

MatrixXcd shifted_stiffness(const LinearSecondOrderSystem& sys, cplx s) {
  return sys.K.cast<cplx>() + s * sys.D.cast<cplx>() + (s * s) * sys.M.cast<cplx>();
}

MatrixXcd transfer_function(const LinearSecondOrderSystem& sys, cplx s) {
  ComplexFactorization lu(shifted_stiffness(sys, s),
                          "s^2 M + s D + K at s=(" + std::to_string(s.real()) + "," +
                              std::to_string(s.imag()) + ")");
  return sys.C.cast<cplx>() * lu.solve(sys.B.cast<cplx>());
}

}  // namespace somor
