#include "somor/reduce.hpp"

namespace somor {

namespace {

void check_basis(const MatrixXd& V, Eigen::Index n, const char* what) {
  if (V.rows() != n) {
    throw ArgumentError(std::string(what) + " has " + std::to_string(V.rows()) + " rows, system has n=" +
                        std::to_string(n));
  }
  if (V.cols() == 0) throw ArgumentError(std::string(what) + " has no columns");
}

}  // namespace

LinearSecondOrderSystem ReducedSecondOrderModel::as_linear() const {
  if (!K_r) throw UnsupportedError("reduced model is nonlinear");
  return LinearSecondOrderSystem(M_r, D_r, *K_r, B_r, C_r);
}

NonlinearSecondOrderSystem ReducedSecondOrderModel::as_nonlinear() const {
  return NonlinearSecondOrderSystem(M_r, D_r, B_r, C_r, force, jacobian, tag);
}

ReducedSecondOrderModel galerkin_reduce(const LinearSecondOrderSystem& sys, const MatrixXd& V) {
  check_basis(V, sys.n(), "V");
  if (orthonormality_error(V) > 1e-8) throw ArgumentError("Galerkin basis V is not orthonormal");
  auto rom = petrov_galerkin_reduce(sys, V, V);
  rom.tag = "galerkin-linear";
  return rom;
}

ReducedSecondOrderModel galerkin_reduce(const NonlinearSecondOrderSystem& sys, const MatrixXd& V) {
  check_basis(V, sys.n(), "V");
  if (orthonormality_error(V) > 1e-8) throw ArgumentError("Galerkin basis V is not orthonormal");
  ReducedSecondOrderModel rom;
  rom.M_r = V.transpose() * sys.M() * V;
  rom.D_r = V.transpose() * sys.D() * V;
  rom.B_r = V.transpose() * sys.B();
  rom.C_r = sys.C() * V;
  rom.V = V;
  rom.W = V;
  rom.tag = "galerkin-nonlinear";
  // The closures own copies so the ROM outlives its source.
  const NonlinearSecondOrderSystem full = sys;
  const MatrixXd Vt = V.transpose();
  rom.force = [full, V, Vt](const VectorXd& q_r) -> VectorXd { return Vt * eval_force(full, V * q_r); };
  rom.jacobian = [full, V, Vt](const VectorXd& q_r) -> MatrixXd {
    return Vt * eval_jacobian(full, V * q_r) * V;
  };
  return rom;
}

ReducedSecondOrderModel petrov_galerkin_reduce(const LinearSecondOrderSystem& sys, const MatrixXd& V,
                                               const MatrixXd& W) {
  check_basis(V, sys.n(), "V");
  check_basis(W, sys.n(), "W");
  if (V.cols() != W.cols()) throw ArgumentError("V and W must have the same number of columns");
  ReducedSecondOrderModel rom;
  const MatrixXd Wt = W.transpose();
  rom.M_r = Wt * sys.M * V;
  try {
    RealFactorization(rom.M_r, "W^T M V");
  } catch (const SingularityError&) {
    throw SingularityError("projection is degenerate: W^T M V is singular");
  }
  rom.D_r = Wt * sys.D * V;
  rom.K_r = Wt * sys.K * V;
  rom.B_r = Wt * sys.B;
  rom.C_r = sys.C * V;
  rom.V = V;
  rom.W = W;
  rom.tag = "petrov-galerkin-linear";
  const MatrixXd Kr = *rom.K_r;
  rom.force = [Kr](const VectorXd& q_r) -> VectorXd { return Kr * q_r; };
  rom.jacobian = [Kr](const VectorXd&) -> MatrixXd { return Kr; };
  return rom;
}

std::pair<VectorXd, VectorXd> project_initial_conditions(const VectorXd& q0, const VectorXd& qd0,
                                                         const MatrixXd& W) {
  if (q0.size() != W.rows() || qd0.size() != W.rows()) {
    throw ArgumentError("initial conditions must have length n = rows of W");
  }
  return {W.transpose() * q0, W.transpose() * qd0};
}

VectorXd lift(const ReducedSecondOrderModel& rom, const VectorXd& q_r) {
  if (q_r.size() != rom.V.cols()) throw ArgumentError("reduced state has wrong length");
  return rom.V * q_r;
}

VectorXd reduced_output(const ReducedSecondOrderModel& rom, const VectorXd& q_r) {
  if (q_r.size() != rom.C_r.cols()) throw ArgumentError("reduced state has wrong length");
  return rom.C_r * q_r;
}

}  // namespace somor
