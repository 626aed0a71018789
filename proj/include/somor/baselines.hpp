#pragma once

#include <string>
#include <vector>

#include "somor/basis.hpp"
#include "somor/model.hpp"
#include "somor/timeint.hpp"

namespace somor {

struct SnapshotMatrix {
  MatrixXd S;  // n×N displacement snapshots
  std::string source;
  bool mean_subtracted = false;
  std::uint64_t full_order_steps = 0;  // integration work spent collecting
};

/// ω ascending, shapes M-normalized (φᵀMφ = 1).
struct ModalData {
  VectorXd omega;
  MatrixXd shapes;
};

/// Integrates the FOM from rest under F_train over [0, T] and keeps every
/// `stride`-th displacement.
SnapshotMatrix collect_snapshots(const NonlinearSecondOrderSystem& sys, const InputFn& F_train, double T,
                                 const GeneralizedAlphaConfig& cfg, int stride = 1);

/// First r left singular vectors; the spectrum goes into singular_values.
OrthonormalBasis pod_basis(const SnapshotMatrix& S, Eigen::Index r);

struct ModalBasis {
  OrthonormalBasis basis;
  ModalData modes;
};

/// r lowest undamped modes of (M, K). Damping is ignored.
ModalBasis modal_basis(const LinearSecondOrderSystem& sys, Eigen::Index r);

}  // namespace somor
