#include "somor/baselines.hpp"

#include <Eigen/Eigenvalues>

#include "somor/instrumentation.hpp"

namespace somor {

SnapshotMatrix collect_snapshots(const NonlinearSecondOrderSystem& sys, const InputFn& F_train, double T,
                                 const GeneralizedAlphaConfig& cfg, int stride) {
  if (stride < 1) throw ArgumentError("snapshot stride must be at least 1");
  const auto before = instrumentation::counters();
  const VectorXd zero = VectorXd::Zero(sys.n());
  Trajectory tr = integrate(sys, F_train, zero, zero, T, cfg);
  SnapshotMatrix out;
  out.source = "fom " + sys.tag() + " T=" + std::to_string(T) + " h=" + std::to_string(cfg.h);
  const Eigen::Index N = (tr.Q.cols() + stride - 1) / stride;
  out.S.resize(sys.n(), N);
  for (Eigen::Index j = 0; j < N; ++j) out.S.col(j) = tr.Q.col(j * stride);
  out.full_order_steps = instrumentation::delta(instrumentation::counters(), before).full_order_steps;
  return out;
}

OrthonormalBasis pod_basis(const SnapshotMatrix& S, Eigen::Index r) {
  if (S.S.cols() < 1) throw ArgumentError("snapshot matrix is empty");
  if (!S.S.allFinite()) throw ArgumentError("snapshot matrix has non-finite entries");
  if (r < 1) throw ArgumentError("POD order must be at least 1");
  DeflationMode mode;
  mode.kind = DeflationMode::Kind::fixed;
  mode.r_defl = r;
  mode.tau = 1e-12;
  OrthonormalBasis b = svd_deflate(S.S, mode);
  if (b.rank() == 0) throw ArgumentError("snapshot matrix is identically zero");
  b.method = "pod";
  b.raw.resize(0, 0);  // snapshots are kept by the caller
  return b;
}

ModalBasis modal_basis(const LinearSecondOrderSystem& sys, Eigen::Index r) {
  if (r < 1 || r > sys.n()) throw ArgumentError("modal order must lie in [1, n]");
  ModalBasis out;
  MatrixXd K = sys.K;
  const double asym = (K - K.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * K.cwiseAbs().maxCoeff()) {
    out.basis.warnings.push_back("K is not symmetric; using (K + K^T)/2");
  }
  K = 0.5 * (K + K.transpose());
  const MatrixXd M = 0.5 * (sys.M + sys.M.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> eig(K, M);
  if (eig.info() != Eigen::Success) throw SingularityError("generalized eigenproblem failed");
  out.modes.omega = eig.eigenvalues().head(r).cwiseMax(0.0).cwiseSqrt();
  out.modes.shapes = eig.eigenvectors().leftCols(r);  // M-normalized by the solver
  for (Eigen::Index j = 0; j < r; ++j) {
    // sign convention: largest-magnitude entry positive
    Eigen::Index idx;
    out.modes.shapes.col(j).cwiseAbs().maxCoeff(&idx);
    if (out.modes.shapes(idx, j) < 0.0) out.modes.shapes.col(j) *= -1.0;
  }
  std::vector<std::string> prov;
  for (Eigen::Index j = 0; j < r; ++j) prov.push_back("mode " + std::to_string(j + 1));
  auto ortho = orthonormalize_columns(out.modes.shapes, prov, "modal");
  ortho.warnings.insert(ortho.warnings.begin(), out.basis.warnings.begin(), out.basis.warnings.end());
  out.basis = std::move(ortho);
  return out;
}

}  // namespace somor
