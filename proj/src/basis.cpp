#include "somor/basis.hpp"

#include <cmath>

namespace somor {

bool gram_schmidt_append(MatrixXd& V, const VectorXd& w, double tol) {
  if (V.cols() > 0 && V.rows() != w.size()) throw ArgumentError("gram_schmidt_append: length mismatch");
  const double norm_w = w.norm();
  if (norm_w == 0.0 || !std::isfinite(norm_w)) return false;
  VectorXd u = w;
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index j = 0; j < V.cols(); ++j) u -= V.col(j).dot(u) * V.col(j);
  }
  const double norm_u = u.norm();
  if (norm_u < tol * norm_w) return false;
  V.conservativeResize(w.size(), V.cols() + 1);
  V.col(V.cols() - 1) = u / norm_u;
  return true;
}

OrthonormalBasis svd_deflate(const MatrixXd& V_raw, const DeflationMode& mode) {
  if (V_raw.cols() == 0 || V_raw.rows() == 0) throw ArgumentError("svd_deflate: empty input");
  OrthonormalBasis out;
  out.method = "svd";
  out.raw = V_raw;
  Eigen::BDCSVD<MatrixXd> svd(V_raw, Eigen::ComputeThinU);
  out.singular_values = svd.singularValues();
  const auto& s = out.singular_values;
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > 0.0 && s(rank) >= mode.tau * s(0)) ++rank;
  Eigen::Index keep = rank;
  if (mode.kind == DeflationMode::Kind::fixed) {
    if (mode.r_defl < 1) throw ArgumentError("svd_deflate: r_defl must be at least 1");
    keep = mode.r_defl;
    if (keep > rank) {
      out.warnings.push_back("requested rank " + std::to_string(mode.r_defl) +
                             " exceeds numerical rank " + std::to_string(rank) + "; clamped");
      keep = rank;
    }
  }
  if (keep < V_raw.cols()) {
    out.deflation.push_back("svd kept " + std::to_string(keep) + " of " +
                            std::to_string(V_raw.cols()) + " columns");
  }
  out.V = svd.matrixU().leftCols(keep);
  return out;
}

OrthonormalBasis orthonormalize_columns(const MatrixXd& raw, const std::vector<std::string>& provenance,
                                        const std::string& method, double tol) {
  OrthonormalBasis out;
  out.method = method;
  out.raw = raw;
  out.raw_provenance = provenance;
  out.V.resize(raw.rows(), 0);
  for (Eigen::Index j = 0; j < raw.cols(); ++j) {
    if (!gram_schmidt_append(out.V, raw.col(j), tol)) {
      out.deflation.push_back("dropped column " + std::to_string(j) +
                              (j < static_cast<Eigen::Index>(provenance.size())
                                   ? " (" + provenance[static_cast<std::size_t>(j)] + ")"
                                   : std::string()));
    }
  }
  return out;
}

}  // namespace somor
