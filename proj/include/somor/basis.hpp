#pragma once

#include <string>
#include <vector>

#include "somor/linalg.hpp"

namespace somor {

/// Column-orthonormal projection matrix together with how it was built.
struct OrthonormalBasis {
  MatrixXd V;
  std::string method;

  /// Pre-orthogonalization real columns and where each came from.
  MatrixXd raw;
  std::vector<std::string> raw_provenance;

  std::vector<std::string> deflation;  // dropped columns and truncations
  std::vector<std::string> warnings;
  VectorXd singular_values;            // of `raw`, when SVD deflation ran

  Eigen::Index n() const { return V.rows(); }
  Eigen::Index rank() const { return V.cols(); }
};

/// Two-pass modified Gram-Schmidt. Appends w/‖w⊥‖ to V unless the remainder
/// falls below tol·‖w‖; returns whether the column was kept.
bool gram_schmidt_append(MatrixXd& V, const VectorXd& w, double tol = 1e-12);

struct DeflationMode {
  enum class Kind { fixed, threshold };
  Kind kind = Kind::threshold;
  Eigen::Index r_defl = 0;  // fixed mode target rank
  double tau = 1e-10;       // keeps σ_j ≥ τ·σ_1; also the rank floor in fixed mode
};

/// Left singular vectors of V_raw truncated per `mode`.
OrthonormalBasis svd_deflate(const MatrixXd& V_raw, const DeflationMode& mode = {});

/// Orthonormalizes the columns of `raw` one by one with gram_schmidt_append.
OrthonormalBasis orthonormalize_columns(const MatrixXd& raw, const std::vector<std::string>& provenance,
                                        const std::string& method, double tol = 1e-12);

}  // namespace somor
