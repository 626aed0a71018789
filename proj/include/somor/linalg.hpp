#pragma once

#include <complex>
#include <memory>
#include <string>
#include <variant>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "somor/errors.hpp"

namespace somor {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using cplx = std::complex<double>;

/// Systems above this size are factorized in compressed-sparse form.
inline constexpr Eigen::Index kDenseLimit = 2000;

/// LU factorization of a square operator, dense up to kDenseLimit and
/// sparse beyond. Throws SingularityError when the operator is numerically
/// singular.
template <typename Scalar>
class Factorization {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Sparse = Eigen::SparseMatrix<Scalar>;

  Factorization() = default;
  explicit Factorization(const Matrix& A, const std::string& what = "operator");

  template <typename Rhs>
  Matrix solve(const Rhs& rhs) const {
    Matrix x;
    if (dense_) {
      x = dense_->solve(rhs);
    } else {
      x = sparse_->solve(static_cast<Matrix>(rhs));
    }
    if (!x.allFinite()) throw SingularityError("non-finite solution from " + what_);
    return x;
  }

  Eigen::Index size() const { return n_; }
  bool is_sparse() const { return sparse_ != nullptr; }
  /// Reciprocal condition estimate (dense path only; 1 for sparse).
  double rcond() const { return rcond_; }

 private:
  std::shared_ptr<Eigen::PartialPivLU<Matrix>> dense_;
  std::shared_ptr<Eigen::SparseLU<Sparse>> sparse_;
  Eigen::Index n_ = 0;
  double rcond_ = 1.0;
  std::string what_;
};

using RealFactorization = Factorization<double>;
using ComplexFactorization = Factorization<cplx>;

/// max |VᵀV − I|.
double orthonormality_error(const MatrixXd& V);

/// Largest principal angle [rad] between range(A) and range(B). When the
/// dimensions differ, the smaller subspace is measured against the larger.
double max_principal_angle(const MatrixXd& A, const MatrixXd& B);

/// Orthonormal basis of range(A) by SVD, dropping singular values below
/// tol·σ_max.
MatrixXd orthonormal_range(const MatrixXd& A, double tol = 1e-12);

}  // namespace somor
