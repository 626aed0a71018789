#include "somor/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace somor {

template <typename Scalar>
Factorization<Scalar>::Factorization(const Matrix& A, const std::string& what)
    : n_(A.rows()), what_(what) {
  if (A.rows() != A.cols()) throw ArgumentError(what + " is not square");
  if (!A.allFinite()) throw EvaluationError(what + " has non-finite entries");
  if (n_ <= kDenseLimit) {
    dense_ = std::make_shared<Eigen::PartialPivLU<Matrix>>(A);
    rcond_ = dense_->rcond();
    if (!(rcond_ > 100.0 * std::numeric_limits<double>::epsilon())) {
      throw SingularityError(what + " is singular (rcond " + std::to_string(rcond_) + ")");
    }
  } else {
    Sparse S = A.sparseView();
    S.makeCompressed();
    sparse_ = std::make_shared<Eigen::SparseLU<Sparse>>();
    sparse_->compute(S);
    if (sparse_->info() != Eigen::Success) throw SingularityError(what + " is singular");
  }
}

template class Factorization<double>;
template class Factorization<cplx>;

double orthonormality_error(const MatrixXd& V) {
  if (V.cols() == 0) return 0.0;
  return (V.transpose() * V - MatrixXd::Identity(V.cols(), V.cols())).cwiseAbs().maxCoeff();
}

MatrixXd orthonormal_range(const MatrixXd& A, double tol) {
  if (A.cols() == 0) return MatrixXd(A.rows(), 0);
  Eigen::JacobiSVD<MatrixXd> svd(A, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > tol * s(0)) ++rank;
  return svd.matrixU().leftCols(rank);
}

double max_principal_angle(const MatrixXd& A, const MatrixXd& B) {
  MatrixXd Qa = orthonormal_range(A);
  MatrixXd Qb = orthonormal_range(B);
  if (Qa.cols() > Qb.cols()) std::swap(Qa, Qb);
  if (Qa.cols() == 0) return 0.0;
  // sin of the angles of range(Qa) against range(Qb)
  MatrixXd residual = Qa - Qb * (Qb.transpose() * Qa);
  Eigen::JacobiSVD<MatrixXd> svd(residual);
  const double s = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  return std::asin(std::min(1.0, s));
}

}  // namespace somor
