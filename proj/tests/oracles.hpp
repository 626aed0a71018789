// Reference computations used as independent checks in the tests. None of
// them call into the library's own solvers.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using cplx = std::complex<double>;

/// First-order companion realization x = [q; q̇]:
/// G(s) = [C 0] (sI − A)⁻¹ [0; M⁻¹B], A = [[0, I], [−M⁻¹K, −M⁻¹D]].
inline MatrixXcd companion_transfer(const MatrixXd& M, const MatrixXd& D, const MatrixXd& K,
                                    const MatrixXd& B, const MatrixXd& C, cplx s) {
  const auto n = M.rows();
  const MatrixXd Minv = M.fullPivLu().inverse();
  MatrixXd A = MatrixXd::Zero(2 * n, 2 * n);
  A.topRightCorner(n, n).setIdentity();
  A.bottomLeftCorner(n, n) = -Minv * K;
  A.bottomRightCorner(n, n) = -Minv * D;
  MatrixXd Bt = MatrixXd::Zero(2 * n, B.cols());
  Bt.bottomRows(n) = Minv * B;
  MatrixXd Ct = MatrixXd::Zero(C.rows(), 2 * n);
  Ct.leftCols(n) = C;
  const MatrixXcd sIA = s * MatrixXcd::Identity(2 * n, 2 * n) - A.cast<cplx>();
  return Ct.cast<cplx>() * sIA.fullPivLu().solve(Bt.cast<cplx>());
}

/// d/ds of a real-analytic scalar function at a real point via Im g(s + ih)/h.
inline double complex_step(const std::function<cplx(cplx)>& g, double s, double h = 1e-20) {
  return g(cplx(s, h)).imag() / h;
}

/// Root of a sign-changing scalar function on [a, b].
inline double bisection(const std::function<double(double)>& f, double a, double b, double tol = 1e-14) {
  double fa = f(a);
  for (int it = 0; it < 400 && b - a > tol; ++it) {
    const double c = 0.5 * (a + b);
    const double fc = f(c);
    if ((fc < 0) == (fa < 0)) {
      a = c;
      fa = fc;
    } else {
      b = c;
    }
  }
  return 0.5 * (a + b);
}

/// Classical fixed-step RK4 for x' = g(x) from 0 to T.
inline VectorXd rk4(const std::function<VectorXd(const VectorXd&)>& g, VectorXd x, double T, int steps) {
  const double h = T / steps;
  for (int k = 0; k < steps; ++k) {
    const VectorXd k1 = g(x);
    const VectorXd k2 = g(x + 0.5 * h * k1);
    const VectorXd k3 = g(x + 0.5 * h * k2);
    const VectorXd k4 = g(x + h * k3);
    x += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return x;
}

/// Orthonormal basis of range(A) from a column-pivoted QR.
inline MatrixXd qr_range(const MatrixXd& A, double tol = 1e-10) {
  Eigen::ColPivHouseholderQR<MatrixXd> qr(A);
  qr.setThreshold(tol);
  const auto r = qr.rank();
  MatrixXd Q = qr.householderQ() * MatrixXd::Identity(A.rows(), r);
  return Q;
}

inline Eigen::Index qr_rank(const MatrixXd& A, double tol = 1e-10) {
  Eigen::ColPivHouseholderQR<MatrixXd> qr(A);
  qr.setThreshold(tol);
  return qr.rank();
}

/// ‖P_A − P_B‖₂ = sin of the largest principal angle for equal-dimensional spans.
inline double projector_distance(const MatrixXd& A, const MatrixXd& B) {
  const MatrixXd Qa = qr_range(A), Qb = qr_range(B);
  if (Qa.cols() != Qb.cols()) return 1.0;
  const MatrixXd P = Qa * Qa.transpose() - Qb * Qb.transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(P);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// sin of the angle between vectors a and b.
inline double vector_angle(const VectorXd& a, const VectorXd& b) {
  const double c = std::abs(a.dot(b)) / (a.norm() * b.norm());
  return std::sqrt(std::max(0.0, 1.0 - c * c));
}

/// Fixed-free chain assembled spring by spring. Spring j joins mass j−1
/// (or the wall for j = 0) and mass j.
struct ChainForce {
  std::vector<double> k1, k2, k3;

  VectorXd force(const VectorXd& q) const {
    const auto n = q.size();
    VectorXd f = VectorXd::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double left = j == 0 ? 0.0 : q(j - 1);
      const double d = q(j) - left;
      const double s = k1[j] * d + k2[j] * d * d + k3[j] * d * d * d;
      f(j) += s;
      if (j > 0) f(j - 1) -= s;
    }
    return f;
  }

  MatrixXd jacobian(const VectorXd& q) const {
    const auto n = q.size();
    MatrixXd J = MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double left = j == 0 ? 0.0 : q(j - 1);
      const double d = q(j) - left;
      const double ds = k1[j] + 2 * k2[j] * d + 3 * k3[j] * d * d;
      J(j, j) += ds;
      if (j > 0) {
        J(j - 1, j - 1) += ds;
        J(j, j - 1) -= ds;
        J(j - 1, j) -= ds;
      }
    }
    return J;
  }
};

inline MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  MatrixXd A(r, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) A(i, j) = nd(rng);
  }
  return A;
}

inline MatrixXd random_orthonormal(Eigen::Index n, Eigen::Index r, std::mt19937_64& rng) {
  Eigen::HouseholderQR<MatrixXd> qr(random_matrix(n, r, rng));
  return qr.householderQ() * MatrixXd::Identity(n, r);
}

}  // namespace oracle
