#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "somor/krylov.hpp"
#include "somor/reduce.hpp"
#include "somor/verify.hpp"

using namespace somor;

namespace {

LinearSecondOrderSystem one_dof(double m, double d, double k) {
  return LinearSecondOrderSystem(MatrixXd::Constant(1, 1, m), MatrixXd::Constant(1, 1, d),
                                 MatrixXd::Constant(1, 1, k), MatrixXd::Ones(1, 1), MatrixXd::Ones(1, 1));
}

MatrixXd dense_tangential_solves(const LinearSecondOrderSystem& s, const std::vector<double>& shifts,
                                 const MatrixXd& R) {
  MatrixXd V(s.n(), static_cast<Eigen::Index>(shifts.size()));
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    const double x = shifts[i];
    const MatrixXd Ks = s.K + x * s.D + x * x * s.M;
    V.col(static_cast<Eigen::Index>(i)) = Ks.fullPivLu().solve(s.B * R.col(static_cast<Eigen::Index>(i)));
  }
  return V;
}

}  // namespace

TEST(ShiftedOperator, AssemblesShiftedMatrices) {
  const auto sys = random_structural_system(5, 1, 1, 2);
  const cplx s(0.5, 1.0);
  ShiftedOperator op(sys, s);
  const MatrixXcd Ks = sys.K.cast<cplx>() + s * sys.D.cast<cplx>() + s * s * sys.M.cast<cplx>();
  EXPECT_LE((op.K_sigma() - Ks).norm(), 1e-13);
  EXPECT_LE((op.D_sigma() - (sys.D.cast<cplx>() + 2.0 * s * sys.M.cast<cplx>())).norm(), 1e-13);
  EXPECT_THROW(ShiftedOperator(one_dof(1, 0, 4), cplx(0, 2)), SingularityError);
}

TEST(ShiftCache, ReusesFactorizations) {
  const auto sys = random_structural_system(5, 1, 1, 2);
  ShiftCache cache(sys);
  auto a = cache.get(0.5);
  auto b = cache.get(0.5);
  auto c = cache.get(0.5, true);
  EXPECT_EQ(a.get(), b.get());
  EXPECT_NE(a.get(), c.get());
  EXPECT_EQ(cache.size(), 2u);
}

TEST(TangentialBasis, OneDofShiftTwo) {
  const auto sys = one_dof(1, 0, 4);
  const auto data = InterpolationData::real_input({2.0}, MatrixXd::Ones(1, 1));
  const auto b = tangential_basis(sys, data);
  ASSERT_EQ(b.rank(), 1);
  EXPECT_DOUBLE_EQ(std::abs(b.V(0, 0)), 1.0);
  EXPECT_DOUBLE_EQ(b.raw(0, 0), 0.125);
  EXPECT_LE(sylvester_residual(sys, b, data), 1e-16);
}

TEST(TangentialBasis, ZeroShiftIsStaticMode) {
  const auto sys = random_structural_system(8, 1, 1, 3);
  const auto b = tangential_basis(sys, InterpolationData::real_input({0.0}, MatrixXd::Ones(1, 1)));
  const VectorXd ref = sys.K.fullPivLu().solve(sys.B);
  EXPECT_LE(oracle::vector_angle(b.V.col(0), ref), 1e-12);
}

TEST(TangentialBasis, SpanMatchesDirectDenseSolves) {
  const auto sys = random_structural_system(6, 2, 1, 17);
  const std::vector<double> shifts{0.2, 1.0, 3.5};
  MatrixXd R(2, 3);
  R << 1, 0.5, -1, 0.3, 1, 2;
  const auto b = tangential_basis(sys, InterpolationData::real_input(shifts, R));
  EXPECT_LE(oracle::projector_distance(b.V, dense_tangential_solves(sys, shifts, R)), 1e-10);
  EXPECT_LE(orthonormality_error(b.V), 1e-12);
}

TEST(TangentialBasis, OutputSideUsesTransposedSolves) {
  const auto sys = random_structural_system(6, 1, 2, 18);
  InterpolationData d = InterpolationData::real_input({0.7}, MatrixXd::Ones(1, 1));
  d.mu = VectorXcd::Constant(1, 0.9);
  d.L = MatrixXcd::Ones(2, 1);
  const auto w = tangential_basis(sys, d, Side::output);
  const MatrixXd Kt = (sys.K + 0.9 * sys.D + 0.81 * sys.M).transpose();
  const VectorXd ref = Kt.fullPivLu().solve(sys.C.transpose() * VectorXd::Ones(2));
  EXPECT_LE(oracle::vector_angle(w.V.col(0), ref), 1e-12);
}

TEST(TangentialBasis, SingularShiftIsReported) {
  EXPECT_THROW(tangential_basis(one_dof(1, 0, 4), InterpolationData::real_input({0.0}, MatrixXd::Zero(1, 1))),
               ArgumentError);
  InterpolationData d;
  d.sigma = VectorXcd::Constant(1, cplx(0, 2));
  d.R = MatrixXcd::Ones(1, 1);
  EXPECT_THROW(tangential_basis(one_dof(1, 0, 4), d), SingularityError);
}

TEST(TangentialBasis, ConjugatePairMatchesRealifiedSingleSolve) {
  const auto sys = random_structural_system(12, 1, 1, 5);
  const cplx s(0.2, 1.4);
  InterpolationData pair;
  pair.sigma = VectorXcd(2);
  pair.sigma << s, std::conj(s);
  pair.R = MatrixXcd::Ones(1, 2);
  const auto b = tangential_basis(sys, pair);
  EXPECT_EQ(b.rank(), 2);
  const MatrixXcd Ks = sys.K.cast<cplx>() + s * sys.D.cast<cplx>() + s * s * sys.M.cast<cplx>();
  const VectorXcd v = Ks.fullPivLu().solve(sys.B.cast<cplx>());
  MatrixXd ref(12, 2);
  ref << v.real(), v.imag();
  EXPECT_LE(oracle::projector_distance(b.V, ref), 1e-10);
  const auto rom = galerkin_reduce(sys, b).as_linear();
  EXPECT_LE(verify_interpolation(sys, rom, pair).max(), 1e-8);
}

TEST(TangentialBasis, RankCollapseWarns) {
  const auto sys = random_structural_system(6, 1, 1, 8);
  const auto b = tangential_basis(sys, InterpolationData::real_input({0.5, 0.5}, MatrixXd::Ones(1, 2)));
  EXPECT_EQ(b.rank(), 1);
  EXPECT_FALSE(b.warnings.empty());
}

TEST(BlockMultimoment, OneDofDeflatesToRankOne) {
  const auto b = block_multimoment_basis(one_dof(1, 0, 4), 0.0, 2);
  EXPECT_EQ(b.rank(), 1);
  EXPECT_DOUBLE_EQ(std::abs(b.V(0, 0)), 1.0);
  ASSERT_EQ(b.raw.cols(), 2);
  EXPECT_DOUBLE_EQ(b.raw(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(b.raw(0, 1), 1.0 / 16.0);
  EXPECT_FALSE(b.deflation.empty());
}

TEST(BlockMultimoment, OrderOneEqualsTangentialOverAllInputs) {
  const auto sys = random_structural_system(9, 2, 1, 9);
  const auto a = block_multimoment_basis(sys, 0.8, 1);
  InterpolationData d = InterpolationData::real_input({0.8, 0.8}, MatrixXd::Identity(2, 2));
  const auto b = tangential_basis(sys, d);
  EXPECT_LE(oracle::projector_distance(a.V, b.V), 1e-12);
}

TEST(BlockMultimoment, MatchesLeadingMoments) {
  const auto sys = random_structural_system(8, 1, 1, 30);
  const int q = 3;
  const cplx sigma = 0.6;
  const auto b = block_multimoment_basis(sys, sigma, q);
  const auto rom = galerkin_reduce(sys, b).as_linear();
  const VectorXcd r = VectorXcd::Ones(1);
  for (int i = 0; i < q; ++i) {
    const VectorXcd a = compute_moment(sys, sigma, i, r);
    const VectorXcd c = compute_moment(rom, sigma, i, r);
    EXPECT_LE((a - c).norm() / a.norm(), 1e-8) << "moment " << i;
  }
}

TEST(BlockMultimoment, NonProportionalDampingIsRecorded) {
  auto sys = random_structural_system(6, 1, 1, 31);
  std::mt19937_64 rng(3);
  const MatrixXd A = oracle::random_matrix(6, 6, rng);
  sys.D = A * A.transpose();
  const auto b = block_multimoment_basis(sys, 0.3, 2);
  EXPECT_FALSE(b.warnings.empty());
}

TEST(Soar, FirstColumnIsTangentialDirection) {
  const auto sys = random_structural_system(10, 1, 1, 40);
  const auto s = soar_basis(sys, 0.5, 1);
  const auto t = tangential_basis(sys, InterpolationData::real_input({0.5}, MatrixXd::Ones(1, 1)));
  EXPECT_LE(oracle::vector_angle(s.V.col(0), t.V.col(0)), 1e-12);
}

TEST(Soar, UndampedEqualsFirstOrderKrylov) {
  auto sys = random_structural_system(12, 1, 1, 41);
  sys.D.setZero();
  for (int r : {2, 4, 5}) {
    const auto s = soar_basis(sys, 0.0, r);
    const auto b = block_multimoment_basis(sys, 0.0, r);
    EXPECT_LE(oracle::projector_distance(s.V, b.V), 1e-8) << "r = " << r;
  }
}

TEST(Soar, TransferErrorDecreasesWithOrder) {
  const auto sys = random_structural_system(10, 1, 1, 42);
  const cplx sigma = 0.5;
  const cplx probe = 0.5 + 0.6;
  const cplx G = transfer_function(sys, probe)(0, 0);
  double previous = 1e300;
  for (int r = 1; r <= 4; ++r) {
    const auto rom = galerkin_reduce(sys, soar_basis(sys, sigma, r)).as_linear();
    const double e = std::abs(G - transfer_function(rom, probe)(0, 0)) / std::abs(G);
    EXPECT_LT(e, previous) << "r = " << r;
    previous = e;
    EXPECT_LE(std::abs(transfer_function(sys, sigma)(0, 0) - transfer_function(rom, sigma)(0, 0)), 1e-10);
  }
}

TEST(Soar, GivenDirectionAndOrthonormality) {
  const auto sys = random_structural_system(20, 2, 1, 43);
  const VectorXd dir = Eigen::Vector2d(0.3, -1.0);
  const auto s = soar_basis(sys, 0.3, 8, dir);
  EXPECT_LE(orthonormality_error(s.V), 1e-12);
  const auto t = tangential_basis(sys, InterpolationData::real_input({0.3}, dir));
  EXPECT_LE(oracle::vector_angle(s.V.col(0), t.V.col(0)), 1e-12);
}

TEST(Soar, BreakdownRestartsWithRandomVector) {
  // 1-DOF: the Krylov sequence is exhausted after the first vector.
  const auto s = soar_basis(one_dof(1, 0.5, 4), 0.0, 1);
  EXPECT_EQ(s.rank(), 1);
  auto sys = random_structural_system(4, 1, 1, 44);
  const auto full = soar_basis(sys, 0.1, 6);
  EXPECT_LE(full.rank(), 4);
  EXPECT_LE(orthonormality_error(full.V), 1e-12);
}

TEST(Moments, ZerothMomentOfOneDof) {
  EXPECT_DOUBLE_EQ(compute_moment(one_dof(1, 0, 4), 0.0, 0, VectorXcd::Ones(1))(0).real(), 0.25);
}

TEST(Moments, ZerothMomentIsTransferFunction) {
  const auto sys = random_structural_system(7, 2, 3, 50);
  const VectorXcd r = (VectorXcd(2) << cplx(1, 0.5), cplx(-0.3, 0)).finished();
  const cplx s(0.4, 0.9);
  EXPECT_LE((compute_moment(sys, s, 0, r) - transfer_function(sys, s) * r).norm(), 1e-13);
}

TEST(Moments, FirstMomentOfUndampedOneDofVanishes) {
  // d/ds 1/(s²+4) at 0 is 0.
  const auto sys = one_dof(1, 0, 4);
  const double dG = oracle::complex_step([&](cplx s) { return 1.0 / (s * s + 4.0); }, 0.0);
  EXPECT_NEAR(compute_moment(sys, 0.0, 1, VectorXcd::Ones(1))(0).real(), -dG, 1e-15);
  EXPECT_NEAR(compute_moment(sys, 0.0, 1, VectorXcd::Ones(1))(0).real(), dG, 1e-15);
}

TEST(Moments, AreTaylorCoefficientsOfDampedSystem) {
  const double m = 1.0, d = 0.7, k = 4.0;
  const auto sys = one_dof(m, d, k);
  auto G = [&](cplx s) { return 1.0 / (m * s * s + d * s + k); };
  for (double sigma : {0.0, 0.5}) {
    const double dG = oracle::complex_step(G, sigma);
    EXPECT_NEAR(compute_moment(sys, sigma, 1, VectorXcd::Ones(1))(0).real(), dG, 1e-14);
    // second Taylor coefficient G''/2 = (3(2s+d)² − 2·... ) checked against companion form derivatives
    const double h = 1e-4;
    const double second = (G(sigma + h).real() - 2.0 * G(sigma).real() + G(sigma - h).real()) / (2.0 * h * h);
    EXPECT_NEAR(compute_moment(sys, sigma, 2, VectorXcd::Ones(1))(0).real(), second, 1e-6);
  }
}

TEST(Sylvester, RawTangentialSolutionsSolveIt) {
  const auto sys = random_structural_system(30, 2, 2, 60);
  MatrixXd R(2, 4);
  R << 1, 0, 1, 2, 0, 1, -1, 0.5;
  const auto data = InterpolationData::real_input({0.1, 0.9, 2.0, 4.0}, R);
  const auto b = tangential_basis(sys, data);
  EXPECT_LE(sylvester_residual(sys, b, data), 1e-10);
  EXPECT_LE(sylvester_residual(sys, dense_tangential_solves(sys, {0.1, 0.9, 2.0, 4.0}, R), data), 1e-10);
}

TEST(Sylvester, RandomMatrixIsNotASolution) {
  const auto sys = random_structural_system(30, 1, 1, 61);
  const auto data = InterpolationData::real_input({0.1, 0.9}, MatrixXd::Ones(1, 2));
  std::mt19937_64 rng(1);
  EXPECT_GT(sylvester_residual(sys, oracle::random_matrix(30, 2, rng), data), 0.1);
}

TEST(Sylvester, NeedsRawTangentialSolutions) {
  const auto sys = random_structural_system(10, 1, 1, 62);
  const auto data = InterpolationData::real_input({0.1, 0.9}, MatrixXd::Ones(1, 2));
  const auto soar = soar_basis(sys, 0.1, 2);
  EXPECT_THROW(sylvester_residual(sys, soar, data), UnsupportedError);
}

TEST(VerifyInterpolation, MatchingBasisInterpolates) {
  const auto sys = random_structural_system(60, 2, 2, 70);
  MatrixXd R(2, 6);
  R << 1, 0, 1, 2, 1, -1, 0, 1, -1, 0.5, 1, 1;
  const auto data = InterpolationData::real_input({0.05, 0.3, 0.8, 1.5, 3.0, 6.0}, R);
  const auto rom = galerkin_reduce(sys, tangential_basis(sys, data)).as_linear();
  const auto e = verify_interpolation(sys, rom, data);
  ASSERT_EQ(e.input.size(), 6u);
  EXPECT_LE(e.max(), 1e-8);
}

TEST(VerifyInterpolation, RandomBasisDoesNot) {
  const auto sys = random_structural_system(60, 1, 1, 71);
  const auto data = InterpolationData::real_input({0.3, 1.5, 3.0}, MatrixXd::Ones(1, 3));
  std::mt19937_64 rng(2);
  const auto rom = galerkin_reduce(sys, oracle::random_orthonormal(60, 3, rng)).as_linear();
  EXPECT_GT(verify_interpolation(sys, rom, data).max(), 1e-3);
}

TEST(VerifyInterpolation, DuplicatedShiftsGiveIdenticalErrors) {
  const auto sys = random_structural_system(20, 1, 1, 72);
  const auto data = InterpolationData::real_input({0.3, 0.3, 2.0}, MatrixXd::Ones(1, 3));
  std::mt19937_64 rng(3);
  const auto rom = galerkin_reduce(sys, oracle::random_orthonormal(20, 3, rng)).as_linear();
  const auto e = verify_interpolation(sys, rom, data);
  EXPECT_EQ(e.input[0], e.input[1]);
}

TEST(PrincipalAngle, AgreesWithProjectorOracle) {
  std::mt19937_64 rng(90);
  const MatrixXd A = oracle::random_matrix(15, 3, rng);
  MatrixXd B = A + 1e-3 * oracle::random_matrix(15, 3, rng);
  EXPECT_NEAR(std::sin(max_principal_angle(A, B)), oracle::projector_distance(A, B), 1e-10);
  EXPECT_LE(max_principal_angle(A, A * Eigen::Matrix3d::Random()), 1e-10);
}
