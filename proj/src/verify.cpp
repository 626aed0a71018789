#include "somor/verify.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "somor/chain.hpp"
#include "somor/krylov.hpp"
#include "somor/nlmm.hpp"
#include "somor/reduce.hpp"
#include "somor/timeint.hpp"

namespace somor {

LinearSecondOrderSystem random_structural_system(Eigen::Index n, Eigen::Index m, Eigen::Index p,
                                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto rand = [&](Eigen::Index r, Eigen::Index c) {
    MatrixXd A(r, c);
    for (Eigen::Index j = 0; j < c; ++j) {
      for (Eigen::Index i = 0; i < r; ++i) A(i, j) = u(rng);
    }
    return A;
  };
  VectorXd mass(n);
  for (Eigen::Index i = 0; i < n; ++i) mass(i) = 1.5 + u(rng);
  MatrixXd M = mass.asDiagonal();
  const MatrixXd A = rand(n, n);
  MatrixXd K = A * A.transpose() / static_cast<double>(n) + MatrixXd::Identity(n, n);
  MatrixXd D = 0.05 * M + 1e-3 * K;
  return LinearSecondOrderSystem(std::move(M), std::move(D), std::move(K), rand(n, m), rand(p, n));
}

namespace {

CheckResult check(std::string name, double value, double tol, std::string detail = {}) {
  return {std::move(name), std::isfinite(value) && value <= tol, value, tol, std::move(detail)};
}

template <class F>
void guarded(std::vector<CheckResult>& out, const std::string& name, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    out.push_back({name, false, std::nan(""), 0.0, std::string("threw: ") + e.what()});
  }
}

double moment_mismatch(const LinearSecondOrderSystem& fom, const LinearSecondOrderSystem& rom, cplx sigma,
                       int order, const VectorXcd& r) {
  double worst = 0.0;
  for (int i = 0; i < order; ++i) {
    const VectorXcd a = compute_moment(fom, sigma, i, r);
    const VectorXcd b = compute_moment(rom, sigma, i, r);
    worst = std::max(worst, (a - b).norm() / std::max(a.norm(), 1e-300));
  }
  return worst;
}

void krylov_suite(std::vector<CheckResult>& out, std::uint64_t seed) {
  const auto sys = random_structural_system(40, 2, 2, seed);
  const std::vector<double> shifts{0.1, 0.5, 1.3, 2.7};
  MatrixXd R(2, 4);
  R << 1.0, 0.3, -0.5, 1.0, 0.2, 1.0, 0.8, -0.4;
  const auto data = InterpolationData::real_input(shifts, R);

  guarded(out, "krylov/tangential-interpolation", [&] {
    const auto basis = tangential_basis(sys, data);
    const auto rom = galerkin_reduce(sys, basis).as_linear();
    out.push_back(check("krylov/tangential-interpolation", verify_interpolation(sys, rom, data).max(), 1e-8));
    out.push_back(check("krylov/sylvester-residual", sylvester_residual(sys, basis, data), 1e-10));
    out.push_back(check("krylov/orthonormality", orthonormality_error(basis.V), 1e-12));
  });

  guarded(out, "krylov/two-sided-hermite", [&] {
    InterpolationData two = data;
    two.mu = two.sigma;
    two.L = MatrixXcd::Ones(2, 4);
    const auto V = tangential_basis(sys, two, Side::input);
    const auto W = tangential_basis(sys, two, Side::output);
    const auto rom = petrov_galerkin_reduce(sys, V.V, W.V).as_linear();
    double worst = verify_interpolation(sys, rom, two).max();
    for (Eigen::Index i = 0; i < two.sigma.size(); ++i) {
      const VectorXcd r = two.R.col(i);
      const VectorXcd l = two.L.col(i);
      const cplx a = l.dot(compute_moment(sys, two.sigma(i), 1, r));
      const cplx b = l.dot(compute_moment(rom, two.sigma(i), 1, r));
      worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), 1e-300));
    }
    out.push_back(check("krylov/two-sided-hermite", worst, 1e-7));
  });

  guarded(out, "krylov/multimoment", [&] {
    const int order = 4;
    const cplx sigma = 0.7;
    const auto basis = block_multimoment_basis(sys, sigma, order);
    const auto rom = galerkin_reduce(sys, basis).as_linear();
    double worst = 0.0;
    for (Eigen::Index j = 0; j < sys.m(); ++j) {
      worst = std::max(worst, moment_mismatch(sys, rom, sigma, order, VectorXcd::Unit(sys.m(), j)));
    }
    out.push_back(check("krylov/multimoment-matching", worst, 1e-7));
  });

  guarded(out, "krylov/soar", [&] {
    const int order = 6;
    const cplx sigma = 0.4;
    const auto basis = soar_basis(sys, sigma, order);
    const auto rom = galerkin_reduce(sys, basis).as_linear();
    out.push_back(check("krylov/soar-orthonormality", orthonormality_error(basis.V), 1e-12));
    out.push_back(check("krylov/soar-moment-matching",
                        moment_mismatch(sys, rom, sigma, order, VectorXcd::Unit(sys.m(), 0)), 1e-6));
  });

  guarded(out, "krylov/complex-pair", [&] {
    InterpolationData c;
    c.sigma = VectorXcd(2);
    c.sigma << cplx(0.3, 1.1), cplx(0.3, -1.1);
    c.R = MatrixXcd::Ones(2, 2);
    const auto basis = tangential_basis(sys, c);
    const auto rom = galerkin_reduce(sys, basis).as_linear();
    out.push_back(check("krylov/complex-pair-interpolation", verify_interpolation(sys, rom, c).max(), 1e-8));
  });
}

NonlinearSecondOrderSystem verify_chain(int n, std::uint64_t seed) {
  DuffingChainSpec spec;
  spec.n_masses = n;
  spec.k_lin = 100.0;
  spec.k_quad = 20.0;
  spec.k_cub = 400.0;
  spec.cub_spread = 0.5;
  spec.seed = seed;
  spec.rayleigh = RayleighSpec{0.1, 1e-3, {}};
  return build_duffing_chain(spec);
}

void nlmm_suite(std::vector<CheckResult>& out, std::uint64_t seed) {
  guarded(out, "nlmm/rational-krylov-collapse", [&] {
    DuffingChainSpec spec;
    spec.n_masses = 30;
    spec.k_lin = 100.0;
    spec.rayleigh = RayleighSpec{0.1, 1e-3, {}};
    const auto lin = linear_chain(spec);
    const auto sys = wrap_linear(lin);
    const std::vector<double> shifts{-0.5, -1.0, -2.0, -4.0, -8.0};
    LinearGenerator gen{Eigen::Map<const VectorXd>(shifts.data(), 5).cast<cplx>(), MatrixXcd::Ones(1, 5),
                        VectorXd::Ones(5)};
    const auto times = equidistant_snapshots(0.0, 1.0, 3);
    std::vector<GeneratorTrajectory> trs;
    for (Eigen::Index i = 0; i < 5; ++i) trs.push_back(sample_linear(gen, i, times));
    NlmmConfig cfg;
    cfg.deflation = {DeflationMode::Kind::threshold, 0, 1e-8};
    const auto res = build_basis(sys, trs, cfg);
    const auto kry = tangential_basis(lin, InterpolationData::real_input(shifts, MatrixXd::Ones(1, 5)));
    out.push_back(check("nlmm/rational-krylov-collapse", max_principal_angle(res.basis.V, kry.V), 1e-8,
                        "rank " + std::to_string(res.basis.rank())));
    out.push_back(check("nlmm/budget-newton-solves", static_cast<double>(res.cost.newton_solves),
                        static_cast<double>(res.planned_solves)));
    out.push_back(check("nlmm/budget-full-order-steps", static_cast<double>(res.cost.full_order_steps), 0.0));
  });

  guarded(out, "nlmm/zero-signal-generator", [&] {
    const auto sys = verify_chain(20, seed);
    const VectorXd r = VectorXd::Ones(1);
    double res_worst = 0.0, eq_worst = 0.0;
    for (double q0 : {0.5, 1.0, 2.0}) {
      VectorXd v0 = VectorXd::Zero(sys.n());
      const auto sol = nlmm_column_zero_sg(sys, r, q0, v0);
      const VectorXd Br = sys.B() * r * q0;
      res_worst = std::max(res_worst, (eval_force(sys, sol.v * q0) - Br).norm() / (1.0 + Br.norm()));
      const auto eq = static_equilibrium(sys, r * q0);
      eq_worst = std::max(eq_worst, (sol.v * q0 - eq.q).norm() / (1.0 + eq.q.norm()));
    }
    out.push_back(check("nlmm/zero-sg-residual", res_worst, 1e-10));
    out.push_back(check("nlmm/zero-sg-equilibrium", eq_worst, 1e-8));
  });

  guarded(out, "nlmm/column-residuals", [&] {
    const auto sys = verify_chain(20, seed);
    const auto times = equidistant_snapshots(0.0, 1.0, 6);
    std::vector<GeneratorTrajectory> trs{sinusoid_trajectory(0.05, 3.0, 50.0, VectorXd::Ones(1), times)};
    const auto res = build_basis(sys, trs);
    double worst = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      const Snapshot s = snapshot_at(trs[0], k);
      const VectorXd v = res.basis.raw.col(static_cast<Eigen::Index>(k));
      const VectorXd BF = sys.B() * s.F;
      const VectorXd r = sys.M() * (v * s.qdd) + sys.D() * (v * s.qd) + eval_force(sys, v * s.q) - BF;
      worst = std::max(worst, r.norm() / (1.0 + BF.norm()));
    }
    out.push_back(check("nlmm/column-residuals", worst, 1e-10));
    out.push_back(check("nlmm/skipped-columns", static_cast<double>(res.skipped.size()), 0.0));
  });
}

void integrator_suite(std::vector<CheckResult>& out, std::uint64_t seed) {
  guarded(out, "integrator/oscillator-accuracy", [&] {
    const double omega = 2.0 * std::numbers::pi;
    const double period = 2.0 * std::numbers::pi / omega;
    LinearSecondOrderSystem osc(MatrixXd::Ones(1, 1), MatrixXd::Zero(1, 1), MatrixXd::Constant(1, 1, omega * omega),
                                MatrixXd::Zero(1, 1), MatrixXd::Ones(1, 1));
    auto error = [&](double h) {
      GeneralizedAlphaConfig cfg;
      cfg.h = h;
      const auto tr = integrate(osc, [](double) { return VectorXd::Zero(1); }, VectorXd::Ones(1),
                                VectorXd::Zero(1), 10.0 * period, cfg);
      double e = 0.0;
      for (std::size_t k = 0; k < tr.size(); ++k) {
        e = std::max(e, std::abs(tr.Q(0, static_cast<Eigen::Index>(k)) - std::cos(omega * tr.times[k])));
      }
      return e;
    };
    const double e1 = error(period / 1000.0);
    const double e2 = error(period / 2000.0);
    const double order = std::log2(e1 / e2);
    out.push_back(check("integrator/oscillator-accuracy", e1, 1e-2));
    out.push_back(check("integrator/convergence-order", std::abs(order - 2.0), 0.2,
                        "order " + std::to_string(order)));
  });

  guarded(out, "integrator/wrapped-linear", [&] {
    const auto lin = random_structural_system(20, 1, 1, seed);
    const auto F = [](double t) { return VectorXd::Constant(1, std::sin(3.0 * t)); };
    const VectorXd z = VectorXd::Zero(20);
    const auto a = integrate(lin, F, z, z, 2.0);
    const auto b = integrate(wrap_linear(lin), F, z, z, 2.0);
    out.push_back(check("integrator/wrapped-linear", (a.Y - b.Y).cwiseAbs().maxCoeff() /
                                                        std::max(a.Y.cwiseAbs().maxCoeff(), 1e-300), 1e-9));
  });

  guarded(out, "integrator/identity-rom", [&] {
    const auto sys = verify_chain(15, seed);
    const auto rom = galerkin_reduce(sys, MatrixXd::Identity(15, 15));
    const auto F = [](double t) { return VectorXd::Constant(1, 30.0 * std::sin(5.0 * t)); };
    const VectorXd z = VectorXd::Zero(15);
    const auto a = integrate(sys, F, z, z, 1.0);
    const auto b = integrate(rom, F, z, z, 1.0);
    const auto err = steady_state_error(a, b);
    out.push_back(check("integrator/identity-rom", err.relative_l2, 1e-10));
  });

  guarded(out, "integrator/static-equilibrium", [&] {
    const auto sys = verify_chain(20, seed);
    const VectorXd F = VectorXd::Constant(1, 40.0);
    const auto a = static_equilibrium(sys, F, EquilibriumStart::linearized);
    const auto b = static_equilibrium(sys, F, EquilibriumStart::zero);
    out.push_back(check("integrator/static-equilibrium-path-independence",
                        (a.q - b.q).norm() / (1.0 + a.q.norm()), 1e-9));
  });
}

}  // namespace

std::vector<CheckResult> run_verify_suite(const std::string& suite, std::uint64_t seed) {
  std::vector<CheckResult> out;
  const bool all = suite == "all";
  if (!all && suite != "krylov" && suite != "nlmm" && suite != "integrator") {
    throw ArgumentError("unknown suite '" + suite + "' (krylov, nlmm, integrator, all)");
  }
  if (all || suite == "krylov") krylov_suite(out, seed);
  if (all || suite == "nlmm") nlmm_suite(out, seed);
  if (all || suite == "integrator") integrator_suite(out, seed);
  return out;
}

}  // namespace somor
