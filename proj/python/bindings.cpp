#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "somor/baselines.hpp"
#include "somor/chain.hpp"
#include "somor/experiment.hpp"
#include "somor/krylov.hpp"
#include "somor/manifest.hpp"
#include "somor/mmio.hpp"
#include "somor/nlmm.hpp"
#include "somor/reduce.hpp"
#include "somor/timeint.hpp"
#include "somor/verify.hpp"

namespace py = pybind11;
using namespace somor;

namespace {

InputFn wrap_input(const py::object& F, Eigen::Index m) {
  if (F.is_none()) return [m](double) { return VectorXd::Zero(m); };
  auto fn = F.cast<std::function<VectorXd(double)>>();
  return [fn, m](double t) {
    VectorXd v = fn(t);
    if (v.size() != m) throw ArgumentError("input callback returned " + std::to_string(v.size()) + " values, expected " +
                                           std::to_string(m));
    return v;
  };
}

GeneralizedAlphaConfig integrator(double h, double rho_inf) {
  GeneralizedAlphaConfig cfg;
  cfg.h = h;
  cfg.rho_inf = rho_inf;
  cfg.validate();
  return cfg;
}

VectorXd or_zero(const std::optional<VectorXd>& v, Eigen::Index n) { return v ? *v : VectorXd::Zero(n); }

py::dict basis_dict(const OrthonormalBasis& b) {
  py::dict d;
  d["V"] = b.V;
  d["method"] = b.method;
  d["raw"] = b.raw;
  d["singular_values"] = b.singular_values;
  d["warnings"] = b.warnings;
  d["deflation"] = b.deflation;
  return d;
}

py::dict cost_dict(const instrumentation::Counters& c) {
  py::dict d;
  d["full_order_steps"] = c.full_order_steps;
  d["reduced_steps"] = c.reduced_steps;
  d["newton_solves"] = c.newton_solves;
  d["newton_iterations"] = c.newton_iterations;
  return d;
}

DeflationMode deflation_mode(std::optional<Eigen::Index> rank, double tau) {
  if (rank) return {DeflationMode::Kind::fixed, *rank, tau};
  return {DeflationMode::Kind::threshold, 0, tau};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Second-order model reduction: Krylov, SO-NLMM, POD and modal bases.";

  auto base = py::register_exception<Error>(m, "SomorError", PyExc_RuntimeError);
  py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<SingularityError>(m, "SingularityError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
  py::register_exception<UnsupportedError>(m, "UnsupportedError", base.ptr());
  py::register_exception<EvaluationError>(m, "EvaluationError", base.ptr());
  py::register_exception<RangeError>(m, "RangeError", base.ptr());

  py::class_<LinearSecondOrderSystem>(m, "LinearSystem")
      .def(py::init<MatrixXd, MatrixXd, MatrixXd, MatrixXd, MatrixXd>(), py::arg("M"), py::arg("D"), py::arg("K"),
           py::arg("B"), py::arg("C"))
      .def_readonly("M", &LinearSecondOrderSystem::M)
      .def_readonly("D", &LinearSecondOrderSystem::D)
      .def_readonly("K", &LinearSecondOrderSystem::K)
      .def_readonly("B", &LinearSecondOrderSystem::B)
      .def_readonly("C", &LinearSecondOrderSystem::C)
      .def_property_readonly("n", &LinearSecondOrderSystem::n)
      .def("transfer_function", [](const LinearSecondOrderSystem& s, cplx z) { return transfer_function(s, z); },
           py::arg("s"));

  py::class_<NonlinearSecondOrderSystem>(m, "NonlinearSystem")
      .def(py::init([](MatrixXd M, MatrixXd D, MatrixXd B, MatrixXd C, ForceFn f, std::optional<JacobianFn> J) {
             return NonlinearSecondOrderSystem(std::move(M), std::move(D), std::move(B), std::move(C), std::move(f),
                                               J ? *J : JacobianFn{}, "python");
           }),
           py::arg("M"), py::arg("D"), py::arg("B"), py::arg("C"), py::arg("force"), py::arg("jacobian") = py::none())
      .def_property_readonly("M", &NonlinearSecondOrderSystem::M)
      .def_property_readonly("D", &NonlinearSecondOrderSystem::D)
      .def_property_readonly("B", &NonlinearSecondOrderSystem::B)
      .def_property_readonly("C", &NonlinearSecondOrderSystem::C)
      .def_property_readonly("n", &NonlinearSecondOrderSystem::n)
      .def("force", [](const NonlinearSecondOrderSystem& s, const VectorXd& q) { return eval_force(s, q); })
      .def("jacobian", [](const NonlinearSecondOrderSystem& s, const VectorXd& q) { return eval_jacobian(s, q); })
      .def("linearize", [](const NonlinearSecondOrderSystem& s, std::optional<VectorXd> q0) {
        return linearize(s, or_zero(q0, s.n())).system;
      }, py::arg("q0") = py::none());

  m.def("wrap_linear", &wrap_linear, py::arg("system"));

  m.def(
      "duffing_chain",
      [](int n_masses, double mass, double k_lin, double k_quad, double k_cub, double cub_spread, std::uint64_t seed,
         double rayleigh_alpha, double rayleigh_beta, int input_node, int output_node) {
        DuffingChainSpec s;
        s.n_masses = n_masses;
        s.mass = mass;
        s.k_lin = k_lin;
        s.k_quad = k_quad;
        s.k_cub = k_cub;
        s.cub_spread = cub_spread;
        s.seed = seed;
        s.input_node = input_node;
        s.output_node = output_node;
        if (rayleigh_alpha != 0.0 || rayleigh_beta != 0.0) s.rayleigh = RayleighSpec{rayleigh_alpha, rayleigh_beta, {}};
        return build_duffing_chain(s);
      },
      py::arg("n_masses"), py::arg("mass") = 1.0, py::arg("k_lin") = 1.0, py::arg("k_quad") = 0.0,
      py::arg("k_cub") = 0.0, py::arg("cub_spread") = 0.0, py::arg("seed") = 1, py::arg("rayleigh_alpha") = 0.0,
      py::arg("rayleigh_beta") = 0.0, py::arg("input_node") = -1, py::arg("output_node") = -1,
      "Fixed-free Duffing chain; nodes are 1-based, -1 is the tip.");

  m.def("random_structural_system", &random_structural_system, py::arg("n"), py::arg("m") = 1, py::arg("p") = 1,
        py::arg("seed") = kVerifySeed);

  m.def(
      "tangential_basis",
      [](const LinearSecondOrderSystem& s, const std::vector<double>& shifts, std::optional<MatrixXd> R) {
        const auto r = static_cast<Eigen::Index>(shifts.size());
        return basis_dict(tangential_basis(s, InterpolationData::real_input(shifts, R ? *R : MatrixXd::Ones(s.m(), r))));
      },
      py::arg("system"), py::arg("shifts"), py::arg("R") = py::none(),
      "Basis of K(s_i)^-1 B r_i; R defaults to ones.");
  m.def(
      "soar_basis",
      [](const LinearSecondOrderSystem& s, cplx sigma, int order) { return basis_dict(soar_basis(s, sigma, order)); },
      py::arg("system"), py::arg("sigma"), py::arg("order"));
  m.def(
      "multimoment_basis",
      [](const LinearSecondOrderSystem& s, cplx sigma, int order) {
        return basis_dict(block_multimoment_basis(s, sigma, order));
      },
      py::arg("system"), py::arg("sigma"), py::arg("order"));
  m.def("compute_moment", &compute_moment, py::arg("system"), py::arg("sigma"), py::arg("i"), py::arg("r"));

  m.def(
      "nlmm_sinusoid_basis",
      [](const NonlinearSecondOrderSystem& s, const std::vector<double>& omegas, double amplitude, double force_gain,
         double t0, double t1, std::size_t snapshots, std::optional<Eigen::Index> rank, double tau,
         const std::string& guess) {
        const auto times = equidistant_snapshots(t0, t1, snapshots);
        std::vector<GeneratorTrajectory> trs;
        for (double w : omegas) trs.push_back(sinusoid_trajectory(amplitude, w, force_gain, VectorXd::Ones(s.m()), times));
        NlmmConfig cfg;
        cfg.deflation = deflation_mode(rank, tau);
        cfg.initial_guess = initial_guess_from_string(guess);
        const auto res = build_basis(s, trs, cfg);
        py::dict d = basis_dict(res.basis);
        d["cost"] = cost_dict(res.cost);
        d["planned_solves"] = res.planned_solves;
        d["skipped"] = res.skipped;
        return d;
      },
      py::arg("system"), py::arg("omegas"), py::arg("amplitude") = 1.0, py::arg("force_gain") = 1.0,
      py::arg("t0") = 0.0, py::arg("t1") = 1.0, py::arg("snapshots") = 10, py::arg("rank") = py::none(),
      py::arg("tau") = 1e-10, py::arg("initial_guess") = "previous_snapshot",
      "SO-NLMM basis from prescribed sinusoid generators q_i = a sin(w_i t), F = gain q_i.");
  m.def(
      "nlmm_linear_basis",
      [](const NonlinearSecondOrderSystem& s, const std::vector<double>& shifts, double t0, double t1,
         std::size_t snapshots, std::optional<Eigen::Index> rank, double tau) {
        LinearGenerator gen;
        const auto r = static_cast<Eigen::Index>(shifts.size());
        gen.sigma = Eigen::Map<const VectorXd>(shifts.data(), r).cast<cplx>();
        gen.R = MatrixXcd::Ones(s.m(), r);
        gen.q0 = VectorXd::Ones(r);
        std::vector<GeneratorTrajectory> trs;
        const auto times = equidistant_snapshots(t0, t1, snapshots);
        for (Eigen::Index i = 0; i < r; ++i) trs.push_back(sample_linear(gen, i, times));
        NlmmConfig cfg;
        cfg.deflation = deflation_mode(rank, tau);
        const auto res = build_basis(s, trs, cfg);
        py::dict d = basis_dict(res.basis);
        d["cost"] = cost_dict(res.cost);
        d["planned_solves"] = res.planned_solves;
        return d;
      },
      py::arg("system"), py::arg("shifts"), py::arg("t0") = 0.0, py::arg("t1") = 1.0, py::arg("snapshots") = 3,
      py::arg("rank") = py::none(), py::arg("tau") = 1e-8);
  m.def(
      "nlmm_zero_column",
      [](const NonlinearSecondOrderSystem& s, const VectorXd& r, double q0) {
        return nlmm_column_zero_sg(s, r, q0, VectorXd::Zero(s.n())).v;
      },
      py::arg("system"), py::arg("r"), py::arg("q0"));

  m.def(
      "pod_basis",
      [](const MatrixXd& S, Eigen::Index r) {
        SnapshotMatrix sm;
        sm.S = S;
        return basis_dict(pod_basis(sm, r));
      },
      py::arg("snapshots"), py::arg("rank"));
  m.def(
      "modal_basis",
      [](const LinearSecondOrderSystem& s, Eigen::Index r) {
        const auto mb = modal_basis(s, r);
        py::dict d = basis_dict(mb.basis);
        d["omega"] = mb.modes.omega;
        d["shapes"] = mb.modes.shapes;
        return d;
      },
      py::arg("system"), py::arg("rank"));

  py::class_<ReducedSecondOrderModel>(m, "ReducedModel")
      .def_readonly("M_r", &ReducedSecondOrderModel::M_r)
      .def_readonly("D_r", &ReducedSecondOrderModel::D_r)
      .def_readonly("B_r", &ReducedSecondOrderModel::B_r)
      .def_readonly("C_r", &ReducedSecondOrderModel::C_r)
      .def_readonly("K_r", &ReducedSecondOrderModel::K_r)
      .def_readonly("V", &ReducedSecondOrderModel::V)
      .def_property_readonly("r", &ReducedSecondOrderModel::r)
      .def("force", &ReducedSecondOrderModel::reduced_force)
      .def("jacobian", &ReducedSecondOrderModel::reduced_jacobian)
      .def("lift", [](const ReducedSecondOrderModel& rom, const VectorXd& q) { return lift(rom, q); });

  m.def("galerkin_reduce", py::overload_cast<const NonlinearSecondOrderSystem&, const MatrixXd&>(&galerkin_reduce),
        py::arg("system"), py::arg("V"));
  m.def("galerkin_reduce", py::overload_cast<const LinearSecondOrderSystem&, const MatrixXd&>(&galerkin_reduce),
        py::arg("system"), py::arg("V"));
  m.def("petrov_galerkin_reduce", &petrov_galerkin_reduce, py::arg("system"), py::arg("V"), py::arg("W"));

  auto traj = [](const Trajectory& tr) {
    py::dict d;
    d["t"] = tr.times;
    d["Q"] = tr.Q;
    d["Qd"] = tr.Qd;
    d["Y"] = tr.Y;
    return d;
  };
  m.def(
      "integrate",
      [traj](const NonlinearSecondOrderSystem& s, const py::object& F, double T, std::optional<VectorXd> q0,
             std::optional<VectorXd> qd0, double h, double rho_inf) {
        return traj(integrate(s, wrap_input(F, s.m()), or_zero(q0, s.n()), or_zero(qd0, s.n()), T,
                              integrator(h, rho_inf)));
      },
      py::arg("system"), py::arg("F"), py::arg("T"), py::arg("q0") = py::none(), py::arg("qd0") = py::none(),
      py::arg("h") = 1e-3, py::arg("rho_inf") = 0.9, "Generalized-alpha; F(t) -> input vector, or None.");
  m.def(
      "integrate",
      [traj](const LinearSecondOrderSystem& s, const py::object& F, double T, std::optional<VectorXd> q0,
             std::optional<VectorXd> qd0, double h, double rho_inf) {
        return traj(integrate(s, wrap_input(F, s.m()), or_zero(q0, s.n()), or_zero(qd0, s.n()), T,
                              integrator(h, rho_inf)));
      },
      py::arg("system"), py::arg("F"), py::arg("T"), py::arg("q0") = py::none(), py::arg("qd0") = py::none(),
      py::arg("h") = 1e-3, py::arg("rho_inf") = 0.9);
  m.def(
      "integrate",
      [traj](const ReducedSecondOrderModel& rom, const py::object& F, double T, std::optional<VectorXd> q0,
             std::optional<VectorXd> qd0, double h, double rho_inf) {
        return traj(integrate(rom, wrap_input(F, rom.B_r.cols()), or_zero(q0, rom.r()), or_zero(qd0, rom.r()), T,
                              integrator(h, rho_inf)));
      },
      py::arg("rom"), py::arg("F"), py::arg("T"), py::arg("q0") = py::none(), py::arg("qd0") = py::none(),
      py::arg("h") = 1e-3, py::arg("rho_inf") = 0.9);

  m.def(
      "static_equilibrium",
      [](const NonlinearSecondOrderSystem& s, const VectorXd& F) { return static_equilibrium(s, F).q; },
      py::arg("system"), py::arg("F"));

  m.def(
      "run_experiment",
      [](const std::string& manifest, std::optional<std::string> out_dir) {
        ReportBundle b;
        {
          py::gil_scoped_release release;
          b = run_experiment(load_manifest(manifest), out_dir);
        }
        py::dict errors, costs, ranks;
        for (const auto& mo : b.methods) {
          errors[py::str(mo.basis.method)] = mo.error.relative_l2;
          costs[py::str(mo.basis.method)] = cost_dict(mo.basis.cost);
          ranks[py::str(mo.basis.method)] = mo.basis.basis.rank();
        }
        py::dict d;
        d["out_dir"] = b.out_dir;
        d["relative_l2"] = errors;
        d["cost"] = costs;
        d["rank"] = ranks;
        d["files"] = b.files;
        d["flags"] = b.flags;
        d["nonlinear_ratio"] = b.nonlinear_ratio;
        return d;
      },
      py::arg("manifest"), py::arg("out_dir") = py::none(), "Runs a manifest and returns the error summary.");

  m.def(
      "verify",
      [](const std::string& suite, std::uint64_t seed) {
        py::list out;
        for (const auto& c : run_verify_suite(suite, seed)) {
          out.append(py::make_tuple(c.name, c.passed, c.value, c.tolerance));
        }
        return out;
      },
      py::arg("suite") = "all", py::arg("seed") = kVerifySeed);

  m.def("read_matrix_market", &read_matrix_market, py::arg("path"));
  m.def("write_matrix_market", &write_matrix_market, py::arg("path"), py::arg("A"));
}
