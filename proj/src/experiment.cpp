#include "somor/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "somor/csv.hpp"
#include "somor/krylov.hpp"
#include "somor/mmio.hpp"

namespace somor {

namespace fs = std::filesystem;

NonlinearSecondOrderSystem build_model(const ModelSpec& spec) {
  if (spec.kind == ModelSpec::Kind::chain) return build_duffing_chain(spec.chain);
  return wrap_linear(load_linear_system(spec.files));
}

InputFn sine_input(const SineInput& in, Eigen::Index m) {
  const double a = in.amplitude, w = in.frequency;
  return [a, w, m](double t) -> VectorXd { return VectorXd::Constant(m, a * std::sin(w * t)); };
}

std::vector<GeneratorTrajectory> generator_trajectories(const GeneratorSpec& g, Eigen::Index m) {
  std::vector<GeneratorTrajectory> out;
  const VectorXd ones = VectorXd::Ones(m);
  switch (g.kind) {
    case GeneratorSpec::Kind::prescribed_sinusoid: {
      const auto times = equidistant_snapshots(g.window_start, g.window_end, g.snapshots);
      for (std::size_t i = 0; i < g.frequencies.size(); ++i) {
        auto tr = sinusoid_trajectory(g.amplitude, g.frequencies[i], g.force_gain, ones, times);
        tr.column = static_cast<Eigen::Index>(i);
        out.push_back(std::move(tr));
      }
      break;
    }
    case GeneratorSpec::Kind::linear: {
      const auto r = static_cast<Eigen::Index>(g.shifts.size());
      LinearGenerator gen;
      gen.sigma.resize(r);
      gen.q0.resize(r);
      for (Eigen::Index i = 0; i < r; ++i) {
        gen.sigma(i) = g.shifts[static_cast<std::size_t>(i)];
        gen.q0(i) = g.q0.size() == 1 ? g.q0[0] : g.q0.at(static_cast<std::size_t>(i));
      }
      gen.R = MatrixXcd::Ones(m, r);
      gen.validate();
      const auto times = equidistant_snapshots(g.window_start, g.window_end, g.snapshots);
      for (Eigen::Index i = 0; i < r; ++i) out.push_back(sample_linear(gen, i, times));
      break;
    }
    case GeneratorSpec::Kind::zero: {
      ZeroGenerator gen;
      const auto r = static_cast<Eigen::Index>(g.q0.size());
      gen.R = MatrixXd::Ones(m, r);
      gen.q0 = Eigen::Map<const VectorXd>(g.q0.data(), r);
      for (Eigen::Index i = 0; i < r; ++i) out.push_back(sample_zero(gen, i));
      break;
    }
  }
  return out;
}

MethodBasis build_method_basis(const RunManifest& manifest, const NonlinearSecondOrderSystem& sys,
                               const std::string& method) {
  MethodBasis mb;
  mb.method = method;
  const auto before = instrumentation::counters();
  const auto start = std::chrono::steady_clock::now();
  const VectorXd origin = VectorXd::Zero(sys.n());
  if (method == "nlmm") {
    const auto trajectories = generator_trajectories(manifest.generator, sys.m());
    NlmmResult res = build_basis(sys, trajectories, manifest.nlmm);
    mb.basis = std::move(res.basis);
    mb.planned_solves = res.planned_solves;
    mb.coupled_residual = std::move(res.coupled_residual);
  } else if (method == "pod") {
    SnapshotMatrix S = collect_snapshots(sys, sine_input(manifest.training, sys.m()), manifest.training.duration,
                                         manifest.integrator, manifest.pod_stride);
    mb.basis = pod_basis(S, manifest.pod_rank);
    mb.training_snapshots = std::move(S.S);
  } else if (method == "modal") {
    mb.basis = modal_basis(linearize(sys, origin).system, manifest.modal_rank).basis;
  } else if (method == "krylov") {
    const auto& shifts = manifest.krylov_shifts.empty() ? manifest.generator.shifts : manifest.krylov_shifts;
    const auto data = InterpolationData::real_input(
        shifts, MatrixXd::Ones(sys.m(), static_cast<Eigen::Index>(shifts.size())));
    mb.basis = tangential_basis(linearize(sys, origin).system, data, Side::input);
  } else if (method == "identity") {
    mb.basis.V = MatrixXd::Identity(sys.n(), sys.n());
    mb.basis.method = "identity";
  } else {
    throw ArgumentError("unknown method '" + method + "'");
  }
  mb.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  mb.cost = instrumentation::delta(instrumentation::counters(), before);
  return mb;
}

double nonlinear_force_ratio(const NonlinearSecondOrderSystem& sys, const MatrixXd& Q) {
  const MatrixXd K0 = eval_jacobian(sys, VectorXd::Zero(sys.n()));
  const VectorXd f0 = eval_force(sys, VectorXd::Zero(sys.n()));
  double nl = 0.0, lin = 0.0;
  for (Eigen::Index k = 0; k < Q.cols(); ++k) {
    const VectorXd Kq = K0 * Q.col(k);
    nl = std::max(nl, (eval_force(sys, Q.col(k)) - f0 - Kq).norm());
    lin = std::max(lin, Kq.norm());
  }
  return lin > 0.0 ? nl / lin : 0.0;
}

const MethodOutcome* ReportBundle::find(const std::string& method) const {
  for (const auto& m : methods) {
    if (m.basis.method == method) return &m;
  }
  return nullptr;
}

unsigned worker_count() {
  if (const char* env = std::getenv("SOMOR_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void save_basis(const std::string& dir, const MethodBasis& mb, const RunManifest& manifest) {
  fs::create_directories(dir);
  csv::write_matrix((fs::path(dir) / "basis.csv").string(), mb.basis.V, "v");
  std::ofstream meta(fs::path(dir) / "basis_meta.txt");
  meta << "method = " << mb.method << "\n";
  meta << "n = " << mb.basis.n() << "\n";
  meta << "rank = " << mb.basis.rank() << "\n";
  meta << "manifest = " << manifest.source << "\n";
  meta << "newton_solves = " << mb.cost.newton_solves << "\n";
  meta << "full_order_steps = " << mb.cost.full_order_steps << "\n";
  for (Eigen::Index i = 0; i < mb.basis.singular_values.size(); ++i) {
    meta << "singular_value_" << i + 1 << " = " << csv::format(mb.basis.singular_values(i)) << "\n";
  }
  for (const auto& d : mb.basis.deflation) meta << "deflation = " << d << "\n";
  for (const auto& w : mb.basis.warnings) meta << "warning = " << w << "\n";
}

void export_rom(const std::string& dir, const ReducedSecondOrderModel& rom) {
  fs::create_directories(dir);
  auto p = [&](const char* name) { return (fs::path(dir) / name).string(); };
  write_matrix_market(p("M_r.mtx"), rom.M_r);
  write_matrix_market(p("D_r.mtx"), rom.D_r);
  if (rom.K_r) write_matrix_market(p("K_r.mtx"), *rom.K_r);
  write_matrix_market(p("B_r.mtx"), rom.B_r);
  write_matrix_market(p("C_r.mtx"), rom.C_r);
  write_matrix_market(p("V.mtx"), rom.V);
}

namespace {

const char* kPlotScript = R"(# Plots the FOM/ROM outputs and the relative output error of a compare run.
# Usage: python plot_results.py [bundle_dir]
import csv
import sys
from pathlib import Path

import matplotlib.pyplot as plt

root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent


def columns(name):
    with open(root / name, newline="") as fh:
        rows = list(csv.reader(fh))
    header, data = rows[0], rows[1:]
    return {h: [float(r[j]) for r in data] for j, h in enumerate(header)}


out = columns("outputs.csv")
err = columns("error_output_rel.csv")

fig, ax = plt.subplots(2, 1, figsize=(8, 7), sharex=True)
for name, values in out.items():
    if name != "t":
        ax[0].plot(out["t"], values, label=name, lw=1.0)
ax[0].set_ylabel("output y")
ax[0].legend()
for name, values in err.items():
    if name != "t":
        ax[1].semilogy(err["t"], [max(v, 1e-16) for v in values], label=name, lw=1.0)
ax[1].set_xlabel("t [s]")
ax[1].set_ylabel("|y - y_r| / ||y||_L2")
ax[1].legend()
fig.tight_layout()
fig.savefig(root / "results.png", dpi=150)
)";

class BundleWriter {
 public:
  explicit BundleWriter(ReportBundle& b) : bundle_(b) {}

  std::string path(const std::string& name) {
    bundle_.files.push_back(name);
    return (fs::path(bundle_.out_dir) / name).string();
  }

 private:
  ReportBundle& bundle_;
};

void write_outputs(BundleWriter& w, const ReportBundle& b) {
  csv::Table outputs, errors;
  outputs.header.push_back("t");
  errors.header.push_back("t");
  for (Eigen::Index i = 0; i < b.fom.Y.rows(); ++i) outputs.header.push_back("fom_y_" + std::to_string(i + 1));
  for (const auto& m : b.methods) {
    for (Eigen::Index i = 0; i < m.trajectory.Y.rows(); ++i) {
      outputs.header.push_back(m.basis.method + "_y_" + std::to_string(i + 1));
    }
    errors.header.push_back(m.basis.method);
  }
  for (std::size_t k = 0; k < b.fom.size(); ++k) {
    const auto c = static_cast<Eigen::Index>(k);
    std::vector<double> row{b.fom.times[k]};
    for (Eigen::Index i = 0; i < b.fom.Y.rows(); ++i) row.push_back(b.fom.Y(i, c));
    for (const auto& m : b.methods) {
      for (Eigen::Index i = 0; i < m.trajectory.Y.rows(); ++i) row.push_back(m.trajectory.Y(i, c));
    }
    outputs.rows.push_back(std::move(row));
  }
  if (!b.methods.empty()) {
    const auto& times = b.methods.front().error.times;
    for (std::size_t k = 0; k < times.size(); ++k) {
      std::vector<double> row{times[k]};
      for (const auto& m : b.methods) row.push_back(m.error.relative[k]);
      errors.rows.push_back(std::move(row));
    }
  }
  csv::write(w.path("outputs.csv"), outputs);
  csv::write(w.path("error_output_rel.csv"), errors);

  csv::Table summary;
  summary.header = {"method", "rank", "relative_l2", "max_abs_error", "max_abs_output"};
  csv::Table cost;
  cost.header = {"method",          "rank",           "newton_solves", "newton_iterations",
                 "full_order_steps", "reduced_steps", "planned_solves"};
  for (const auto& m : b.methods) {
    const auto& e = m.error;
    summary.labels.push_back(m.basis.method);
    summary.rows.push_back(
        {static_cast<double>(m.basis.basis.rank()), e.relative_l2, e.max_abs_error, e.max_abs_output});
    const auto& c = m.basis.cost;
    cost.labels.push_back(m.basis.method);
    cost.rows.push_back({static_cast<double>(m.basis.basis.rank()), static_cast<double>(c.newton_solves),
                         static_cast<double>(c.newton_iterations), static_cast<double>(c.full_order_steps),
                         static_cast<double>(c.reduced_steps), static_cast<double>(m.basis.planned_solves)});
  }
  csv::write(w.path("error_summary.csv"), summary);
  csv::write(w.path("offline_cost.csv"), cost);
}

void write_report(BundleWriter& w, const ReportBundle& b, const RunManifest& manifest,
                  const std::string& failure) {
  std::ofstream rep(w.path("report.txt"));
  rep << "manifest: " << manifest.source << "\n";
  rep << "model: n = " << b.fom.Q.rows() << "\n";
  rep << "integrator: generalized-alpha, rho_inf = " << manifest.integrator.rho_inf
      << ", h = " << manifest.integrator.h << "\n";
  rep << "test input: " << manifest.test.amplitude << " sin(" << manifest.test.frequency << " t) on [0, "
      << manifest.test.duration << "]\n";
  if (!b.nonlinear_ratio_source.empty()) {
    rep << "peak nonlinear/linear force ratio (" << b.nonlinear_ratio_source << " run): " << b.nonlinear_ratio
        << "\n";
  }
  for (const auto& f : b.flags) rep << "flag: " << f << "\n";
  rep << "\nmethod        rank  rel_L2_error   newton_solves  fom_steps  build_seconds\n";
  for (const auto& m : b.methods) {
    char line[160];
    std::snprintf(line, sizeof line, "%-12s  %4ld  %12.4e  %13llu  %9llu  %13.3f\n", m.basis.method.c_str(),
                  static_cast<long>(m.basis.basis.rank()), m.error.relative_l2,
                  static_cast<unsigned long long>(m.basis.cost.newton_solves),
                  static_cast<unsigned long long>(m.basis.cost.full_order_steps), m.basis.seconds);
    rep << line;
  }
  for (const auto& m : b.methods) {
    for (const auto& warn : m.basis.basis.warnings) rep << "warning (" << m.basis.method << "): " << warn << "\n";
  }
  if (!failure.empty()) rep << "\nFAILED: " << failure << "\n";
}

}  // namespace

ReportBundle run_experiment(const RunManifest& manifest, const std::optional<std::string>& out_dir) {
  manifest.validate();
  ReportBundle b;
  b.out_dir = out_dir.value_or(manifest.output_dir);
  fs::create_directories(b.out_dir);
  fs::remove(fs::path(b.out_dir) / "FAILED");
  BundleWriter w(b);

  b.flags.push_back("rho_inf = " + csv::format(manifest.integrator.rho_inf) +
                    (manifest.rho_inf_given ? " (manifest)" : " (default)") +
                    " is an assumed integrator setting, not a calibrated one");
  b.flags.push_back("absolute amplitudes are scaled to this model and are not comparable to other benchmarks");

  std::string stage = "model";
  try {
    const auto sys = build_model(manifest.model);

    std::vector<MethodBasis> bases;
    for (const auto& method : manifest.methods) {
      stage = "basis " + method;
      bases.push_back(build_method_basis(manifest, sys, method));
      if (method == "nlmm" && bases.back().basis.rank() < manifest.nlmm_rank) {
        b.flags.push_back("nlmm basis rank " + std::to_string(bases.back().basis.rank()) + " below requested " +
                          std::to_string(manifest.nlmm_rank));
      }
    }

    stage = "reduction";
    std::vector<ReducedSecondOrderModel> roms;
    for (const auto& mb : bases) {
      roms.push_back(galerkin_reduce(sys, mb.basis.V));
      roms.back().tag = mb.method;
    }

    stage = "integration";
    const InputFn F = sine_input(manifest.test, sys.m());
    const double T = manifest.test.duration;
    const VectorXd zero_n = VectorXd::Zero(sys.n());

    // Slot 0 is the FOM, slot j+1 the j-th ROM.
    std::vector<Trajectory> results(roms.size() + 1);
    std::vector<std::exception_ptr> errors(roms.size() + 1);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t j; (j = next.fetch_add(1)) < results.size();) {
        try {
          if (j == 0) {
            results[0] = integrate(sys, F, zero_n, zero_n, T, manifest.integrator);
          } else {
            const auto& rom = roms[j - 1];
            const VectorXd zr = VectorXd::Zero(rom.r());
            results[j] = integrate(rom, F, zr, zr, T, manifest.integrator);
          }
        } catch (...) {
          errors[j] = std::current_exception();
        }
      }
    };
    const unsigned nthreads = std::min<unsigned>(worker_count(), static_cast<unsigned>(results.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (std::size_t j = 0; j < errors.size(); ++j) {
      if (errors[j]) {
        stage = j == 0 ? "integration fom" : "integration " + bases[j - 1].method;
        std::rethrow_exception(errors[j]);
      }
    }
    b.fom = std::move(results[0]);
    b.fom.input_tag = "test";

    stage = "errors";
    for (std::size_t j = 0; j < roms.size(); ++j) {
      MethodOutcome o{std::move(bases[j]), std::move(roms[j]), std::move(results[j + 1]), {}};
      o.error = steady_state_error(b.fom, o.trajectory, manifest.discard_fraction);
      b.methods.push_back(std::move(o));
    }

    if (const MethodOutcome* pod = b.find("pod"); pod && pod->basis.training_snapshots) {
      b.nonlinear_ratio = nonlinear_force_ratio(sys, *pod->basis.training_snapshots);
      b.nonlinear_ratio_source = "training";
    } else {
      b.nonlinear_ratio = nonlinear_force_ratio(sys, b.fom.Q);
      b.nonlinear_ratio_source = "test";
    }

    stage = "output";
    csv::write_trajectory(w.path("trajectory_fom.csv"), b.fom);
    for (const auto& m : b.methods) {
      csv::write_trajectory(w.path("trajectory_" + m.basis.method + ".csv"), m.trajectory);
      if (m.basis.method != "identity") csv::write_matrix(w.path("basis_" + m.basis.method + ".csv"), m.basis.basis.V);
      if (m.basis.basis.singular_values.size() > 0) {
        csv::write_matrix(w.path("singular_values_" + m.basis.method + ".csv"), m.basis.basis.singular_values, "sigma");
      }
      if (manifest.export_rom) {
        export_rom((fs::path(b.out_dir) / ("rom_" + m.basis.method)).string(), m.rom);
        b.files.push_back("rom_" + m.basis.method);
      }
    }
    write_outputs(w, b);
    {
      std::ofstream(w.path("plot_results.py")) << kPlotScript;
    }
    write_report(w, b, manifest, "");
  } catch (const std::exception& e) {
    const std::string msg = stage + ": " + e.what();
    try {
      if (!b.methods.empty() && b.fom.size() > 0) write_outputs(w, b);
      write_report(w, b, manifest, msg);
    } catch (...) {
    }
    std::ofstream(fs::path(b.out_dir) / "FAILED") << msg << "\n";
    throw;
  }
  return b;
}

}  // namespace somor
