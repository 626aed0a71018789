#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

#include "somor/csv.hpp"
#include "somor/experiment.hpp"
#include "somor/verify.hpp"

namespace fs = std::filesystem;
using namespace somor;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kNumerical = 3;

/// sin:<amplitude>:<frequency> | const:<value> | zero | training | test
InputFn parse_input(const std::string& spec, Eigen::Index m, const RunManifest* manifest) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw ArgumentError("bad number '" + s + "' in input spec '" + spec + "'");
    return v;
  };
  if (parts.size() == 3 && parts[0] == "sin") return sine_input({number(parts[1]), number(parts[2]), 1.0}, m);
  if (parts.size() == 2 && parts[0] == "const") {
    const double v = number(parts[1]);
    return [v, m](double) -> VectorXd { return VectorXd::Constant(m, v); };
  }
  if (spec == "zero") return [m](double) -> VectorXd { return VectorXd::Zero(m); };
  if ((spec == "training" || spec == "test") && manifest) {
    return sine_input(spec == "test" ? manifest->test : manifest->training, m);
  }
  throw ArgumentError("unknown input spec '" + spec + "' (sin:A:w, const:A, zero, training, test)");
}

/// A manifest file, or a directory holding M.mtx, K.mtx, B.mtx and optional D.mtx, C.mtx.
NonlinearSecondOrderSystem load_model(const std::string& model, std::optional<RunManifest>& manifest) {
  if (fs::is_directory(model)) {
    auto f = [&](const char* name) { return (fs::path(model) / name).string(); };
    LinearSystemPaths paths{f("M.mtx"), f("K.mtx"), f("B.mtx"), {}, {}};
    if (fs::exists(f("D.mtx"))) paths.D = f("D.mtx");
    if (fs::exists(f("C.mtx"))) paths.C = f("C.mtx");
    return wrap_linear(load_linear_system(paths));
  }
  manifest = load_manifest(model);
  return build_model(manifest->model);
}

int report_error(const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  if (const auto* err = dynamic_cast<const Error*>(&e)) return err->numerical() ? kNumerical : kValidation;
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return kValidation;
  return kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Second-order model reduction by nonlinear moment matching"};
  app.require_subcommand(1);

  std::string manifest_path, method, out_dir, model, input_spec = "test", rom_basis, suite = "all";
  std::optional<double> duration, step, rho;
  std::uint64_t seed = kVerifySeed;

  auto* reduce = app.add_subcommand("reduce", "Build and save a reduction basis");
  reduce->add_option("--manifest", manifest_path, "Experiment manifest")->required()->check(CLI::ExistingFile);
  reduce->add_option("--method", method, "Basis method")
      ->required()
      ->check(CLI::IsMember({"nlmm", "pod", "modal", "krylov"}));
  reduce->add_option("--out", out_dir, "Output directory")->required();

  auto* simulate = app.add_subcommand("simulate", "Integrate the full model or a Galerkin ROM");
  simulate->add_option("--model", model, "Manifest file or directory of Matrix Market files")->required();
  simulate->add_option("--input", input_spec, "sin:A:w, const:A, zero, training or test");
  simulate->add_option("--rom", rom_basis, "Basis CSV; integrates the Galerkin ROM instead of the FOM");
  simulate->add_option("--out", out_dir, "Output directory")->required();
  simulate->add_option("--duration", duration, "End time [s]");
  simulate->add_option("--step", step, "Time step [s]");
  simulate->add_option("--rho-inf", rho, "Spectral radius at infinity");

  auto* compare = app.add_subcommand("compare", "Run the full FOM/ROM comparison");
  compare->add_option("--manifest", manifest_path, "Experiment manifest")->required()->check(CLI::ExistingFile);
  compare->add_option("--out", out_dir, "Output directory (defaults to the manifest's)");

  auto* verify = app.add_subcommand("verify", "Run property suites");
  verify->add_option("--suite", suite, "Suite")->check(CLI::IsMember({"krylov", "nlmm", "integrator", "all"}));
  verify->add_option("--seed", seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kValidation;
  }

  try {
    if (*reduce) {
      const RunManifest manifest = load_manifest(manifest_path);
      const auto sys = build_model(manifest.model);
      const MethodBasis mb = build_method_basis(manifest, sys, method);
      save_basis(out_dir, mb, manifest);
      std::cout << method << " basis: n = " << mb.basis.n() << ", r = " << mb.basis.rank() << ", written to "
                << out_dir << "\n";
      for (const auto& w : mb.basis.warnings) std::cout << "warning: " << w << "\n";
    } else if (*simulate) {
      std::optional<RunManifest> manifest;
      const auto sys = load_model(model, manifest);
      GeneralizedAlphaConfig cfg = manifest ? manifest->integrator : GeneralizedAlphaConfig{};
      if (step) cfg.h = *step;
      if (rho) cfg.rho_inf = *rho;
      cfg.validate();
      const double T = duration.value_or(manifest ? manifest->test.duration : 1.0);
      const InputFn F = parse_input(input_spec, sys.m(), manifest ? &*manifest : nullptr);
      fs::create_directories(out_dir);
      Trajectory tr;
      if (rom_basis.empty()) {
        const VectorXd z = VectorXd::Zero(sys.n());
        tr = integrate(sys, F, z, z, T, cfg);
      } else {
        const MatrixXd V = csv::read_matrix(rom_basis);
        if (V.rows() != sys.n()) {
          throw ArgumentError("basis has " + std::to_string(V.rows()) + " rows, model has n = " +
                              std::to_string(sys.n()));
        }
        const auto rom = galerkin_reduce(sys, V);
        const VectorXd z = VectorXd::Zero(rom.r());
        tr = integrate(rom, F, z, z, T, cfg);
      }
      const auto path = (fs::path(out_dir) / "trajectory.csv").string();
      csv::write_trajectory(path, tr);
      std::cout << tr.size() << " samples written to " << path << "\n";
    } else if (*compare) {
      const RunManifest manifest = load_manifest(manifest_path);
      std::optional<std::string> out;
      if (!out_dir.empty()) out = out_dir;
      const ReportBundle b = run_experiment(manifest, out);
      std::cout << "bundle: " << b.out_dir << "\n";
      for (const auto& m : b.methods) {
        std::cout << "  " << m.basis.method << ": r = " << m.basis.basis.rank()
                  << ", relative L2 output error = " << m.error.relative_l2 << "\n";
      }
      for (const auto& f : b.flags) std::cout << "flag: " << f << "\n";
    } else if (*verify) {
      const auto results = run_verify_suite(suite, seed);
      bool ok = true;
      for (const auto& r : results) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << "  value=" << r.value << " tol=" << r.tolerance;
        if (!r.detail.empty()) std::cout << "  " << r.detail;
        std::cout << "\n";
        ok = ok && r.passed;
      }
      std::cout << (ok ? "all checks passed" : "some checks failed") << "\n";
      return ok ? kOk : kNumerical;
    }
  } catch (const std::exception& e) {
    return report_error(e);
  }
  return kOk;
}
