#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "somor/linalg.hpp"

namespace somor {

/// q̇ = S_v q, F = R q with diagonal S_v = diag(sigma).
struct LinearGenerator {
  VectorXcd sigma;  // r shifts
  MatrixXcd R;      // m×r tangential directions
  VectorXd q0;      // r initial values

  Eigen::Index order() const { return sigma.size(); }
  /// Throws ArgumentError if a direction is zero or dimensions disagree.
  void validate() const;
};

/// q̇ = s_v(q), F = r(q), q(0) = q0, all in ℝʳ.
struct NonlinearGenerator {
  std::function<VectorXd(const VectorXd&)> s_v;
  std::function<MatrixXd(const VectorXd&)> ds_v;  // optional; FD fallback
  std::function<VectorXd(const VectorXd&)> r_map;
  VectorXd q0;
};

/// Constant input F = R q0.
struct ZeroGenerator {
  MatrixXd R;  // m×r
  VectorXd q0;
};

/// Samples of one reduced coordinate q_{r,i} of a generator at snapshots t*_k.
struct GeneratorTrajectory {
  std::vector<double> times;
  std::vector<double> q, qd, qdd;
  std::vector<VectorXd> F;  // m-vectors
  Eigen::Index column = 0;
  std::string kind;

  /// Imaginary parts when the generator shift is complex. NLMM rejects these.
  bool is_complex = false;
  std::vector<double> q_imag, qd_imag, qdd_imag;
  std::vector<VectorXd> F_imag;

  /// Real shift for linear/zero generators; absent for general trajectories.
  std::optional<double> sigma;
  std::vector<std::string> warnings;

  std::size_t size() const { return times.size(); }
  /// Lengths agree and times strictly increase.
  void check() const;
};

/// K equidistant points on (t_a, t_b]. With exclude_start=false the grid is [t_a, t_b].
std::vector<double> equidistant_snapshots(double t_a, double t_b, std::size_t K,
                                          bool exclude_start = true);

GeneratorTrajectory sample_linear(const LinearGenerator& gen, Eigen::Index column,
                                  const std::vector<double>& times);

struct OdeTolerance {
  double rel = 1e-8;
  double abs = 1e-10;
};

/// Samples of every coordinate of a nonlinear generator. One trajectory per
/// coordinate i, times shared.
std::vector<GeneratorTrajectory> sample_nonlinear(const NonlinearGenerator& gen,
                                                  const std::vector<double>& times,
                                                  OdeTolerance tol = {});

using ScalarFn = std::function<double(double)>;
using VectorFn = std::function<VectorXd(double)>;

/// Samples user callbacks directly. Warns (in `warnings`) when qd departs
/// from a finite-difference derivative of q by more than 1e-3 relative.
GeneratorTrajectory prescribed_trajectory(const ScalarFn& q, const ScalarFn& qd,
                                          const ScalarFn& qdd, const VectorFn& F,
                                          const std::vector<double>& times);

/// q = a sin(ωt), F = b·amplitude_force·sin(ωt) with input direction `direction`.
GeneratorTrajectory sinusoid_trajectory(double amplitude, double omega, double force_gain,
                                        const VectorXd& direction,
                                        const std::vector<double>& times);

GeneratorTrajectory sample_zero(const ZeroGenerator& gen, Eigen::Index column);

}  // namespace somor
