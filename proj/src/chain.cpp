#include "somor/chain.hpp"

#include <random>

namespace somor {

void DuffingChainSpec::validate() const {
  if (n_masses < 1) throw ArgumentError("chain needs at least one mass");
  if (!(mass > 0.0)) throw ArgumentError("chain mass must be positive");
  if (!(k_lin > 0.0)) throw ArgumentError("chain k_lin must be positive");
  if (!(cub_spread >= 0.0 && cub_spread < 1.0)) throw ArgumentError("cub_spread must lie in [0, 1)");
  const auto n = static_cast<std::size_t>(n_masses);
  for (const auto* v : {&k_lin_springs, &k_quad_springs, &k_cub_springs}) {
    if (!v->empty() && v->size() != n) throw ArgumentError("per-spring coefficient vectors need n_masses entries");
  }
  for (double k : k_lin_springs) {
    if (!(k > 0.0)) throw ArgumentError("per-spring k_lin must be positive");
  }
  auto node_ok = [&](int node) { return node == -1 || (node >= 1 && node <= n_masses); };
  if (!node_ok(input_node) || !node_ok(output_node)) throw ArgumentError("input/output node out of range");
}

SpringCoefficients spring_coefficients(const DuffingChainSpec& spec) {
  spec.validate();
  const auto n = static_cast<std::size_t>(spec.n_masses);
  SpringCoefficients c;
  c.k1.assign(n, spec.k_lin);
  c.k2.assign(n, spec.k_quad);
  c.k3.assign(n, spec.k_cub);
  if (spec.cub_spread > 0.0) {
    std::mt19937_64 rng(spec.seed);
    for (auto& k : c.k3) {
      // portable uniform in [-1, 1]
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      k *= 1.0 + spec.cub_spread * (2.0 * u - 1.0);
    }
  }
  if (!spec.k_lin_springs.empty()) c.k1 = spec.k_lin_springs;
  if (!spec.k_quad_springs.empty()) c.k2 = spec.k_quad_springs;
  if (!spec.k_cub_springs.empty()) c.k3 = spec.k_cub_springs;
  return c;
}

namespace {

MatrixXd unit_column(Eigen::Index n, int node) {
  MatrixXd e = MatrixXd::Zero(n, 1);
  e(node == -1 ? n - 1 : node - 1, 0) = 1.0;
  return e;
}

}  // namespace

NonlinearSecondOrderSystem build_duffing_chain(const DuffingChainSpec& spec) {
  const SpringCoefficients c = spring_coefficients(spec);
  const Eigen::Index n = spec.n_masses;
  const MatrixXd M = spec.mass * MatrixXd::Identity(n, n);
  const MatrixXd B = unit_column(n, spec.input_node);
  const MatrixXd C = unit_column(n, spec.output_node).transpose();

  auto force = [c, n](const VectorXd& q) -> VectorXd {
    VectorXd f = VectorXd::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto s = static_cast<std::size_t>(j);
      const double d = q(j) - (j > 0 ? q(j - 1) : 0.0);
      const double t = d * (c.k1[s] + d * (c.k2[s] + d * c.k3[s]));
      f(j) += t;
      if (j > 0) f(j - 1) -= t;
    }
    return f;
  };
  auto jacobian = [c, n](const VectorXd& q) -> MatrixXd {
    MatrixXd J = MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto s = static_cast<std::size_t>(j);
      const double d = q(j) - (j > 0 ? q(j - 1) : 0.0);
      const double k = c.k1[s] + d * (2.0 * c.k2[s] + 3.0 * d * c.k3[s]);
      J(j, j) += k;
      if (j > 0) {
        J(j - 1, j - 1) += k;
        J(j, j - 1) -= k;
        J(j - 1, j) -= k;
      }
    }
    return J;
  };
  NonlinearSecondOrderSystem sys(M, MatrixXd::Zero(n, n), B, C, force, jacobian, "duffing-chain");
  if (spec.rayleigh) sys = sys.with_damping(rayleigh_damping(sys, *spec.rayleigh));
  return sys;
}

LinearSecondOrderSystem linear_chain(const DuffingChainSpec& spec) {
  DuffingChainSpec lin = spec;
  lin.k_quad = 0.0;
  lin.k_cub = 0.0;
  lin.cub_spread = 0.0;
  lin.k_quad_springs.clear();
  lin.k_cub_springs.clear();
  auto sys = build_duffing_chain(lin);
  const VectorXd zero = VectorXd::Zero(sys.n());
  return linearize(sys, zero).system;
}

}  // namespace somor
