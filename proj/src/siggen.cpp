#include "somor/siggen.hpp"

#include <cmath>
#include <limits>

#include <boost/numeric/odeint.hpp>

#include "somor/model.hpp"

namespace somor {

void LinearGenerator::validate() const {
  if (R.cols() != sigma.size()) throw ArgumentError("R must have one column per shift");
  if (q0.size() != sigma.size()) throw ArgumentError("q0 must have one entry per shift");
  for (Eigen::Index i = 0; i < R.cols(); ++i) {
    if (R.col(i).norm() == 0.0) {
      throw ArgumentError("tangential direction " + std::to_string(i) +
                          " is zero; (R, S_v) is not observable");
    }
  }
}

void GeneratorTrajectory::check() const {
  const auto K = times.size();
  if (K == 0) throw ArgumentError("trajectory has no snapshots");
  if (q.size() != K || qd.size() != K || qdd.size() != K || F.size() != K) {
    throw ArgumentError("trajectory sample arrays differ in length");
  }
  for (std::size_t k = 1; k < K; ++k) {
    if (!(times[k] > times[k - 1])) throw ArgumentError("snapshot times must strictly increase");
  }
}

std::vector<double> equidistant_snapshots(double t_a, double t_b, std::size_t K,
                                          bool exclude_start) {
  if (K == 0) throw ArgumentError("snapshot count must be positive");
  if (!(t_b > t_a)) throw ArgumentError("snapshot window must have t_b > t_a");
  std::vector<double> t(K);
  if (exclude_start) {
    const double dt = (t_b - t_a) / static_cast<double>(K);
    for (std::size_t k = 0; k < K; ++k) t[k] = t_a + dt * static_cast<double>(k + 1);
  } else if (K == 1) {
    t[0] = t_a;
  } else {
    const double dt = (t_b - t_a) / static_cast<double>(K - 1);
    for (std::size_t k = 0; k < K; ++k) t[k] = t_a + dt * static_cast<double>(k);
  }
  return t;
}

GeneratorTrajectory sample_linear(const LinearGenerator& gen, Eigen::Index column,
                                  const std::vector<double>& times) {
  gen.validate();
  if (column < 0 || column >= gen.order()) throw ArgumentError("generator column out of range");
  if (times.empty()) throw ArgumentError("no snapshot times given");
  const cplx sigma = gen.sigma(column);
  if (!std::isfinite(sigma.real()) || !std::isfinite(sigma.imag())) {
    throw ArgumentError("shift is not finite");
  }
  const VectorXcd r = gen.R.col(column);
  const double q0 = gen.q0(column);

  GeneratorTrajectory out;
  out.kind = "linear";
  out.column = column;
  out.times = times;
  out.is_complex = sigma.imag() != 0.0 || r.imag().cwiseAbs().maxCoeff() != 0.0;
  if (sigma.imag() == 0.0) out.sigma = sigma.real();
  for (double t : times) {
    const double growth = sigma.real() * t;
    if (growth > 700.0) {
      throw RangeError("exp(sigma t) overflows at t=" + std::to_string(t) +
                       "; use a shorter snapshot window");
    }
    const cplx q = std::exp(sigma * t) * q0;
    const cplx qd = sigma * q;
    const cplx qdd = sigma * qd;
    const VectorXcd F = r * q;
    out.q.push_back(q.real());
    out.qd.push_back(qd.real());
    out.qdd.push_back(qdd.real());
    out.F.push_back(F.real());
    if (out.is_complex) {
      out.q_imag.push_back(q.imag());
      out.qd_imag.push_back(qd.imag());
      out.qdd_imag.push_back(qdd.imag());
      out.F_imag.push_back(F.imag());
    }
  }
  if (out.is_complex) out.warnings.push_back("complex shift produces a complex trajectory");
  out.check();
  return out;
}

std::vector<GeneratorTrajectory> sample_nonlinear(const NonlinearGenerator& gen,
                                                  const std::vector<double>& times,
                                                  OdeTolerance tol) {
  namespace odeint = boost::numeric::odeint;
  using State = std::vector<double>;
  if (!gen.s_v || !gen.r_map) throw ArgumentError("nonlinear generator needs s_v and r_map");
  if (times.empty()) throw ArgumentError("no snapshot times given");
  const auto r = gen.q0.size();
  if (r == 0) throw ArgumentError("generator state is empty");

  auto to_eigen = [](const State& x) {
    return Eigen::Map<const VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())).eval();
  };
  auto rhs = [&](const State& x, State& dxdt, double) {
    VectorXd s = gen.s_v(to_eigen(x));
    dxdt.assign(s.data(), s.data() + s.size());
  };

  // Integration always starts at t=0 where q = q0.
  std::vector<double> grid;
  const bool prepend = times.front() > 0.0;
  if (prepend) grid.push_back(0.0);
  grid.insert(grid.end(), times.begin(), times.end());
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw ArgumentError("snapshot times must strictly increase");
  }
  if (grid.front() < 0.0) throw ArgumentError("snapshot times must be nonnegative");

  std::vector<VectorXd> states;
  State x(gen.q0.data(), gen.q0.data() + r);
  try {
    auto stepper = odeint::make_dense_output(tol.abs, tol.rel, odeint::runge_kutta_dopri5<State>());
    const double dt0 = grid.size() > 1 ? (grid[1] - grid[0]) * 1e-3 : 1e-6;
    odeint::integrate_times(stepper, rhs, x, grid.begin(), grid.end(), dt0,
                            [&](const State& s, double) { states.push_back(to_eigen(s)); });
  } catch (const std::exception& e) {
    throw ConvergenceError(std::string("generator-unstable: integration failed: ") + e.what());
  }
  if (prepend) states.erase(states.begin());
  if (states.size() != times.size()) throw ConvergenceError("generator-unstable: missing samples");

  std::vector<GeneratorTrajectory> out(static_cast<std::size_t>(r));
  for (Eigen::Index i = 0; i < r; ++i) {
    auto& tr = out[static_cast<std::size_t>(i)];
    tr.kind = "nonlinear";
    tr.column = i;
    tr.times = times;
  }
  for (const auto& q : states) {
    if (!q.allFinite()) throw ConvergenceError("generator-unstable: non-finite state");
    VectorXd s = gen.s_v(q);
    MatrixXd ds = gen.ds_v ? gen.ds_v(q) : finite_difference_jacobian(gen.s_v, q);
    VectorXd acc = ds * s;
    for (Eigen::Index i = 0; i < r; ++i) {
      auto& tr = out[static_cast<std::size_t>(i)];
      VectorXd qi = VectorXd::Zero(r);
      qi(i) = q(i);
      tr.q.push_back(q(i));
      tr.qd.push_back(s(i));
      tr.qdd.push_back(acc(i));
      tr.F.push_back(gen.r_map(qi));
    }
  }
  for (auto& tr : out) tr.check();
  return out;
}

GeneratorTrajectory prescribed_trajectory(const ScalarFn& q, const ScalarFn& qd,
                                          const ScalarFn& qdd, const VectorFn& F,
                                          const std::vector<double>& times) {
  if (times.empty()) throw ArgumentError("no snapshot times given");
  GeneratorTrajectory out;
  out.kind = "prescribed";
  out.times = times;
  for (double t : times) {
    const double a = q(t), b = qd(t), c = qdd(t);
    VectorXd f = F(t);
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !f.allFinite()) {
      throw EvaluationError("prescribed trajectory is non-finite at t=" + std::to_string(t));
    }
    out.q.push_back(a);
    out.qd.push_back(b);
    out.qdd.push_back(c);
    out.F.push_back(std::move(f));

    const double h = 1e-5 * (1.0 + std::abs(t));
    const double fd = (q(t + h) - q(t - h)) / (2.0 * h);
    const double scale = std::max({std::abs(b), std::abs(fd), 1e-300});
    if (std::abs(fd - b) > 1e-3 * std::max(scale, 1.0)) {
      out.warnings.push_back("qd differs from dq/dt at t=" + std::to_string(t));
    }
  }
  out.check();
  return out;
}

GeneratorTrajectory sinusoid_trajectory(double amplitude, double omega, double force_gain,
                                        const VectorXd& direction,
                                        const std::vector<double>& times) {
  auto tr = prescribed_trajectory(
      [=](double t) { return amplitude * std::sin(omega * t); },
      [=](double t) { return amplitude * omega * std::cos(omega * t); },
      [=](double t) { return -amplitude * omega * omega * std::sin(omega * t); },
      [=](double t) -> VectorXd { return direction * (force_gain * amplitude * std::sin(omega * t)); },
      times);
  tr.kind = "sinusoid";
  return tr;
}

GeneratorTrajectory sample_zero(const ZeroGenerator& gen, Eigen::Index column) {
  if (column < 0 || column >= gen.q0.size() || column >= gen.R.cols()) {
    throw ArgumentError("generator column out of range");
  }
  const double q0 = gen.q0(column);
  if (q0 == 0.0) {
    throw ArgumentError("degenerate excitation: q0 of column " + std::to_string(column) + " is zero");
  }
  GeneratorTrajectory out;
  out.kind = "zero";
  out.column = column;
  out.times = {0.0};
  out.q = {q0};
  out.qd = {0.0};
  out.qdd = {0.0};
  out.F = {gen.R.col(column) * q0};
  out.sigma = 0.0;
  return out;
}

}  // namespace somor
