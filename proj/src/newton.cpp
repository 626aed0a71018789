#include "somor/newton.hpp"

#include <cmath>

#include "somor/instrumentation.hpp"

namespace somor {

namespace {

VectorXd newton_step(const MatrixXd& J, const VectorXd& res, NewtonReport& report) {
  try {
    return RealFactorization(J, "Newton jacobian").solve(-res);
  } catch (const SingularityError&) {
    // one shift per factorization; a still-singular J propagates
    report.regularized = true;
    const double n = static_cast<double>(J.rows());
    double lambda = 1e-10 * std::abs(J.trace()) / n;
    if (lambda == 0.0) lambda = 1e-10;
    MatrixXd Jr = J + lambda * MatrixXd::Identity(J.rows(), J.cols());
    return RealFactorization(Jr, "regularized Newton jacobian").solve(-res);
  }
}

}  // namespace

NewtonResult newton_solve(const ResidualFn& residual, const std::function<MatrixXd(const VectorXd&)>& jacobian,
                          const VectorXd& v0, const NewtonConfig& cfg, double scale) {
  if (!(cfg.tol > 0.0)) throw ArgumentError("newton tolerance must be positive");
  auto& counters = instrumentation::counters();
  ++counters.newton_solves;

  NewtonResult out{v0, {}};
  auto& rep = out.report;
  VectorXd res = residual(out.v);
  double norm = res.norm();
  if (!std::isfinite(norm)) throw EvaluationError("Newton residual is non-finite at the initial guess");
  rep.history.push_back(norm);
  const double target = cfg.tol * (1.0 + scale);
  while (norm > target && rep.iterations < cfg.max_iter) {
    VectorXd delta = newton_step(jacobian(out.v), res, rep);
    double step = 1.0;
    VectorXd trial = out.v + delta;
    VectorXd trial_res = residual(trial);
    double trial_norm = trial_res.norm();
    int halvings = 0;
    while (!(trial_norm < norm) && halvings < cfg.max_halvings) {
      step *= 0.5;
      ++halvings;
      trial = out.v + step * delta;
      trial_res = residual(trial);
      trial_norm = trial_res.norm();
    }
    if (halvings > 0) ++rep.line_search_activations;
    ++rep.iterations;
    ++counters.newton_iterations;
    if (!std::isfinite(trial_norm)) break;
    if (!(trial_norm < norm)) {
      // line search exhausted: accept nothing, stop
      break;
    }
    out.v = std::move(trial);
    res = std::move(trial_res);
    norm = trial_norm;
    rep.history.push_back(norm);
  }
  rep.residual = norm;
  rep.converged = norm <= target;
  return out;
}

}  // namespace somor
