#pragma once

#include <functional>
#include <vector>

#include "somor/linalg.hpp"

namespace somor {

struct NewtonConfig {
  double tol = 1e-12;     // on ‖res‖ / (1 + scale)
  int max_iter = 50;
  int max_halvings = 20;  // backtracking line search
};

struct NewtonReport {
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  int line_search_activations = 0;
  bool regularized = false;
  std::vector<double> history;  // ‖res‖ per iterate, starting with v0
};

using ResidualFn = std::function<VectorXd(const VectorXd&)>;

struct NewtonResult {
  VectorXd v;
  NewtonReport report;
};

/// Damped Newton-Raphson on res(v) = 0. Stops once ‖res‖ ≤ tol·(1 + scale).
/// A singular Jacobian is shifted once by λI, λ = 1e-10·trace(J)/n; if that
/// fails a SingularityError is thrown. Non-convergence is reported, not thrown.
NewtonResult newton_solve(const ResidualFn& residual, const std::function<MatrixXd(const VectorXd&)>& jacobian,
                          const VectorXd& v0, const NewtonConfig& cfg = {}, double scale = 0.0);

}  // namespace somor
