#pragma once

#include <cstddef>
#include <functional>

#include <Eigen/Dense>

namespace dwreg {

/// Settings shared by every maximum-likelihood fit.
struct OptimizerConfig {
  /// Converged once an accepted step changes the objective by less than this.
  double loglik_tolerance = 1e-8;
  std::size_t max_iterations = 10'000;
  /// Relative step for the finite-difference Hessian.
  double hessian_step = 1e-4;

  void validate() const;
};

/// Objective to minimize. May return +inf (or NaN) outside its domain; the
/// optimizer treats such points as infeasible.
using Objective = std::function<double(const Eigen::VectorXd&)>;

struct OptimizationResult {
  Eigen::VectorXd argmin;
  double value = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
  /// max_j |g_j| * max(1, |theta_j|) at argmin.
  double scaled_gradient_norm = 0.0;
};

/// Nelder-Mead to find the basin, then BFGS with central-difference gradients
/// to polish. Convergence requires an objective change below
/// loglik_tolerance together with a scaled gradient below 1e-4.
OptimizationResult minimize(const Objective& objective, const Eigen::VectorXd& start,
                            const OptimizerConfig& config);

/// Central-difference gradient with per-coordinate step step*max(1, |theta_j|).
Eigen::VectorXd numeric_gradient(const Objective& objective, const Eigen::VectorXd& at,
                                 double step = 6.0554544523933395e-06);

double scaled_gradient_norm(const Eigen::VectorXd& gradient, const Eigen::VectorXd& at);

/// Central-difference Hessian with per-coordinate step
/// h_j = max(step, step*|theta_j|), symmetrized as (H + H^T)/2.
/// Throws NumericalError if any objective evaluation is not finite.
Eigen::MatrixXd numeric_hessian(const Objective& objective, const Eigen::VectorXd& at, double step);

}  // namespace dwreg
