#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dwreg/distribution.hpp"
#include "dwreg/optimize.hpp"

namespace dwreg {

/// Outcome of a maximum-likelihood fit; the same shape is used for plain DW,
/// DW regression, Poisson and negative-binomial fits.
struct FitResult {
  std::vector<std::string> parameter_names;
  Eigen::VectorXd estimates;
  double loglik = 0.0;
  /// Estimated covariance of `estimates` (inverse observed information,
  /// mapped through the delta method where the fit used a transformed scale).
  Eigen::MatrixXd vcov;
  double aic = 0.0;
  double bic = 0.0;
  bool converged = false;
  std::size_t n_obs = 0;
  std::size_t n_params = 0;
  std::size_t iterations = 0;

  double standard_error(std::size_t index) const;
  std::size_t index_of(const std::string& name) const;
};

/// Assembles a FitResult, computing aic = -2 loglik + 2 p and
/// bic = -2 loglik + p ln(n) with p = estimates.size(). vcov is symmetrized.
FitResult make_fit_result(std::vector<std::string> names, Eigen::VectorXd estimates, double loglik,
                          Eigen::MatrixXd vcov, std::size_t n_obs, bool converged,
                          std::size_t iterations);

/// Inverse of a Hessian that must be positive definite; throws NumericalError
/// otherwise.
Eigen::MatrixXd invert_information(const Eigen::MatrixXd& information);

/// -sum_i ln(q^(y_i^beta) - q^((y_i+1)^beta)).
/// Throws std::invalid_argument for an empty sample or negative counts and
/// DegenerateLikelihoodError naming the first observation whose probability
/// underflows.
double dw_neg_loglik(std::span<const std::int64_t> sample, const DWParams& params);

/// Plain-sample MLE of (q, beta). Optimizes over a = ln(-ln q), b = ln beta
/// and maps back with a delta-method covariance.
///
/// Throws BoundaryError for an all-zero sample (the likelihood (1-q)^n has no
/// interior maximum). A fit that stops without meeting the convergence test
/// is returned with converged = false.
FitResult fit_dw_mle(std::span<const std::int64_t> sample, const OptimizerConfig& config = {});

/// Starting value for q from the zero proportion, clamped to [0.05, 0.95].
double zero_proportion_start(std::span<const std::int64_t> sample);

struct WaldInterval {
  double estimate = 0.0;
  double standard_error = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.0;
  /// Set when the variance is zero, negative or not finite.
  bool degenerate = false;

  double length() const { return upper - lower; }
};

/// estimate -/+ z_{(1+level)/2} * sqrt(vcov[index, index]).
WaldInterval wald_interval(const FitResult& fit, double level, std::size_t index);

}  // namespace dwreg
