#include "dwreg/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "dwreg/error.hpp"
#include "dwreg/normal.hpp"

namespace dwreg {

double FitResult::standard_error(std::size_t index) const {
  const auto i = static_cast<Eigen::Index>(index);
  if (i >= vcov.rows()) throw std::out_of_range("parameter index out of range");
  const double variance = vcov(i, i);
  return variance >= 0.0 ? std::sqrt(variance) : std::numeric_limits<double>::quiet_NaN();
}

std::size_t FitResult::index_of(const std::string& name) const {
  const auto it = std::find(parameter_names.begin(), parameter_names.end(), name);
  if (it == parameter_names.end()) throw std::out_of_range("no parameter named '" + name + "'");
  return static_cast<std::size_t>(std::distance(parameter_names.begin(), it));
}

FitResult make_fit_result(std::vector<std::string> names, Eigen::VectorXd estimates, double loglik,
                          Eigen::MatrixXd vcov, std::size_t n_obs, bool converged,
                          std::size_t iterations) {
  if (names.size() != static_cast<std::size_t>(estimates.size()) || vcov.rows() != estimates.size() ||
      vcov.cols() != estimates.size()) {
    throw std::invalid_argument("make_fit_result: inconsistent parameter dimensions");
  }
  FitResult fit;
  fit.parameter_names = std::move(names);
  fit.estimates = std::move(estimates);
  fit.loglik = loglik;
  fit.vcov = 0.5 * (vcov + vcov.transpose());
  fit.n_obs = n_obs;
  fit.n_params = static_cast<std::size_t>(fit.estimates.size());
  fit.converged = converged;
  fit.iterations = iterations;
  const auto p = static_cast<double>(fit.n_params);
  fit.aic = -2.0 * loglik + 2.0 * p;
  fit.bic = -2.0 * loglik + p * std::log(static_cast<double>(n_obs));
  return fit;
}

Eigen::MatrixXd invert_information(const Eigen::MatrixXd& information) {
  const Eigen::LLT<Eigen::MatrixXd> llt(information);
  if (llt.info() != Eigen::Success || !information.allFinite()) {
    throw NumericalError("observed information matrix is not positive definite");
  }
  return llt.solve(Eigen::MatrixXd::Identity(information.rows(), information.cols()));
}

double dw_neg_loglik(std::span<const std::int64_t> sample, const DWParams& params) {
  if (sample.empty()) throw std::invalid_argument("dw_neg_loglik: empty sample");
  double total = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (sample[i] < 0) throw std::invalid_argument("dw_neg_loglik: negative count in sample");
    const double log_p = dw_log_pmf(sample[i], params);
    if (!std::isfinite(log_p)) throw DegenerateLikelihoodError(i, sample[i]);
    total -= log_p;
  }
  return total;
}

double zero_proportion_start(std::span<const std::int64_t> sample) {
  if (sample.empty()) return 0.5;
  const auto zeros = std::count(sample.begin(), sample.end(), std::int64_t{0});
  const double proportion = static_cast<double>(zeros) / static_cast<double>(sample.size());
  return std::clamp(1.0 - proportion, 0.05, 0.95);
}

FitResult fit_dw_mle(std::span<const std::int64_t> sample, const OptimizerConfig& config) {
  if (sample.empty()) throw std::invalid_argument("fit_dw_mle: empty sample");
  std::map<std::int64_t, double> counts;
  for (const auto y : sample) {
    if (y < 0) throw std::invalid_argument("fit_dw_mle: negative count in sample");
    counts[y] += 1.0;
  }
  if (counts.size() == 1 && counts.begin()->first == 0) {
    throw BoundaryError("all-zero sample: the likelihood (1-q)^n increases as q -> 0, no interior MLE");
  }

  // ln pmf as a function of (ln lambda, ln beta), summed over distinct values.
  const Objective objective = [&counts](const Eigen::VectorXd& theta) {
    const double lambda = std::exp(theta(0));
    const double beta = std::exp(theta(1));
    if (!(lambda > 0.0) || !std::isfinite(lambda) || !(beta > 0.0) || !std::isfinite(beta)) {
      return std::numeric_limits<double>::infinity();
    }
    const auto params = DWParams::from_rate(lambda, beta);
    double total = 0.0;
    for (const auto& [y, weight] : counts) total -= weight * dw_log_pmf(y, params);
    return std::isnan(total) ? std::numeric_limits<double>::infinity() : total;
  };

  const double q0 = zero_proportion_start(sample);
  Eigen::VectorXd start(2);
  start << std::log(-std::log(q0)), 0.0;
  const OptimizationResult opt = minimize(objective, start, config);
  if (!std::isfinite(opt.value)) {
    throw ConvergenceError("plain discrete Weibull MLE did not reach a finite likelihood", opt.iterations);
  }

  const double lambda = std::exp(opt.argmin(0));
  const double beta = std::exp(opt.argmin(1));
  const auto params = DWParams::from_rate(lambda, beta);
  const double loglik = -dw_neg_loglik(sample, params);

  const Eigen::MatrixXd information = numeric_hessian(objective, opt.argmin, config.hessian_step);
  const Eigen::MatrixXd theta_vcov = invert_information(information);
  // dq/da = -lambda * q, dbeta/db = beta
  const double q = params.q();
  Eigen::MatrixXd jacobian = Eigen::MatrixXd::Zero(2, 2);
  jacobian(0, 0) = -lambda * q;
  jacobian(1, 1) = beta;
  Eigen::VectorXd estimates(2);
  estimates << q, beta;
  return make_fit_result({"q", "beta"}, estimates, loglik, jacobian * theta_vcov * jacobian.transpose(),
                         sample.size(), opt.converged, opt.iterations);
}

WaldInterval wald_interval(const FitResult& fit, double level, std::size_t index) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("wald_interval: level must lie in (0, 1)");
  if (index >= fit.n_params) throw std::out_of_range("wald_interval: parameter index out of range");
  if (!fit.converged) throw std::invalid_argument("wald_interval: fit did not converge");
  const auto i = static_cast<Eigen::Index>(index);
  WaldInterval interval;
  interval.estimate = fit.estimates(i);
  interval.level = level;
  const double variance = fit.vcov(i, i);
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    interval.degenerate = true;
    interval.standard_error = variance == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    interval.lower = variance == 0.0 ? interval.estimate : std::numeric_limits<double>::quiet_NaN();
    interval.upper = interval.lower;
    return interval;
  }
  interval.standard_error = std::sqrt(variance);
  const double z = normal_quantile(0.5 * (1.0 + level));
  interval.lower = interval.estimate - z * interval.standard_error;
  interval.upper = interval.estimate + z * interval.standard_error;
  return interval;
}

}  // namespace dwreg
