#include "dwreg/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "dwreg/error.hpp"
#include "dwreg/normal.hpp"

namespace dwreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEtaClamp = 700.0;
// Above this the NB dispersion is treated as having diverged.
constexpr double kBoundaryK = 1e6;
constexpr double kMaxLogK = 25.0;

// Smallest y >= 0 with cdf(y) >= tau, bracketing outward from a guess.
template <class Cdf>
std::int64_t search_quantile(double tau, double guess, Cdf&& cdf) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw std::invalid_argument("quantile level tau must lie in (0, 1), got " + std::to_string(tau));
  }
  std::int64_t start = 0;
  if (std::isfinite(guess) && guess > 0.0) start = static_cast<std::int64_t>(std::min(guess, 9.0e15));
  std::int64_t lo = -1;  // cdf(lo) < tau, with cdf(-1) = 0
  std::int64_t hi = 0;   // cdf(hi) >= tau
  if (cdf(start) >= tau) {
    hi = start;
    std::int64_t step = 1;
    while (hi - step >= 0 && cdf(hi - step) >= tau) {
      hi -= step;
      step *= 2;
    }
    lo = std::max<std::int64_t>(hi - step, -1);
  } else {
    lo = start;
    std::int64_t step = 1;
    while (cdf(lo + step) < tau) {
      lo += step;
      step *= 2;
      if (step > (std::int64_t{1} << 53)) throw NumericalError("quantile search did not terminate");
    }
    hi = lo + step;
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (cdf(mid) >= tau) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double log_rising(std::int64_t y, double k) {
  // ln Gamma(y + k) - ln Gamma(k)
  if (y < 64) {
    double total = 0.0;
    for (std::int64_t j = 0; j < y; ++j) total += std::log(k + static_cast<double>(j));
    return total;
  }
  return std::lgamma(static_cast<double>(y) + k) - std::lgamma(k);
}

std::vector<std::string> with_extra(std::vector<std::string> names, const std::string& extra) {
  names.push_back(extra);
  return names;
}

}  // namespace

std::string_view model_key(ModelKind kind) {
  switch (kind) {
    case ModelKind::DiscreteWeibull: return "dw";
    case ModelKind::Poisson: return "poisson";
    case ModelKind::NegativeBinomial: return "nb";
  }
  return "unknown";
}

ModelKind parse_model_key(std::string_view key) {
  if (key == "dw") return ModelKind::DiscreteWeibull;
  if (key == "poisson") return ModelKind::Poisson;
  if (key == "nb") return ModelKind::NegativeBinomial;
  throw std::invalid_argument("unknown model '" + std::string(key) + "' (expected dw, poisson or nb)");
}

double q_from_linear_predictor(double eta) { return std::exp(-std::exp(eta)); }

// ---------------------------------------------------------------------------
// CountRegressionFit

CountRegressionFit::CountRegressionFit(FitResult result, Eigen::VectorXd coefficients,
                                       std::vector<std::string> design_names, bool has_intercept)
    : result_(std::move(result)),
      coefficients_(std::move(coefficients)),
      design_names_(std::move(design_names)),
      has_intercept_(has_intercept) {
  if (static_cast<Eigen::Index>(design_names_.size()) != coefficients_.size()) {
    throw std::invalid_argument("design names do not match the coefficient count");
  }
}

Eigen::VectorXd CountRegressionFit::design_row_for(std::span<const double> covariates) const {
  const std::size_t expected = design_names_.size() - (has_intercept_ ? 1 : 0);
  if (covariates.size() != expected) {
    throw std::invalid_argument("expected " + std::to_string(expected) + " covariates, got " +
                                std::to_string(covariates.size()));
  }
  return design_row(covariates, has_intercept_);
}

double CountRegressionFit::linear_predictor(std::span<const double> covariates) const {
  return design_row_for(covariates).dot(coefficients_);
}

Eigen::VectorXd CountRegressionFit::linear_predictors(const Dataset& data) const {
  if (data.design().cols() != coefficients_.size()) {
    throw std::invalid_argument("dataset design has " + std::to_string(data.design().cols()) +
                                " columns but the fit has " + std::to_string(coefficients_.size()) +
                                " coefficients");
  }
  return data.design() * coefficients_;
}

// ---------------------------------------------------------------------------
// Discrete Weibull

DWRegressionFit::DWRegressionFit(FitResult result, std::vector<std::string> design_names, bool has_intercept,
                                 TruncationPolicy policy)
    : CountRegressionFit(result, result.estimates.head(result.estimates.size() - 1), std::move(design_names),
                         has_intercept),
      beta_(result.estimates(result.estimates.size() - 1)),
      policy_(policy) {
  if (!(beta_ > 0.0)) throw std::invalid_argument("DW regression shape beta must be positive");
  policy_.validate();
}

DWParams DWRegressionFit::params_at(double eta) const {
  return DWParams::from_rate(std::exp(std::clamp(eta, -kEtaClamp, kEtaClamp)), beta_);
}

double DWRegressionFit::pmf(std::int64_t y, double eta) const { return dw_pmf(y, params_at(eta)); }
double DWRegressionFit::cdf(std::int64_t y, double eta) const { return dw_cdf(y, params_at(eta)); }
double DWRegressionFit::sf(std::int64_t y, double eta) const { return dw_sf(y, params_at(eta)); }
double DWRegressionFit::mean(double eta) const { return dw_mean(params_at(eta), policy_); }
double DWRegressionFit::variance(double eta) const { return dw_variance(params_at(eta), policy_); }
std::int64_t DWRegressionFit::quantile(double tau, double eta) const {
  return dw_quantile(tau, params_at(eta));
}

// ---------------------------------------------------------------------------
// Poisson

double poisson_log_pmf(std::int64_t y, double mu) {
  if (y < 0) return -kInf;
  if (mu <= 0.0) return y == 0 ? 0.0 : -kInf;
  const auto yd = static_cast<double>(y);
  return (y == 0 ? 0.0 : yd * std::log(mu)) - mu - std::lgamma(yd + 1.0);
}

PoissonRegressionFit::PoissonRegressionFit(FitResult result, std::vector<std::string> design_names,
                                           bool has_intercept)
    : CountRegressionFit(result, result.estimates, std::move(design_names), has_intercept) {}

double PoissonRegressionFit::pmf(std::int64_t y, double eta) const {
  return std::exp(poisson_log_pmf(y, mean(eta)));
}
double PoissonRegressionFit::cdf(std::int64_t y, double eta) const {
  if (y < 0) return 0.0;
  const double mu = mean(eta);
  if (mu <= 0.0) return 1.0;
  return boost::math::gamma_q(static_cast<double>(y) + 1.0, mu);
}
double PoissonRegressionFit::sf(std::int64_t y, double eta) const {
  if (y < 0) return 1.0;
  const double mu = mean(eta);
  if (mu <= 0.0) return 0.0;
  return boost::math::gamma_p(static_cast<double>(y) + 1.0, mu);
}
double PoissonRegressionFit::mean(double eta) const { return std::exp(std::min(eta, kEtaClamp)); }
double PoissonRegressionFit::variance(double eta) const { return mean(eta); }
std::int64_t PoissonRegressionFit::quantile(double tau, double eta) const {
  const double mu = mean(eta);
  const double guess = mu + std::sqrt(mu) * normal_quantile(std::clamp(tau, 1e-300, 1.0 - 1e-16));
  return search_quantile(tau, guess, [&](std::int64_t y) { return cdf(y, eta); });
}

// ---------------------------------------------------------------------------
// Negative binomial

double nb_log_pmf(std::int64_t y, double mu, double k) {
  if (!std::isfinite(k)) return poisson_log_pmf(y, mu);
  if (y < 0) return -kInf;
  if (mu <= 0.0) return y == 0 ? 0.0 : -kInf;
  const auto yd = static_cast<double>(y);
  const double log_total = std::log(k + mu);
  return log_rising(y, k) - std::lgamma(yd + 1.0) - k * std::log1p(mu / k) +
         (y == 0 ? 0.0 : yd * (std::log(mu) - log_total));
}

NBRegressionFit::NBRegressionFit(FitResult result, std::vector<std::string> design_names, bool has_intercept,
                                 std::optional<FitResult> poisson_reference)
    : CountRegressionFit(result, result.estimates.head(result.estimates.size() - 1), std::move(design_names),
                         has_intercept),
      k_(result.estimates(result.estimates.size() - 1)),
      poisson_reference_(std::move(poisson_reference)) {
  if (!(k_ > 0.0)) throw std::invalid_argument("NB dispersion k must be positive");
}

double NBRegressionFit::pmf(std::int64_t y, double eta) const { return std::exp(nb_log_pmf(y, mean(eta), k_)); }
double NBRegressionFit::cdf(std::int64_t y, double eta) const {
  if (y < 0) return 0.0;
  const double mu = mean(eta);
  if (mu <= 0.0) return 1.0;
  if (!std::isfinite(k_)) return boost::math::gamma_q(static_cast<double>(y) + 1.0, mu);
  return boost::math::ibeta(k_, static_cast<double>(y) + 1.0, k_ / (k_ + mu));
}
double NBRegressionFit::sf(std::int64_t y, double eta) const {
  if (y < 0) return 1.0;
  const double mu = mean(eta);
  if (mu <= 0.0) return 0.0;
  if (!std::isfinite(k_)) return boost::math::gamma_p(static_cast<double>(y) + 1.0, mu);
  return boost::math::ibetac(k_, static_cast<double>(y) + 1.0, k_ / (k_ + mu));
}
double NBRegressionFit::mean(double eta) const { return std::exp(std::min(eta, kEtaClamp)); }
double NBRegressionFit::variance(double eta) const {
  const double mu = mean(eta);
  return std::isfinite(k_) ? mu + mu * mu / k_ : mu;
}
std::int64_t NBRegressionFit::quantile(double tau, double eta) const {
  const double guess = mean(eta) + std::sqrt(variance(eta)) * normal_quantile(std::clamp(tau, 1e-300, 1.0 - 1e-16));
  return search_quantile(tau, guess, [&](std::int64_t y) { return cdf(y, eta); });
}

// ---------------------------------------------------------------------------
// Fitting

DWRegressionFit fit_dw_regression(const Dataset& data, const OptimizerConfig& config,
                                  const TruncationPolicy& policy) {
  config.validate();
  policy.validate();
  const Eigen::MatrixXd& design = data.design();
  const auto& response = data.response();
  const Eigen::Index p = design.cols();
  const auto n = static_cast<Eigen::Index>(response.size());
  if (n <= p + 1) {
    throw std::invalid_argument("DW regression needs more observations (" + std::to_string(n) +
                                ") than parameters (" + std::to_string(p + 1) + ") plus one");
  }

  // Distinct response values share their y^beta evaluations.
  std::vector<std::int64_t> levels(response.begin(), response.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<std::size_t> level_of(response.size());
  for (std::size_t i = 0; i < response.size(); ++i) {
    level_of[i] = static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), response[i]) -
                                           levels.begin());
  }
  std::vector<double> log_y(levels.size());
  std::vector<double> log_y1(levels.size());
  for (std::size_t l = 0; l < levels.size(); ++l) {
    log_y[l] = levels[l] > 0 ? std::log(static_cast<double>(levels[l])) : -kInf;
    log_y1[l] = std::log(static_cast<double>(levels[l]) + 1.0);
  }

  // Per-row ln pmf; returns false if the row's probability underflows.
  auto row_terms = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& out) {
    const double beta = std::exp(theta(p));
    if (!(beta > 0.0) || !std::isfinite(beta)) return false;
    std::vector<double> lower(levels.size());
    std::vector<double> gap(levels.size());
    for (std::size_t l = 0; l < levels.size(); ++l) {
      lower[l] = levels[l] > 0 ? std::exp(beta * log_y[l]) : 0.0;
      gap[l] = std::exp(beta * log_y1[l]) - lower[l];
    }
    const Eigen::VectorXd eta = design * theta.head(p);
    out.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::size_t l = level_of[static_cast<std::size_t>(i)];
      const double lambda = std::exp(eta(i));
      const double head = lower[l] > 0.0 ? -lambda * lower[l] : 0.0;
      out(i) = head + std::log(-std::expm1(-lambda * gap[l]));
    }
    return true;
  };

  const Objective objective = [&](const Eigen::VectorXd& theta) {
    Eigen::VectorXd terms;
    if (!row_terms(theta, terms)) return kInf;
    const double total = -terms.sum();
    return std::isfinite(total) ? total : kInf;
  };

  Eigen::VectorXd start = Eigen::VectorXd::Zero(p + 1);
  const double q0 = zero_proportion_start(response);
  if (data.has_intercept()) start(0) = std::log(-std::log(q0));
  Eigen::VectorXd terms;
  if (row_terms(start, terms)) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!std::isfinite(terms(i))) throw DegenerateLikelihoodError(static_cast<std::size_t>(i), response[i]);
    }
  }
  const OptimizationResult opt = minimize(objective, start, config);

  if (!row_terms(opt.argmin, terms) || !std::isfinite(opt.value)) {
    throw ConvergenceError("DW regression did not reach a finite likelihood", opt.iterations);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(terms(i))) throw DegenerateLikelihoodError(static_cast<std::size_t>(i), response[i]);
  }

  const Eigen::MatrixXd information = numeric_hessian(objective, opt.argmin, config.hessian_step);
  const Eigen::MatrixXd theta_vcov = invert_information(information);
  const double beta = std::exp(opt.argmin(p));
  Eigen::MatrixXd jacobian = Eigen::MatrixXd::Identity(p + 1, p + 1);
  jacobian(p, p) = beta;
  Eigen::VectorXd estimates = opt.argmin;
  estimates(p) = beta;

  FitResult result = make_fit_result(with_extra(data.design_names(), "beta"), estimates, terms.sum(),
                                     jacobian * theta_vcov * jacobian.transpose(), data.size(), opt.converged,
                                     opt.iterations);
  return DWRegressionFit(std::move(result), data.design_names(), data.has_intercept(), policy);
}

PoissonRegressionFit fit_poisson_glm(const Dataset& data) {
  const Eigen::MatrixXd& design = data.design();
  const auto& response = data.response();
  const auto n = design.rows();
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = static_cast<double>(response[static_cast<std::size_t>(i)]);

  Eigen::VectorXd mu = (y.array() + 0.1).matrix();
  Eigen::VectorXd eta = mu.array().log().matrix();
  Eigen::VectorXd coefficients = Eigen::VectorXd::Zero(design.cols());
  auto deviance = [&](const Eigen::VectorXd& m) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (y(i) > 0.0) total += y(i) * std::log(y(i) / m(i));
      total -= y(i) - m(i);
    }
    return 2.0 * total;
  };

  constexpr std::size_t kMaxIterations = 100;
  double previous = kInf;
  std::size_t iteration = 0;
  bool converged = false;
  for (; iteration < kMaxIterations; ++iteration) {
    const Eigen::VectorXd working = eta + ((y - mu).array() / mu.array()).matrix();
    const Eigen::MatrixXd weighted = design.transpose() * mu.asDiagonal() * design;
    const Eigen::VectorXd rhs = design.transpose() * (mu.array() * working.array()).matrix();
    coefficients = weighted.ldlt().solve(rhs);
    eta = design * coefficients;
    mu = eta.array().exp().matrix();
    if (!mu.allFinite() || !coefficients.allFinite()) {
      throw ConvergenceError("Poisson IRLS diverged", iteration + 1);
    }
    const double current = deviance(mu);
    if (std::abs(current - previous) <= 1e-13 * (std::abs(current) + 0.1)) {
      converged = true;
      ++iteration;
      break;
    }
    previous = current;
  }
  if (!converged) throw ConvergenceError("Poisson IRLS did not converge", iteration);
  if (mu.minCoeff() < 1e-12) {
    throw ConvergenceError("Poisson IRLS: fitted rates numerically zero (separation)", iteration);
  }

  double loglik = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) loglik += poisson_log_pmf(response[static_cast<std::size_t>(i)], mu(i));
  const Eigen::MatrixXd information = design.transpose() * mu.asDiagonal() * design;
  FitResult result = make_fit_result(data.design_names(), coefficients, loglik, invert_information(information),
                                     data.size(), true, iteration);
  return PoissonRegressionFit(std::move(result), data.design_names(), data.has_intercept());
}

NBRegressionFit fit_nb_regression(const Dataset& data, const OptimizerConfig& config) {
  config.validate();
  const PoissonRegressionFit poisson = fit_poisson_glm(data);
  const Eigen::MatrixXd& design = data.design();
  const auto& response = data.response();
  const Eigen::Index p = design.cols();
  const auto n = design.rows();

  std::map<std::int64_t, std::size_t> level_index;
  for (const auto y : response) level_index.emplace(y, 0);
  std::vector<std::int64_t> levels;
  for (auto& [y, index] : level_index) {
    index = levels.size();
    levels.push_back(y);
  }
  std::vector<std::size_t> level_of(response.size());
  std::vector<double> log_factorial(response.size());
  for (std::size_t i = 0; i < response.size(); ++i) {
    level_of[i] = level_index[response[i]];
    log_factorial[i] = std::lgamma(static_cast<double>(response[i]) + 1.0);
  }

  auto neg_loglik = [&](const Eigen::VectorXd& gamma, double log_k) {
    const double k = std::exp(log_k);
    std::vector<double> rising(levels.size());
    for (std::size_t l = 0; l < levels.size(); ++l) rising[l] = log_rising(levels[l], k);
    const Eigen::VectorXd eta = design * gamma;
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto row = static_cast<std::size_t>(i);
      const double mu = std::exp(eta(i));
      const auto yd = static_cast<double>(response[row]);
      const double log_total = std::log(k + mu);
      total += rising[level_of[row]] - log_factorial[row] - k * std::log1p(mu / k) +
               (response[row] == 0 ? 0.0 : yd * (eta(i) - log_total));
    }
    return -total;
  };

  const Objective objective = [&](const Eigen::VectorXd& theta) {
    const double log_k = theta(p);
    if (!std::isfinite(log_k)) return kInf;
    double value = 0.0;
    if (log_k > kMaxLogK) {
      value = neg_loglik(theta.head(p), kMaxLogK) + (log_k - kMaxLogK) * (log_k - kMaxLogK);
    } else {
      value = neg_loglik(theta.head(p), log_k);
    }
    return std::isfinite(value) ? value : kInf;
  };

  // moment estimate of 1/k from the Poisson fit
  const Eigen::VectorXd mu0 = poisson.linear_predictors(data).array().exp().matrix();
  double excess = 0.0;
  double scale = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = static_cast<double>(response[static_cast<std::size_t>(i)]) - mu0(i);
    excess += r * r - mu0(i);
    scale += mu0(i) * mu0(i);
  }
  const double k0 = excess > 0.0 ? std::clamp(scale / excess, 1e-3, 1e5) : 1e5;

  Eigen::VectorXd start(p + 1);
  start.head(p) = poisson.coefficients();
  start(p) = std::log(k0);
  const OptimizationResult opt = minimize(objective, start, config);

  const double k = std::exp(opt.argmin(p));
  const double loglik = -opt.value;
  const FitResult& reference = poisson.result();
  if (!std::isfinite(opt.value) || k > kBoundaryK || loglik <= reference.loglik) {
    Eigen::VectorXd estimates(p + 1);
    estimates.head(p) = reference.estimates;
    estimates(p) = kInf;
    Eigen::MatrixXd vcov = Eigen::MatrixXd::Zero(p + 1, p + 1);
    vcov.topLeftCorner(p, p) = reference.vcov;
    vcov(p, p) = kInf;
    FitResult result = make_fit_result(with_extra(data.design_names(), "k"), estimates, reference.loglik, vcov,
                                       data.size(), reference.converged, opt.iterations);
    return NBRegressionFit(std::move(result), data.design_names(), data.has_intercept(), reference);
  }

  const Eigen::MatrixXd information = numeric_hessian(objective, opt.argmin, config.hessian_step);
  const Eigen::MatrixXd theta_vcov = invert_information(information);
  Eigen::MatrixXd jacobian = Eigen::MatrixXd::Identity(p + 1, p + 1);
  jacobian(p, p) = k;
  Eigen::VectorXd estimates = opt.argmin;
  estimates(p) = k;
  FitResult result = make_fit_result(with_extra(data.design_names(), "k"), estimates, loglik,
                                     jacobian * theta_vcov * jacobian.transpose(), data.size(), opt.converged,
                                     opt.iterations);
  return NBRegressionFit(std::move(result), data.design_names(), data.has_intercept());
}

// ---------------------------------------------------------------------------
// Prediction and interpretation

std::int64_t fitted_median(const DWRegressionFit& fit, std::span<const double> covariates) {
  return dw_quantile(0.5, fit.params_at(fit.linear_predictor(covariates)));
}

std::int64_t fitted_quantile(const DWRegressionFit& fit, std::span<const double> covariates, double tau) {
  return dw_quantile(tau, fit.params_at(fit.linear_predictor(covariates)));
}

double fitted_mean(const DWRegressionFit& fit, std::span<const double> covariates, const TruncationPolicy& policy) {
  return dw_mean(fit.params_at(fit.linear_predictor(covariates)), policy);
}

MedianInterpretation interpret_coefficients(const DWRegressionFit& fit) {
  const Eigen::VectorXd& alpha = fit.alpha();
  const double beta = fit.beta();
  const double log_log_two = std::log(std::numbers::ln2);
  MedianInterpretation view;
  std::size_t first = 0;
  if (fit.has_intercept()) {
    view.intercept_term = (log_log_two - alpha(0)) / beta;
    first = 1;
  } else {
    view.intercept_term = log_log_two / beta;
  }
  for (std::size_t j = first; j < fit.design_names().size(); ++j) {
    view.effects.push_back({fit.design_names()[j], -alpha(static_cast<Eigen::Index>(j)) / beta});
  }
  return view;
}

}  // namespace dwreg
