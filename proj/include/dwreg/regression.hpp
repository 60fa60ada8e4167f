#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dwreg/dataset.hpp"
#include "dwreg/distribution.hpp"
#include "dwreg/estimation.hpp"

namespace dwreg {

enum class ModelKind { DiscreteWeibull, Poisson, NegativeBinomial };

/// "dw", "poisson" or "nb".
std::string_view model_key(ModelKind kind);
/// Inverse of model_key; throws std::invalid_argument for unknown keys.
ModelKind parse_model_key(std::string_view key);

/// q = exp(-exp(eta)), the inverse of the log(-log q) link.
double q_from_linear_predictor(double eta);

/// A fitted single-index count regression: the conditional distribution of
/// Y given x depends on x only through eta = x'coefficients plus global shape
/// parameters. Instances are immutable and safe to share across threads.
class CountRegressionFit {
 public:
  virtual ~CountRegressionFit() = default;

  virtual ModelKind kind() const noexcept = 0;

  const FitResult& result() const noexcept { return result_; }
  const Eigen::VectorXd& coefficients() const noexcept { return coefficients_; }
  const std::vector<std::string>& design_names() const noexcept { return design_names_; }
  bool has_intercept() const noexcept { return has_intercept_; }

  /// Design row for raw covariates; throws std::invalid_argument on a
  /// dimension mismatch.
  Eigen::VectorXd design_row_for(std::span<const double> covariates) const;
  double linear_predictor(std::span<const double> covariates) const;
  /// x_i'coefficients for every row of the dataset's design matrix.
  Eigen::VectorXd linear_predictors(const Dataset& data) const;

  virtual double pmf(std::int64_t y, double eta) const = 0;
  virtual double cdf(std::int64_t y, double eta) const = 0;
  /// P(Y > y).
  virtual double sf(std::int64_t y, double eta) const = 0;
  virtual double mean(double eta) const = 0;
  virtual double variance(double eta) const = 0;
  /// Smallest y with cdf(y, eta) >= tau.
  virtual std::int64_t quantile(double tau, double eta) const = 0;

 protected:
  CountRegressionFit(FitResult result, Eigen::VectorXd coefficients, std::vector<std::string> design_names,
                     bool has_intercept);

 private:
  FitResult result_;
  Eigen::VectorXd coefficients_;
  std::vector<std::string> design_names_;
  bool has_intercept_;
};

/// DW regression: log(-log q_i) = x_i'alpha with one global shape beta.
class DWRegressionFit final : public CountRegressionFit {
 public:
  /// result.estimates must be (alpha..., beta) with beta last.
  DWRegressionFit(FitResult result, std::vector<std::string> design_names, bool has_intercept,
                  TruncationPolicy policy = {});

  ModelKind kind() const noexcept override { return ModelKind::DiscreteWeibull; }

  const Eigen::VectorXd& alpha() const noexcept { return coefficients(); }
  double beta() const noexcept { return beta_; }
  const TruncationPolicy& truncation() const noexcept { return policy_; }

  /// Conditional DW parameters at linear predictor eta.
  DWParams params_at(double eta) const;

  double pmf(std::int64_t y, double eta) const override;
  double cdf(std::int64_t y, double eta) const override;
  double sf(std::int64_t y, double eta) const override;
  double mean(double eta) const override;
  double variance(double eta) const override;
  std::int64_t quantile(double tau, double eta) const override;

 private:
  double beta_;
  TruncationPolicy policy_;
};

/// Log-link Poisson regression.
class PoissonRegressionFit final : public CountRegressionFit {
 public:
  PoissonRegressionFit(FitResult result, std::vector<std::string> design_names, bool has_intercept);

  ModelKind kind() const noexcept override { return ModelKind::Poisson; }

  double pmf(std::int64_t y, double eta) const override;
  double cdf(std::int64_t y, double eta) const override;
  double sf(std::int64_t y, double eta) const override;
  double mean(double eta) const override;
  double variance(double eta) const override;
  std::int64_t quantile(double tau, double eta) const override;
};

/// Negative-binomial regression with mean exp(eta) and variance mu + mu^2/k.
///
/// When the likelihood increases without bound in k (equi- or
/// under-dispersed data) the fit is flagged at_boundary(): k is +infinity,
/// the coefficients and log-likelihood are the Poisson ones, and the Poisson
/// fit is kept as poisson_reference().
class NBRegressionFit final : public CountRegressionFit {
 public:
  /// result.estimates must be (coefficients..., k) with k last.
  NBRegressionFit(FitResult result, std::vector<std::string> design_names, bool has_intercept,
                  std::optional<FitResult> poisson_reference = std::nullopt);

  ModelKind kind() const noexcept override { return ModelKind::NegativeBinomial; }

  double k() const noexcept { return k_; }
  bool at_boundary() const noexcept { return poisson_reference_.has_value(); }
  const std::optional<FitResult>& poisson_reference() const noexcept { return poisson_reference_; }

  double pmf(std::int64_t y, double eta) const override;
  double cdf(std::int64_t y, double eta) const override;
  double sf(std::int64_t y, double eta) const override;
  double mean(double eta) const override;
  double variance(double eta) const override;
  std::int64_t quantile(double tau, double eta) const override;

 private:
  double k_;
  std::optional<FitResult> poisson_reference_;
};

/// Joint MLE of (alpha, ln beta) for the DW regression. Starts from
/// alpha_0 = ln(-ln q0) with q0 from the zero proportion, other alphas 0 and
/// beta = 1; the covariance comes from the finite-difference Hessian.
///
/// Throws std::invalid_argument when n <= P + 2 and
/// DegenerateLikelihoodError naming the row whose probability underflows at
/// the optimum.
DWRegressionFit fit_dw_regression(const Dataset& data, const OptimizerConfig& config = {},
                                  const TruncationPolicy& policy = {});

/// Log-link Poisson MLE by iteratively reweighted least squares. Throws
/// ConvergenceError on divergence (e.g. separation).
PoissonRegressionFit fit_poisson_glm(const Dataset& data);

/// Joint MLE of (coefficients, ln k), started from the Poisson fit and a
/// moment estimate of k.
NBRegressionFit fit_nb_regression(const Dataset& data, const OptimizerConfig& config = {});

/// ln P(Y = y) for NB(mean mu, size k); k = infinity gives the Poisson value.
double nb_log_pmf(std::int64_t y, double mu, double k);
double poisson_log_pmf(std::int64_t y, double mu);

/// Conditional median ceil((-ln 2 / ln q(x))^(1/beta) - 1), 0 when q(x) <= 1/2.
std::int64_t fitted_median(const DWRegressionFit& fit, std::span<const double> covariates);
std::int64_t fitted_quantile(const DWRegressionFit& fit, std::span<const double> covariates, double tau);
double fitted_mean(const DWRegressionFit& fit, std::span<const double> covariates,
                   const TruncationPolicy& policy = {});

struct MedianEffect {
  std::string name;
  /// -alpha_p / beta: change in ln(M(x) + 1) per unit change of the covariate.
  double effect = 0.0;
};

struct MedianInterpretation {
  /// (ln ln 2 - alpha_0) / beta: ln(M(x) + 1) with every covariate at zero.
  double intercept_term = 0.0;
  std::vector<MedianEffect> effects;
};

/// Median-scale view of the DW regression coefficients.
MedianInterpretation interpret_coefficients(const DWRegressionFit& fit);

}  // namespace dwreg
