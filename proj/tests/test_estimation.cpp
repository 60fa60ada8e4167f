#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "dwreg/distribution.hpp"
#include "dwreg/error.hpp"
#include "dwreg/estimation.hpp"
#include "dwreg/optimize.hpp"
#include "dwreg/random.hpp"

using namespace dwreg;

namespace {

std::vector<std::int64_t> draw(double q, double beta, std::size_t n, std::uint64_t seed) {
  RandomStream stream(seed);
  return dw_sample(DWParams(q, beta), stream, n);
}

// Negative log-likelihood on the optimizer's (ln lambda, ln beta) scale.
Objective working_objective(const std::vector<std::int64_t>& sample) {
  return [&sample](const Eigen::VectorXd& theta) {
    return dw_neg_loglik(sample, DWParams::from_rate(std::exp(theta(0)), std::exp(theta(1))));
  };
}

Eigen::VectorXd working_point(const FitResult& fit) {
  Eigen::VectorXd theta(2);
  theta << std::log(-std::log(fit.estimates(0))), std::log(fit.estimates(1));
  return theta;
}

}  // namespace

TEST(NegLogLik, Examples) {
  const std::vector<std::int64_t> a{0, 0, 1};
  EXPECT_NEAR(dw_neg_loglik(a, DWParams(0.5, 1.0)), -(2.0 * std::log(0.5) + std::log(0.25)), 1e-12);
  EXPECT_NEAR(dw_neg_loglik(a, DWParams(0.5, 1.0)), 2.772589, 1e-6);
  const std::vector<std::int64_t> b{0};
  EXPECT_NEAR(dw_neg_loglik(b, DWParams(0.3, 7.0)), 0.356675, 1e-6);
}

TEST(NegLogLik, Errors) {
  const std::vector<std::int64_t> empty;
  EXPECT_THROW(dw_neg_loglik(empty, DWParams(0.5, 1.0)), std::invalid_argument);
  const std::vector<std::int64_t> negative{1, -1};
  EXPECT_THROW(dw_neg_loglik(negative, DWParams(0.5, 1.0)), std::invalid_argument);
  // (y + 1)^beta and y^beta coincide in floating point, so the mass is zero
  const std::vector<std::int64_t> extreme{0, 1, 1000000000000000000};
  try {
    dw_neg_loglik(extreme, DWParams(0.5, 0.5));
    FAIL() << "expected a degenerate likelihood";
  } catch (const DegenerateLikelihoodError& error) {
    EXPECT_EQ(error.index(), 2u);
    EXPECT_EQ(error.y(), 1000000000000000000);
  }
}

TEST(NegLogLik, MinimalAtTheMle) {
  const auto sample = draw(0.6, 1.2, 2000, 11);
  const FitResult fit = fit_dw_mle(sample);
  ASSERT_TRUE(fit.converged);
  const double best = dw_neg_loglik(sample, DWParams(fit.estimates(0), fit.estimates(1)));
  EXPECT_NEAR(best, -fit.loglik, 1e-9);
  for (double dq : {-0.01, 0.0, 0.01}) {
    for (double db : {-0.02, 0.0, 0.02}) {
      if (dq == 0.0 && db == 0.0) continue;
      EXPECT_GT(dw_neg_loglik(sample, DWParams(fit.estimates(0) + dq, fit.estimates(1) + db)), best);
    }
  }
}

TEST(FitDwMle, RecoversSimulationTruth) {
  const auto sample = draw(0.7, 1.6, 5000, 2024);
  const FitResult fit = fit_dw_mle(sample);
  ASSERT_TRUE(fit.converged);
  EXPECT_EQ(fit.parameter_names, (std::vector<std::string>{"q", "beta"}));
  EXPECT_LT(std::abs(fit.estimates(0) - 0.7), 3.0 * fit.standard_error(0));
  EXPECT_LT(std::abs(fit.estimates(1) - 1.6), 3.0 * fit.standard_error(1));
}

TEST(FitDwMle, GeometricSampleGivesUnitShape) {
  // geometric(p = 0.5) on {0, 1, ...} is DW(q = 0.5, beta = 1)
  RandomStream stream(77);
  std::vector<std::int64_t> sample;
  std::geometric_distribution<std::int64_t> geometric(0.5);
  for (int i = 0; i < 5000; ++i) sample.push_back(geometric(stream));
  const FitResult fit = fit_dw_mle(sample);
  ASSERT_TRUE(fit.converged);
  EXPECT_LT(std::abs(fit.estimates(1) - 1.0), 3.0 * fit.standard_error(1));
}

TEST(FitDwMle, AllZeroSampleIsABoundary) {
  const std::vector<std::int64_t> zeros(50, 0);
  EXPECT_THROW(fit_dw_mle(zeros), BoundaryError);
}

TEST(FitDwMle, EmptySampleRejected) {
  const std::vector<std::int64_t> empty;
  EXPECT_THROW(fit_dw_mle(empty), std::invalid_argument);
}

TEST(FitDwMle, GradientVanishesAtOptimum) {
  const auto sample = draw(0.45, 0.8, 3000, 5);
  const FitResult fit = fit_dw_mle(sample);
  ASSERT_TRUE(fit.converged);
  const Eigen::VectorXd theta = working_point(fit);
  const Eigen::VectorXd gradient = numeric_gradient(working_objective(sample), theta);
  EXPECT_LT(scaled_gradient_norm(gradient, theta), 1e-3);
}

TEST(FitDwMle, StartingPointInvariance) {
  const auto sample = draw(0.8, 1.3, 2000, 6);
  const FitResult fit = fit_dw_mle(sample);
  ASSERT_TRUE(fit.converged);
  const Objective objective = working_objective(sample);
  for (const auto& start : {Eigen::Vector2d(1.0, 0.5), Eigen::Vector2d(-2.0, -0.5), Eigen::Vector2d(0.0, 1.0)}) {
    const OptimizationResult other = minimize(objective, start, OptimizerConfig{});
    EXPECT_TRUE(other.converged);
    EXPECT_NEAR(-other.value, fit.loglik, 1e-6);
  }
}

TEST(FitDwMle, HessianPositiveDefiniteAtOptimum) {
  const auto sample = draw(0.5, 1.0, 1500, 8);
  const FitResult fit = fit_dw_mle(sample);
  const Eigen::MatrixXd hessian = numeric_hessian(working_objective(sample), working_point(fit), 1e-4);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(hessian);
  EXPECT_GT(eigen.eigenvalues().minCoeff(), 0.0);
}

TEST(FitResult, InformationCriteriaIdentities) {
  const auto sample = draw(0.3, 2.0, 400, 9);
  const FitResult fit = fit_dw_mle(sample);
  const double p = static_cast<double>(fit.n_params);
  const double n = static_cast<double>(fit.n_obs);
  EXPECT_EQ(fit.aic, -2.0 * fit.loglik + 2.0 * p);
  EXPECT_EQ(fit.bic, -2.0 * fit.loglik + p * std::log(n));
  EXPECT_NEAR(fit.bic - fit.aic, p * (std::log(n) - 2.0), 1e-9);
}

TEST(FitResult, CovarianceSymmetricPositiveSemidefinite) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto sample = draw(0.6, 1.4, 800, seed);
    const FitResult fit = fit_dw_mle(sample);
    EXPECT_LT((fit.vcov - fit.vcov.transpose()).cwiseAbs().maxCoeff(), 1e-10);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(fit.vcov);
    EXPECT_GE(eigen.eigenvalues().minCoeff(), -1e-8);
    EXPECT_GE(fit.vcov(0, 0), 0.0);
    EXPECT_GE(fit.vcov(1, 1), 0.0);
  }
}

TEST(FitResult, IndexLookup) {
  const FitResult fit = fit_dw_mle(draw(0.5, 1.0, 200, 4));
  EXPECT_EQ(fit.index_of("beta"), 1u);
  EXPECT_THROW(fit.index_of("gamma"), std::out_of_range);
}

TEST(StartingValues, ZeroProportionClamped) {
  EXPECT_DOUBLE_EQ(zero_proportion_start(std::vector<std::int64_t>{0, 0, 0, 1}), 0.25);
  EXPECT_DOUBLE_EQ(zero_proportion_start(std::vector<std::int64_t>{0, 0, 0, 0}), 0.05);
  EXPECT_DOUBLE_EQ(zero_proportion_start(std::vector<std::int64_t>{3, 4, 5}), 0.95);
}

TEST(NumericHessian, Quadratic) {
  const Objective f = [](const Eigen::VectorXd& t) { return t(0) * t(0) + 3.0 * t(1) * t(1); };
  const Eigen::MatrixXd h = numeric_hessian(f, Eigen::Vector2d(0.0, 0.0), 1e-4);
  EXPECT_NEAR(h(0, 0), 2.0, 1e-5);
  EXPECT_NEAR(h(1, 1), 6.0, 1e-5);
  EXPECT_NEAR(h(0, 1), 0.0, 1e-5);
  EXPECT_EQ(h(0, 1), h(1, 0));
}

TEST(NumericHessian, CrossTerm) {
  const Objective f = [](const Eigen::VectorXd& t) { return t(0) * t(1); };
  const Eigen::MatrixXd h = numeric_hessian(f, Eigen::Vector2d(1.0, 1.0), 1e-4);
  EXPECT_NEAR(h(0, 1), 1.0, 1e-5);
  EXPECT_NEAR(h(1, 0), 1.0, 1e-5);
  EXPECT_NEAR(h(0, 0), 0.0, 1e-5);
}

TEST(NumericHessian, NonFiniteEvaluationSignalled) {
  const Objective f = [](const Eigen::VectorXd& t) { return t(0) > 0.0 ? std::log(-1.0) : t(0) * t(0); };
  EXPECT_THROW(numeric_hessian(f, Eigen::VectorXd::Zero(1), 1e-4), NumericalError);
}

TEST(Minimize, Rosenbrock) {
  const Objective f = [](const Eigen::VectorXd& t) {
    return 100.0 * std::pow(t(1) - t(0) * t(0), 2) + std::pow(1.0 - t(0), 2);
  };
  const OptimizationResult result = minimize(f, Eigen::Vector2d(-1.2, 1.0), OptimizerConfig{});
  EXPECT_TRUE(result.converged);
  EXPECT_NEAR(result.argmin(0), 1.0, 1e-4);
  EXPECT_NEAR(result.argmin(1), 1.0, 1e-4);
}

TEST(OptimizerConfig, Validation) {
  EXPECT_THROW((OptimizerConfig{0.0, 100, 1e-4}.validate()), std::invalid_argument);
  EXPECT_THROW((OptimizerConfig{1e-8, 0, 1e-4}.validate()), std::invalid_argument);
  EXPECT_THROW((OptimizerConfig{1e-8, 100, -1.0}.validate()), std::invalid_argument);
}

TEST(InvertInformation, RequiresPositiveDefinite) {
  Eigen::Matrix2d indefinite;
  indefinite << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(invert_information(indefinite), NumericalError);
  Eigen::Matrix2d good;
  good << 4.0, 1.0, 1.0, 2.0;
  EXPECT_LT((invert_information(good) * good - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-12);
}

namespace {

FitResult synthetic_fit(double estimate, double variance, bool converged = true) {
  Eigen::VectorXd estimates(1);
  estimates << estimate;
  Eigen::MatrixXd vcov(1, 1);
  vcov << variance;
  return make_fit_result({"theta"}, estimates, -1.0, vcov, 10, converged, 1);
}

}  // namespace

TEST(WaldInterval, StandardNormal) {
  const WaldInterval interval = wald_interval(synthetic_fit(0.0, 1.0), 0.95, 0);
  EXPECT_FALSE(interval.degenerate);
  EXPECT_NEAR(interval.lower, -1.959964, 1e-6);
  EXPECT_NEAR(interval.upper, 1.959964, 1e-6);
  EXPECT_NEAR(interval.length(), 2.0 * 1.959963984540054, 1e-12);
}

TEST(WaldInterval, ZeroVarianceFlagged) {
  EXPECT_TRUE(wald_interval(synthetic_fit(2.0, 0.0), 0.95, 0).degenerate);
  EXPECT_TRUE(wald_interval(synthetic_fit(2.0, -1.0), 0.95, 0).degenerate);
}

TEST(WaldInterval, Preconditions) {
  EXPECT_THROW(wald_interval(synthetic_fit(0.0, 1.0, false), 0.95, 0), std::invalid_argument);
  EXPECT_THROW(wald_interval(synthetic_fit(0.0, 1.0), 1.5, 0), std::invalid_argument);
  EXPECT_THROW(wald_interval(synthetic_fit(0.0, 1.0), 0.95, 3), std::out_of_range);
}
