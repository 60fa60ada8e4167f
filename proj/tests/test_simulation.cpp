#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dwreg/distribution.hpp"
#include "dwreg/regression.hpp"
#include "dwreg/simulation.hpp"

using namespace dwreg;

namespace {

SimulationStudyConfig small_study(std::size_t replicates, std::uint64_t seed) {
  SimulationStudyConfig config;
  config.n_obs = 150;
  config.replicate_count = replicates;
  config.master_seed = seed;
  return config;
}

}  // namespace

TEST(SimulationConfig, Validation) {
  SimulationStudyConfig config;
  EXPECT_NO_THROW(config.validate());
  config.true_alpha = {0.5, 0.4};
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config = {};
  config.n_obs = 4;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config = {};
  config.replicate_count = 0;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config = {};
  config.true_beta = 0.0;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config = {};
  config.ci_level = 1.0;
  EXPECT_THROW(config.validate(), std::invalid_argument);
}

TEST(SimulatedData, DeterministicPerReplicate) {
  const SimulationStudyConfig config = small_study(1, 77);
  const Dataset a = simulate_regression_data(config, 3);
  const Dataset b = simulate_regression_data(config, 3);
  const Dataset c = simulate_regression_data(config, 4);
  EXPECT_EQ(a.response(), b.response());
  EXPECT_EQ(a.covariates(), b.covariates());
  EXPECT_NE(a.covariates(), c.covariates());
  EXPECT_EQ(a.covariate_names(), (std::vector<std::string>{"x1", "x2"}));
}

TEST(SimulatedData, CovariateRanges) {
  SimulationStudyConfig config;
  config.n_obs = 5000;
  const Dataset data = simulate_regression_data(config, 0);
  const auto x1 = data.covariates().col(0);
  const auto x2 = data.covariates().col(1);
  EXPECT_NEAR(x1.mean(), 0.0, 0.06);
  EXPECT_GE(x2.minCoeff(), 0.0);
  EXPECT_LE(x2.maxCoeff(), 10.0);
  EXPECT_NEAR(x2.mean(), 5.0, 0.15);
}

TEST(SimulatedData, ZeroFractionMatchesModel) {
  SimulationStudyConfig config;
  config.n_obs = 20000;
  config.master_seed = 5;
  const Dataset data = simulate_regression_data(config, 0);
  double expected = 0.0;
  for (Eigen::Index i = 0; i < data.design().rows(); ++i) {
    const double eta = 0.5 + 0.4 * data.covariates()(i, 0) - 0.3 * data.covariates()(i, 1);
    expected += 1.0 - q_from_linear_predictor(eta);
  }
  expected /= static_cast<double>(data.size());
  const double observed =
      static_cast<double>(std::count(data.response().begin(), data.response().end(), 0)) / data.size();
  EXPECT_NEAR(observed, expected, 4.0 * std::sqrt(expected * (1.0 - expected) / data.size()));
}

TEST(SimulatedData, ExtremeInterceptStaysFinite) {
  SimulationStudyConfig config;
  config.n_obs = 500;
  config.true_alpha = {-10.0, 0.0, 0.0};
  const Dataset data = simulate_regression_data(config, 0);
  for (std::int64_t y : data.response()) EXPECT_GE(y, 0);
  const DWParams params(q_from_linear_predictor(-10.0), 1.6);
  const auto median = dw_quantile(0.5, params);
  std::vector<std::int64_t> sorted = data.response();
  std::sort(sorted.begin(), sorted.end());
  EXPECT_NEAR(static_cast<double>(sorted[250]), static_cast<double>(median), 0.25 * median);
}

TEST(SimulationStudy, DeterministicAndThreadInvariant) {
  const SimulationStudyConfig config = small_study(6, 9);
  const StudyResult one = run_simulation_study(config, 1);
  const StudyResult again = run_simulation_study(config, 1);
  const StudyResult three = run_simulation_study(config, 3);
  ASSERT_EQ(one.replicates.size(), 6u);
  for (std::size_t r = 0; r < 6; ++r) {
    EXPECT_EQ(one.replicates[r].estimates, again.replicates[r].estimates);
    EXPECT_EQ(one.replicates[r].estimates, three.replicates[r].estimates);
    EXPECT_EQ(one.replicates[r].ci_lengths, three.replicates[r].ci_lengths);
  }
  for (std::size_t p = 0; p < one.parameters.size(); ++p) {
    EXPECT_EQ(one.parameters[p].mse, three.parameters[p].mse);
    EXPECT_EQ(one.parameters[p].mean_estimate, three.parameters[p].mean_estimate);
  }
}

TEST(SimulationStudy, SummariesRecomputeFromReplicates) {
  const SimulationStudyConfig config = small_study(12, 10);
  const StudyResult study = run_simulation_study(config);
  ASSERT_EQ(study.parameters.size(), 4u);
  const std::vector<std::string> names{kInterceptName, "x1", "x2", "beta"};
  const std::vector<double> truth{0.5, 0.4, -0.3, 1.6};
  for (std::size_t p = 0; p < 4; ++p) {
    const ParameterSummary& summary = study.parameters[p];
    EXPECT_EQ(summary.name, names[p]);
    EXPECT_EQ(summary.truth, truth[p]);
    double sum = 0.0, sq = 0.0, len = 0.0;
    std::size_t used = 0;
    for (const auto& rep : study.replicates) {
      if (!rep.success) continue;
      ++used;
      sum += rep.estimates[p];
      sq += (rep.estimates[p] - truth[p]) * (rep.estimates[p] - truth[p]);
      len += rep.ci_lengths[p];
    }
    ASSERT_GT(used, 0u);
    EXPECT_NEAR(summary.mean_estimate, sum / used, 1e-12);
    EXPECT_NEAR(summary.bias, sum / used - truth[p], 1e-12);
    EXPECT_NEAR(summary.mse, sq / used, 1e-12);
    EXPECT_NEAR(summary.mean_ci_length, len / used, 1e-12);
    EXPECT_GE(summary.mse, summary.bias * summary.bias - 1e-15);
    EXPECT_GE(summary.coverage, 0.0);
    EXPECT_LE(summary.coverage, 1.0);
  }
  EXPECT_EQ(study.failed_count, static_cast<std::size_t>(std::count_if(
                                    study.replicates.begin(), study.replicates.end(),
                                    [](const ReplicateOutcome& r) { return !r.success; })));
}

TEST(SimulationStudy, OptimizerFailuresAreCounted) {
  const SimulationStudyConfig config = small_study(3, 11);
  OptimizerConfig starved;
  starved.max_iterations = 1;
  const StudyResult study = run_simulation_study(config, 1, starved);
  EXPECT_EQ(study.failed_count, 3u);
  for (const auto& rep : study.replicates) {
    EXPECT_FALSE(rep.success);
    EXPECT_FALSE(rep.failure.empty());
    EXPECT_TRUE(rep.estimates.empty());
  }
}

TEST(DispersionMap, RegionsAndLayout) {
  const std::vector<double> q_grid{0.3, 0.8};
  const std::vector<double> beta_grid{0.6, 3.0};
  RandomStream stream(2024);
  const DispersionMap map = dispersion_map(q_grid, beta_grid, 20000, stream);
  ASSERT_EQ(map.cells.size(), 4u);
  EXPECT_EQ(map.at(1, 0).beta, 3.0);
  EXPECT_EQ(map.at(1, 0).q, 0.3);
  // small beta over-disperses, large beta under-disperses
  EXPECT_GT(map.at(0, 1).vr_poisson, 1.0);
  EXPECT_LT(map.at(1, 1).vr_poisson, 1.0);
  EXPECT_LT(map.at(1, 0).vr_poisson, 1.0);
  EXPECT_TRUE(map.at(1, 1).nb_boundary);
  EXPECT_TRUE(std::isinf(map.at(1, 1).nb_k));
  EXPECT_NEAR(map.at(1, 1).vr_nb, map.at(1, 1).vr_poisson, 1e-12);
  EXPECT_FALSE(map.at(0, 1).nb_boundary);
  EXPECT_TRUE(std::isfinite(map.at(0, 1).nb_k));
  EXPECT_GT(map.at(0, 1).vr_nb, 0.0);
  for (const auto& cell : map.cells) {
    const DWParams params(cell.q, cell.beta);
    EXPECT_NEAR(cell.sample_mean, dw_mean(params), 6.0 * std::sqrt(dw_variance(params) / 20000.0));
    EXPECT_NEAR(cell.vr_poisson, cell.sample_variance / cell.sample_mean, 1e-12);
  }
}

TEST(DispersionMap, GeometricCellIsNegativeBinomialWithUnitSize) {
  const std::vector<double> q_grid{0.6};
  const std::vector<double> beta_grid{1.0};
  RandomStream stream(8);
  const DispersionMap map = dispersion_map(q_grid, beta_grid, 50000, stream);
  const DispersionCell& cell = map.at(0, 0);
  EXPECT_FALSE(cell.nb_boundary);
  EXPECT_NEAR(cell.nb_k, 1.0, 0.06);
  EXPECT_NEAR(cell.vr_nb, 1.0, 0.05);
  EXPECT_NEAR(cell.vr_poisson, 1.0 / 0.4, 0.1);
}

TEST(DispersionMap, CellsUseTheirOwnSubstream) {
  const std::vector<double> q_grid{0.5, 0.7};
  const std::vector<double> beta_grid{1.2};
  RandomStream stream(31);
  const DispersionMap map = dispersion_map(q_grid, beta_grid, 5000, stream);
  RandomStream cell_stream = stream.substream(1);
  const auto draws = dw_sample(DWParams(0.7, 1.2), cell_stream, 5000);
  double sum = 0.0;
  for (auto y : draws) sum += static_cast<double>(y);
  EXPECT_NEAR(map.at(0, 1).sample_mean, sum / 5000.0, 1e-12);
}
