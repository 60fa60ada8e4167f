#include "dwreg/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

#include <boost/math/tools/minima.hpp>

#include "dwreg/distribution.hpp"
#include "dwreg/error.hpp"
#include "dwreg/estimation.hpp"
#include "dwreg/regression.hpp"

namespace dwreg {

namespace {

ReplicateOutcome run_replicate(const SimulationStudyConfig& config, const OptimizerConfig& optimizer,
                               std::size_t index) {
  ReplicateOutcome outcome;
  outcome.index = index;
  try {
    const Dataset data = simulate_regression_data(config, index);
    const DWRegressionFit fit = fit_dw_regression(data, optimizer);
    if (!fit.result().converged) {
      outcome.failure = "optimizer did not converge";
      return outcome;
    }
    const FitResult& result = fit.result();
    for (std::size_t j = 0; j < result.n_params; ++j) {
      const WaldInterval interval = wald_interval(result, config.ci_level, j);
      if (interval.degenerate) {
        outcome.failure = "degenerate interval for " + result.parameter_names[j];
        outcome.estimates.clear();
        outcome.ci_lengths.clear();
        return outcome;
      }
      outcome.estimates.push_back(interval.estimate);
      outcome.ci_lengths.push_back(interval.length());
    }
    outcome.success = true;
  } catch (const std::exception& error) {
    outcome.failure = error.what();
    outcome.estimates.clear();
    outcome.ci_lengths.clear();
  }
  return outcome;
}

struct NBSampleFit {
  double k = 0.0;
  bool boundary = false;
};

// Intercept-only NB: the mean MLE is the sample mean for every k, so only
// ln k is profiled.
NBSampleFit fit_nb_profile(const std::map<std::int64_t, double>& counts, double mean, double variance_mle) {
  constexpr double kLogKMin = -9.0;
  constexpr double kLogKMax = 14.0;  // k ~ 1.2e6
  if (!(variance_mle > mean) || !(mean > 0.0)) return {std::numeric_limits<double>::infinity(), true};
  auto negative = [&](double log_k) {
    const double k = std::exp(log_k);
    double total = 0.0;
    for (const auto& [y, weight] : counts) total -= weight * nb_log_pmf(y, mean, k);
    return total;
  };
  const auto [log_k, value] = boost::math::tools::brent_find_minima(negative, kLogKMin, kLogKMax, 40);
  (void)value;
  if (log_k > kLogKMax - 1e-3) return {std::numeric_limits<double>::infinity(), true};
  return {std::exp(log_k), false};
}

}  // namespace

double CovariateSpec::draw(RandomStream& stream) const {
  switch (kind) {
    case Kind::Normal: return first + second * stream.standard_normal();
    case Kind::Uniform: return stream.uniform(first, second);
  }
  return 0.0;
}

void SimulationStudyConfig::validate() const {
  if (true_alpha.size() != covariates.size() + 1) {
    throw std::invalid_argument("true_alpha needs one intercept plus one coefficient per covariate");
  }
  if (n_obs <= true_alpha.size() + 1) throw std::invalid_argument("n_obs must exceed the number of parameters");
  if (replicate_count < 1) throw std::invalid_argument("replicate_count must be at least 1");
  if (!(true_beta > 0.0)) throw std::invalid_argument("true_beta must be positive");
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw std::invalid_argument("ci_level must lie in (0, 1)");
}

Dataset simulate_regression_data(const SimulationStudyConfig& config, std::size_t replicate_index) {
  config.validate();
  RandomStream stream(derive_seed(config.master_seed, replicate_index));
  const auto n = static_cast<Eigen::Index>(config.n_obs);
  const auto p = static_cast<Eigen::Index>(config.covariates.size());
  Eigen::MatrixXd covariates(n, p);
  std::vector<std::int64_t> response(config.n_obs);
  std::vector<std::string> names;
  for (const auto& spec : config.covariates) names.push_back(spec.name);
  for (Eigen::Index i = 0; i < n; ++i) {
    double eta = config.true_alpha[0];
    for (Eigen::Index j = 0; j < p; ++j) {
      covariates(i, j) = config.covariates[static_cast<std::size_t>(j)].draw(stream);
      eta += config.true_alpha[static_cast<std::size_t>(j) + 1] * covariates(i, j);
    }
    const auto params = DWParams::from_rate(std::exp(eta), config.true_beta);
    response[static_cast<std::size_t>(i)] = dw_quantile(stream.uniform_open(), params);
  }
  return Dataset(std::move(response), std::move(covariates), std::move(names));
}

StudyResult run_simulation_study(const SimulationStudyConfig& config, std::size_t threads,
                                 const OptimizerConfig& optimizer) {
  config.validate();
  optimizer.validate();
  StudyResult study;
  study.master_seed = config.master_seed;
  study.replicate_count = config.replicate_count;
  study.replicates.resize(config.replicate_count);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < config.replicate_count; r = next++) {
      study.replicates[r] = run_replicate(config, optimizer, r);
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, config.replicate_count);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  }

  std::vector<double> truth = config.true_alpha;
  truth.push_back(config.true_beta);
  std::vector<std::string> names{kInterceptName};
  for (const auto& spec : config.covariates) names.push_back(spec.name);
  names.emplace_back("beta");

  std::size_t successes = 0;
  std::vector<ParameterSummary> summaries(truth.size());
  for (std::size_t j = 0; j < truth.size(); ++j) {
    summaries[j].name = names[j];
    summaries[j].truth = truth[j];
  }
  for (const auto& outcome : study.replicates) {
    if (!outcome.success) continue;
    ++successes;
    for (std::size_t j = 0; j < truth.size(); ++j) {
      const double estimate = outcome.estimates[j];
      const double deviation = estimate - truth[j];
      const double half = 0.5 * outcome.ci_lengths[j];
      summaries[j].mean_estimate += estimate;
      summaries[j].mse += deviation * deviation;
      summaries[j].mean_ci_length += outcome.ci_lengths[j];
      if (std::abs(deviation) <= half) summaries[j].coverage += 1.0;
    }
  }
  study.failed_count = config.replicate_count - successes;
  if (successes > 0) {
    const auto count = static_cast<double>(successes);
    for (std::size_t j = 0; j < truth.size(); ++j) {
      summaries[j].mean_estimate /= count;
      summaries[j].mse /= count;
      summaries[j].mean_ci_length /= count;
      summaries[j].coverage /= count;
      summaries[j].bias = summaries[j].mean_estimate - truth[j];
    }
  }
  study.parameters = std::move(summaries);
  return study;
}

DispersionMap dispersion_map(std::span<const double> q_grid, std::span<const double> beta_grid,
                             std::size_t n_per_cell, RandomStream& stream) {
  if (q_grid.empty() || beta_grid.empty()) throw std::invalid_argument("dispersion_map: empty grid");
  if (n_per_cell < 2) throw std::invalid_argument("dispersion_map: need at least 2 draws per cell");
  DispersionMap map;
  map.q_grid.assign(q_grid.begin(), q_grid.end());
  map.beta_grid.assign(beta_grid.begin(), beta_grid.end());
  map.n_per_cell = n_per_cell;
  map.seed = stream.seed();

  for (std::size_t b = 0; b < beta_grid.size(); ++b) {
    for (std::size_t j = 0; j < q_grid.size(); ++j) {
      const DWParams params(q_grid[j], beta_grid[b]);
      RandomStream cell_stream = stream.substream(b * q_grid.size() + j);
      std::map<std::int64_t, double> counts;
      for (std::size_t i = 0; i < n_per_cell; ++i) counts[dw_quantile(cell_stream.uniform_open(), params)] += 1.0;

      const auto n = static_cast<double>(n_per_cell);
      double sum = 0.0;
      for (const auto& [y, c] : counts) sum += c * static_cast<double>(y);
      const double mean = sum / n;
      double squares = 0.0;
      for (const auto& [y, c] : counts) {
        const double d = static_cast<double>(y) - mean;
        squares += c * d * d;
      }

      DispersionCell cell;
      cell.q = q_grid[j];
      cell.beta = beta_grid[b];
      cell.sample_mean = mean;
      cell.sample_variance = squares / (n - 1.0);
      cell.vr_poisson = mean > 0.0 ? cell.sample_variance / mean : std::numeric_limits<double>::quiet_NaN();
      const NBSampleFit nb = fit_nb_profile(counts, mean, squares / n);
      cell.nb_boundary = nb.boundary;
      cell.nb_k = nb.k;
      const double nb_variance = nb.boundary ? mean : mean + mean * mean / nb.k;
      cell.vr_nb = nb_variance > 0.0 ? cell.sample_variance / nb_variance : std::numeric_limits<double>::quiet_NaN();
      map.cells.push_back(cell);
    }
  }
  return map;
}

}  // namespace dwreg
