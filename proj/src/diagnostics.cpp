#include "dwreg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "dwreg/error.hpp"
#include "dwreg/normal.hpp"

namespace dwreg {

namespace {

constexpr double kTiny = std::numeric_limits<double>::min();

struct ResidualDraws {
  std::vector<double> residuals;
  std::vector<double> uniforms;
  std::vector<std::size_t> zero_width;
};

ResidualDraws residuals_for(const CountRegressionFit& fit, const Eigen::VectorXd& eta,
                            std::span<const std::int64_t> response, RandomStream& stream) {
  ResidualDraws out;
  out.residuals.reserve(response.size());
  out.uniforms.reserve(response.size());
  for (std::size_t i = 0; i < response.size(); ++i) {
    const std::int64_t y = response[i];
    const double e = eta(static_cast<Eigen::Index>(i));
    const double a = fit.cdf(y - 1, e);
    const double b = fit.cdf(y, e);
    const double upper_sf = fit.sf(y, e);      // 1 - b
    const double lower_sf = fit.sf(y - 1, e);  // 1 - a

    double v = stream.uniform_left_open();
    double u = std::min(a + v * (b - a), b);
    if (b > a) {
      // reject draws that round onto the excluded lower endpoint
      for (int attempt = 0; u <= a && attempt < 64; ++attempt) {
        v = stream.uniform_left_open();
        u = std::min(a + v * (b - a), b);
      }
      if (u <= a) u = b;
    }
    if (!(b > a) && !(lower_sf > upper_sf)) out.zero_width.push_back(i);

    double r = 0.0;
    if (u <= 0.5) {
      r = normal_quantile(std::clamp(u, kTiny, 0.5));
    } else {
      const double tail = upper_sf + (1.0 - v) * (lower_sf - upper_sf);
      r = -normal_quantile(std::clamp(tail, kTiny, 0.5));
    }
    out.residuals.push_back(r);
    out.uniforms.push_back(u);
  }
  return out;
}

std::size_t band_index(double probability, std::size_t count) {
  // inverse ECDF: smallest order statistic whose ECDF reaches `probability`
  const double position = std::ceil(probability * static_cast<double>(count) - 1e-9);
  const auto index = static_cast<std::size_t>(std::max(position, 1.0));
  return std::min(index, count) - 1;
}

}  // namespace

ResidualReport randomized_quantile_residuals(const CountRegressionFit& fit, const Dataset& data,
                                             RandomStream& stream) {
  ResidualReport report;
  report.seed = stream.seed();
  ResidualDraws draws = residuals_for(fit, fit.linear_predictors(data), data.response(), stream);
  report.residuals = std::move(draws.residuals);
  report.uniforms = std::move(draws.uniforms);
  report.zero_width = std::move(draws.zero_width);
  if (report.residuals.size() >= 5) {
    const KSResult ks = ks_normality_test(report.residuals);
    report.ks_statistic = ks.statistic;
    report.ks_p_value = ks.p_value;
  }
  return report;
}

double kolmogorov_sf(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  constexpr int kTerms = 100;
  if (lambda < 1.18) {
    const double factor = -std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double cdf = 0.0;
    for (int j = 1; j <= kTerms; ++j) {
      const double odd = 2.0 * j - 1.0;
      cdf += std::exp(odd * odd * factor);
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int j = 1; j <= kTerms; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1) ? term : -term;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KSResult ks_normality_test(std::span<const double> sample) {
  if (sample.size() < 5) throw std::invalid_argument("ks_normality_test needs at least 5 observations");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = normal_cdf(sorted[i]);
    const auto rank = static_cast<double>(i);
    d = std::max({d, (rank + 1.0) / n - f, f - rank / n});
  }
  return {d, kolmogorov_sf(std::sqrt(n) * d)};
}

QQEnvelope qq_envelope(const CountRegressionFit& fit, const Dataset& data, std::size_t replicate_count,
                       double band_level, RandomStream& stream) {
  if (replicate_count < 19) throw std::invalid_argument("qq_envelope needs at least 19 replicates");
  if (!(band_level > 0.0 && band_level < 1.0)) throw std::invalid_argument("band_level must lie in (0, 1)");

  QQEnvelope envelope;
  envelope.band_level = band_level;
  envelope.replicate_count = replicate_count;
  envelope.seed = stream.seed();

  const Eigen::VectorXd eta = fit.linear_predictors(data);
  const std::size_t n = data.size();
  envelope.sorted_residuals = residuals_for(fit, eta, data.response(), stream).residuals;
  std::sort(envelope.sorted_residuals.begin(), envelope.sorted_residuals.end());

  // replicates[r * n + j] is the j-th order statistic of replicate r
  std::vector<double> replicates(replicate_count * n);
  std::vector<std::int64_t> simulated(n);
  for (std::size_t r = 0; r < replicate_count; ++r) {
    RandomStream sub = stream.substream(r);
    for (std::size_t i = 0; i < n; ++i) {
      simulated[i] = fit.quantile(sub.uniform_open(), eta(static_cast<Eigen::Index>(i)));
    }
    std::vector<double> residuals = residuals_for(fit, eta, simulated, sub).residuals;
    std::sort(residuals.begin(), residuals.end());
    std::copy(residuals.begin(), residuals.end(), replicates.begin() + static_cast<std::ptrdiff_t>(r * n));
  }

  const std::size_t lower_index = band_index(0.5 * (1.0 - band_level), replicate_count);
  const std::size_t upper_index = band_index(0.5 * (1.0 + band_level), replicate_count);
  envelope.theoretical.resize(n);
  envelope.lower.resize(n);
  envelope.upper.resize(n);
  std::vector<double> column(replicate_count);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t r = 0; r < replicate_count; ++r) column[r] = replicates[r * n + j];
    std::sort(column.begin(), column.end());
    envelope.lower[j] = column[lower_index];
    envelope.upper[j] = column[upper_index];
    envelope.theoretical[j] = normal_quantile((static_cast<double>(j) + 0.5) / static_cast<double>(n));
    const double value = envelope.sorted_residuals[j];
    if (value < envelope.lower[j] || value > envelope.upper[j]) ++envelope.points_outside;
  }
  return envelope;
}

DispersionReport dispersion_ratio_report(const CountRegressionFit& fit, const Dataset& data,
                                         std::size_t group_count) {
  const std::size_t n = data.size();
  if (group_count == 0) throw std::invalid_argument("group_count must be positive");
  if (n / group_count < 2) {
    throw std::invalid_argument("dispersion report: " + std::to_string(n) + " observations cannot form " +
                                std::to_string(group_count) +
                                " groups of at least 2; use a smaller group count");
  }
  const Eigen::VectorXd eta = fit.linear_predictors(data);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return eta(static_cast<Eigen::Index>(a)) < eta(static_cast<Eigen::Index>(b));
  });

  DispersionReport report;
  report.group_count = group_count;
  const std::size_t base = n / group_count;
  const std::size_t extra = n % group_count;
  std::size_t begin = 0;
  for (std::size_t g = 0; g < group_count; ++g) {
    const std::size_t size = base + (g < extra ? 1 : 0);
    DispersionGroup group;
    group.group_size = size;
    group.eta_min = eta(static_cast<Eigen::Index>(order[begin]));
    group.eta_max = eta(static_cast<Eigen::Index>(order[begin + size - 1]));
    double sum = 0.0;
    double theoretical = 0.0;
    for (std::size_t k = begin; k < begin + size; ++k) {
      sum += static_cast<double>(data.response()[order[k]]);
      theoretical += fit.variance(eta(static_cast<Eigen::Index>(order[k])));
    }
    group.observed_mean = sum / static_cast<double>(size);
    double squares = 0.0;
    for (std::size_t k = begin; k < begin + size; ++k) {
      const double d = static_cast<double>(data.response()[order[k]]) - group.observed_mean;
      squares += d * d;
    }
    group.observed_variance = squares / static_cast<double>(size - 1);
    group.mean_theoretical_variance = theoretical / static_cast<double>(size);
    if (!(group.mean_theoretical_variance > 0.0)) {
      throw NumericalError("dispersion report: theoretical variance is zero in group " + std::to_string(g + 1));
    }
    group.vr = group.observed_variance / group.mean_theoretical_variance;
    report.groups.push_back(group);
    begin += size;
  }
  return report;
}

FrequencyTable frequency_table(const CountRegressionFit& fit, const Dataset& data, std::int64_t tail_threshold) {
  if (tail_threshold < 1) throw std::invalid_argument("tail_threshold must be at least 1");
  const Eigen::VectorXd eta = fit.linear_predictors(data);
  FrequencyTable table;
  table.tail_threshold = tail_threshold;
  const auto width = static_cast<std::size_t>(tail_threshold);
  table.rows.resize(width + 1);
  for (std::size_t y = 0; y <= width; ++y) table.rows[y].value = static_cast<std::int64_t>(y);
  table.rows.back().pooled_tail = true;

  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::int64_t y = data.response()[i];
    table.rows[std::min(static_cast<std::size_t>(y), width)].observed += 1;
    const double e = eta(static_cast<Eigen::Index>(i));
    for (std::size_t v = 0; v < width; ++v) table.rows[v].expected += fit.pmf(static_cast<std::int64_t>(v), e);
    table.rows.back().expected += fit.sf(tail_threshold - 1, e);
  }
  return table;
}

LikelihoodRatioTest likelihood_ratio_test(const FitResult& fit_null, const FitResult& fit_alt) {
  if (fit_null.n_obs != fit_alt.n_obs) {
    throw std::invalid_argument("likelihood ratio test: fits use different numbers of observations");
  }
  if (fit_alt.n_params < fit_null.n_params) {
    throw std::invalid_argument("likelihood ratio test: alternative has fewer parameters than the null");
  }
  LikelihoodRatioTest test;
  test.df = fit_alt.n_params - fit_null.n_params;
  double statistic = 2.0 * (fit_alt.loglik - fit_null.loglik);
  if (statistic < -1e-6) {
    throw NumericalError("likelihood ratio statistic " + std::to_string(statistic) +
                         " is negative; the alternative fit did not reach its optimum");
  }
  test.statistic = std::max(statistic, 0.0);
  test.p_value = chi_square_sf(test.statistic, static_cast<double>(test.df));
  return test;
}

}  // namespace dwreg
