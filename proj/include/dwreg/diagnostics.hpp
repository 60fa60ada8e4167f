#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dwreg/dataset.hpp"
#include "dwreg/estimation.hpp"
#include "dwreg/random.hpp"
#include "dwreg/regression.hpp"

namespace dwreg {

// ---------------------------------------------------------------------------
// Randomized quantile residuals

struct ResidualReport {
  std::vector<double> residuals;
  /// The uniform draws u_i, each in (F(y_i - 1), F(y_i)].
  std::vector<double> uniforms;
  /// Observations whose interval has zero width in floating point.
  std::vector<std::size_t> zero_width;
  double ks_statistic = 0.0;
  double ks_p_value = 1.0;
  std::uint64_t seed = 0;
};

/// r_i = Phi^-1(u_i) with u_i uniform on (F(y_i - 1; eta_i), F(y_i; eta_i)],
/// for any fitted model exposing a conditional cdf. Residuals above the
/// median are computed through the survival function so the upper tail keeps
/// full precision. Deterministic given the stream's seed.
ResidualReport randomized_quantile_residuals(const CountRegressionFit& fit, const Dataset& data,
                                             RandomStream& stream);

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

struct KSResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// P(K > lambda) for the Kolmogorov distribution, series truncated at 100
/// terms (the theta-function form is used below lambda = 1.18).
double kolmogorov_sf(double lambda);

/// One-sample KS test against N(0, 1); p-value from the asymptotic
/// distribution of sqrt(n) D. Requires n >= 5.
KSResult ks_normality_test(std::span<const double> sample);

// ---------------------------------------------------------------------------
// Q-Q envelope

struct QQEnvelope {
  /// Normal scores Phi^-1((i - 0.5) / n).
  std::vector<double> theoretical;
  std::vector<double> sorted_residuals;
  std::vector<double> lower;
  std::vector<double> upper;
  double band_level = 0.95;
  std::size_t replicate_count = 0;
  std::size_t points_outside = 0;
  std::uint64_t seed = 0;
};

/// Simulates replicate_count responses from the fitted model at the observed
/// covariates (no refitting), recomputes and sorts their residuals, and takes
/// the inverse-ECDF quantiles at (1 -/+ band_level)/2 per order statistic.
/// Replicate r draws from stream.substream(r).
QQEnvelope qq_envelope(const CountRegressionFit& fit, const Dataset& data, std::size_t replicate_count,
                       double band_level, RandomStream& stream);

// ---------------------------------------------------------------------------
// Dispersion ratios

struct DispersionGroup {
  std::size_t group_size = 0;
  double eta_min = 0.0;
  double eta_max = 0.0;
  double observed_mean = 0.0;
  double observed_variance = 0.0;
  double mean_theoretical_variance = 0.0;
  double vr = 0.0;
};

struct DispersionReport {
  std::size_t group_count = 0;
  std::vector<DispersionGroup> groups;
};

/// Sorts observations by linear predictor (stable), splits them into
/// group_count contiguous groups whose sizes differ by at most one, and
/// reports observed variance (n_g - 1 denominator) over the mean theoretical
/// variance in each group.
DispersionReport dispersion_ratio_report(const CountRegressionFit& fit, const Dataset& data,
                                         std::size_t group_count = 10);

// ---------------------------------------------------------------------------
// Observed vs expected frequencies

struct FrequencyRow {
  std::int64_t value = 0;
  /// The last row pools every value >= value.
  bool pooled_tail = false;
  std::size_t observed = 0;
  double expected = 0.0;
};

struct FrequencyTable {
  std::vector<FrequencyRow> rows;
  std::int64_t tail_threshold = 0;
};

/// Rows for y = 0 .. tail_threshold - 1 plus a pooled row for y >= tail_threshold.
/// Expected counts are sums of fitted pmfs (survival for the pooled row).
FrequencyTable frequency_table(const CountRegressionFit& fit, const Dataset& data, std::int64_t tail_threshold);

// ---------------------------------------------------------------------------
// Likelihood-ratio test

struct LikelihoodRatioTest {
  double statistic = 0.0;
  std::size_t df = 0;
  double p_value = 1.0;
};

/// 2 (loglik_alt - loglik_null) against chi-square(df = difference in
/// parameter counts). Statistics in (-1e-6, 0) are clipped to zero; anything
/// more negative signals a failed optimization and throws NumericalError.
LikelihoodRatioTest likelihood_ratio_test(const FitResult& fit_null, const FitResult& fit_alt);

}  // namespace dwreg
