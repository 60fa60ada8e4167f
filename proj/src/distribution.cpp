#include "dwreg/distribution.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "dwreg/error.hpp"

namespace dwreg {

namespace {

// y^beta as exp(beta * ln y); exact zero at y = 0.
double pow_beta(std::int64_t y, double beta) {
  if (y <= 0) return 0.0;
  if (y == 1) return 1.0;
  return std::exp(beta * std::log(static_cast<double>(y)));
}

constexpr double kQuantileLimit = 9007199254740992.0;  // 2^53
constexpr double kIntegerSnap = 1e-9;

}  // namespace

DWParams::DWParams(double q, double beta) : rate_(0.0), beta_(beta) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("discrete Weibull q must lie in (0, 1), got " + std::to_string(q));
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("discrete Weibull beta must be positive, got " + std::to_string(beta));
  }
  rate_ = -std::log(q);
}

DWParams::DWParams(RateTag, double rate, double beta) : rate_(rate), beta_(beta) {}

DWParams DWParams::from_rate(double lambda, double beta) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("discrete Weibull rate -ln(q) must be positive and finite, got " +
                                std::to_string(lambda));
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("discrete Weibull beta must be positive, got " + std::to_string(beta));
  }
  return DWParams(RateTag{}, lambda, beta);
}

double DWParams::q() const noexcept { return std::exp(-rate_); }

void TruncationPolicy::validate() const {
  if (!(term_tolerance > 0.0)) throw std::invalid_argument("term_tolerance must be positive");
  if (max_terms < 1) throw std::invalid_argument("max_terms must be at least 1");
}

double dw_power(std::int64_t y, const DWParams& params) {
  if (y <= 0) return 1.0;
  return std::exp(-params.rate() * pow_beta(y, params.beta()));
}

double dw_pmf(std::int64_t y, const DWParams& params) {
  if (y < 0) return 0.0;
  return dw_power(y, params) - dw_power(y + 1, params);
}

double dw_log_pmf(std::int64_t y, const DWParams& params) {
  if (y < 0) return -std::numeric_limits<double>::infinity();
  const double lower = pow_beta(y, params.beta());
  const double upper = pow_beta(y + 1, params.beta());
  return -params.rate() * lower + std::log(-std::expm1(-params.rate() * (upper - lower)));
}

double dw_cdf(std::int64_t y, const DWParams& params) {
  if (y < 0) return 0.0;
  return -std::expm1(-params.rate() * pow_beta(y + 1, params.beta()));
}

double dw_sf(std::int64_t y, const DWParams& params) {
  if (y < 0) return 1.0;
  return dw_power(y + 1, params);
}

std::int64_t dw_quantile(double tau, const DWParams& params) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw std::invalid_argument("quantile level tau must lie in (0, 1), got " + std::to_string(tau));
  }
  if (dw_cdf(0, params) >= tau) return 0;

  // ln(1 - tau) / ln(q), both logs negative.
  const double ratio = -std::log1p(-tau) / params.rate();
  double value = std::pow(ratio, 1.0 / params.beta()) - 1.0;
  if (!std::isfinite(value) || value > kQuantileLimit) {
    throw NumericalError("discrete Weibull quantile exceeds 2^53 (q too close to 1 for this beta)");
  }
  const double nearest = std::round(value);
  if (std::abs(value - nearest) < kIntegerSnap) value = nearest;
  auto y = static_cast<std::int64_t>(std::ceil(value));
  if (y < 0) y = 0;

  while (dw_cdf(y, params) < tau) ++y;
  while (y > 0 && dw_cdf(y - 1, params) >= tau) --y;
  return y;
}

DWMoments dw_moments(const DWParams& params, const TruncationPolicy& policy) {
  policy.validate();
  double first = 0.0;   // sum of q^(y^beta)
  double second = 0.0;  // sum of y q^(y^beta)
  for (std::uint64_t y = 1;; ++y) {
    const double term = dw_power(static_cast<std::int64_t>(y), params);
    const double weighted = static_cast<double>(y) * term;
    first += term;
    second += weighted;
    if (term < policy.term_tolerance && weighted < policy.term_tolerance) break;
    if (y >= policy.max_terms) {
      throw NumericalError("discrete Weibull moment series did not converge within " +
                           std::to_string(policy.max_terms) + " terms (q=" +
                           std::to_string(params.q()) + ", beta=" + std::to_string(params.beta()) + ")");
    }
  }
  DWMoments moments;
  moments.mean = first;
  moments.variance = 2.0 * second - first - first * first;
  if (moments.variance < 0.0 && moments.variance > -1e-9) moments.variance = 0.0;
  return moments;
}

double dw_mean(const DWParams& params, const TruncationPolicy& policy) {
  policy.validate();
  double sum = 0.0;
  for (std::uint64_t y = 1;; ++y) {
    const double term = dw_power(static_cast<std::int64_t>(y), params);
    sum += term;
    if (term < policy.term_tolerance) break;
    if (y >= policy.max_terms) {
      throw NumericalError("discrete Weibull mean series did not converge within " +
                           std::to_string(policy.max_terms) + " terms (q=" +
                           std::to_string(params.q()) + ", beta=" + std::to_string(params.beta()) + ")");
    }
  }
  return sum;
}

double dw_variance(const DWParams& params, const TruncationPolicy& policy) {
  return dw_moments(params, policy).variance;
}

std::vector<std::int64_t> dw_sample(const DWParams& params, RandomStream& stream, std::size_t n) {
  if (n == 0) throw std::invalid_argument("dw_sample: n must be at least 1");
  std::vector<std::int64_t> draws;
  draws.reserve(n);
  for (std::size_t i = 0; i < n; ++i) draws.push_back(dw_quantile(stream.uniform_open(), params));
  return draws;
}

}  // namespace dwreg
