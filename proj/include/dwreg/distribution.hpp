#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dwreg/random.hpp"

namespace dwreg {

/// Parameters (q, beta) of a type-1 discrete Weibull distribution with
/// cdf F(y) = 1 - q^((y+1)^beta) on y = 0, 1, 2, ...
///
/// Internally the distribution is carried as the rate lambda = -ln q, which
/// keeps q^(y^beta) = exp(-lambda * y^beta) accurate when q is within a few
/// ulps of 1 (the regression link produces lambda = exp(eta) directly).
class DWParams {
 public:
  /// Throws std::invalid_argument unless 0 < q < 1 and beta > 0.
  DWParams(double q, double beta);

  /// Construct from lambda = -ln q > 0. Valid even when exp(-lambda)
  /// rounds to 0 or 1 in double precision.
  static DWParams from_rate(double lambda, double beta);

  double q() const noexcept;
  double beta() const noexcept { return beta_; }
  double rate() const noexcept { return rate_; }
  double log_q() const noexcept { return -rate_; }

 private:
  struct RateTag {};
  DWParams(RateTag, double rate, double beta);

  double rate_;
  double beta_;
};

/// Stopping rule for the infinite moment sums.
struct TruncationPolicy {
  double term_tolerance = 1e-12;
  std::uint64_t max_terms = 10'000'000;

  /// Throws std::invalid_argument unless term_tolerance > 0 and max_terms >= 1.
  void validate() const;
};

struct DWMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// q^(y^beta) evaluated in log space; 1 for y <= 0.
double dw_power(std::int64_t y, const DWParams& params);

/// f(y) = q^(y^beta) - q^((y+1)^beta), 0 for negative y.
double dw_pmf(std::int64_t y, const DWParams& params);

/// ln f(y), computed as -lambda*y^beta + ln(-expm1(-lambda*((y+1)^beta - y^beta)))
/// so it stays finite far into the tails. -infinity for negative y.
double dw_log_pmf(std::int64_t y, const DWParams& params);

/// F(y) = 1 - q^((y+1)^beta) for y >= 0, 0 otherwise.
double dw_cdf(std::int64_t y, const DWParams& params);

/// Survival P(Y > y) = q^((y+1)^beta); 1 for negative y.
double dw_sf(std::int64_t y, const DWParams& params);

/// Smallest y with F(y) >= tau, 0 < tau < 1.
///
/// Uses the closed form ceil((ln(1-tau)/ln q)^(1/beta) - 1), snapping values
/// within 1e-9 of an integer before the ceiling, then verifies the result
/// against dw_cdf so the returned value is the exact generalized inverse of
/// the floating-point cdf. Returns 0 whenever tau <= 1 - q.
///
/// Throws std::invalid_argument for tau outside (0, 1) and NumericalError if
/// the quantile exceeds 2^53.
std::int64_t dw_quantile(double tau, const DWParams& params);

/// E(Y) = sum_{y>=1} q^(y^beta), truncated once a term drops below the
/// policy tolerance. Throws NumericalError if max_terms is reached first.
double dw_mean(const DWParams& params, const TruncationPolicy& policy = {});

/// Var(Y) = 2 sum_{y>=1} y q^(y^beta) - mu - mu^2, same truncation rule
/// (both the term and y times the term must fall below the tolerance).
double dw_variance(const DWParams& params, const TruncationPolicy& policy = {});

/// Mean and variance from a single pass over the sums.
DWMoments dw_moments(const DWParams& params, const TruncationPolicy& policy = {});

/// n inverse-transform draws: each is dw_quantile(u) with u uniform on (0,1).
std::vector<std::int64_t> dw_sample(const DWParams& params, RandomStream& stream, std::size_t n);

}  // namespace dwreg
