#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

#include "dwreg/distribution.hpp"
#include "dwreg/error.hpp"
#include "dwreg/normal.hpp"
#include "dwreg/random.hpp"

using namespace dwreg;

namespace {

const std::vector<double> kQGrid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
const std::vector<double> kBetaGrid{0.5, 1.0, 1.6, 2.0, 5.0};

// Plain pow-based reference, independent of the log-space evaluation.
double reference_pmf(std::int64_t y, double q, double beta) {
  return std::pow(q, std::pow(static_cast<double>(y), beta)) - std::pow(q, std::pow(static_cast<double>(y + 1), beta));
}

// First y with y^2 * P(Y > y) negligible, so brute-force moments are complete.
std::int64_t brute_force_support(const DWParams& params) {
  std::int64_t y = 0;
  while (static_cast<double>(y + 1) * static_cast<double>(y + 1) * dw_sf(y, params) > 1e-15) ++y;
  return y;
}

}  // namespace

TEST(DWParams, RejectsOutOfRangeParameters) {
  EXPECT_THROW(DWParams(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(DWParams(1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(DWParams(-0.2, 1.0), std::invalid_argument);
  EXPECT_THROW(DWParams(0.5, 0.0), std::invalid_argument);
  EXPECT_THROW(DWParams(0.5, -1.0), std::invalid_argument);
  EXPECT_THROW(DWParams(std::nan(""), 1.0), std::invalid_argument);
  EXPECT_NO_THROW(DWParams(0.5, 1e-3));
}

TEST(DWParams, RateRoundTrip) {
  const DWParams p(0.7, 1.6);
  EXPECT_NEAR(p.rate(), -std::log(0.7), 1e-15);
  EXPECT_NEAR(DWParams::from_rate(p.rate(), 1.6).q(), 0.7, 1e-15);
  EXPECT_THROW(DWParams::from_rate(0.0, 1.0), std::invalid_argument);
}

TEST(TruncationPolicy, Validation) {
  EXPECT_THROW((TruncationPolicy{0.0, 10}.validate()), std::invalid_argument);
  EXPECT_THROW((TruncationPolicy{1e-12, 0}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((TruncationPolicy{1e-12, 1}.validate()));
}

TEST(DWPmf, Examples) {
  EXPECT_NEAR(dw_pmf(0, DWParams(0.3, 2.7)), 0.7, 1e-15);
  EXPECT_NEAR(dw_pmf(0, DWParams(0.5, 1.0)), 0.5, 1e-15);
  EXPECT_NEAR(dw_pmf(1, DWParams(0.9, 2.0)), 0.9 - std::pow(0.9, 4), 1e-15);
  EXPECT_NEAR(dw_pmf(1, DWParams(0.9, 2.0)), 0.2439, 1e-4);
  EXPECT_EQ(dw_pmf(-1, DWParams(0.5, 1.0)), 0.0);
}

TEST(DWPmf, LargeCountsStayFinite) {
  const DWParams p(0.999, 0.3);
  for (std::int64_t y : {std::int64_t{1} << 20, std::int64_t{1} << 40, std::int64_t{1} << 52}) {
    const double value = dw_pmf(y, p);
    EXPECT_TRUE(std::isfinite(value));
    EXPECT_GE(value, 0.0);
    EXPECT_TRUE(std::isfinite(dw_log_pmf(1000, p)));
  }
}

TEST(DWPmf, LogPmfMatchesPmf) {
  for (double q : kQGrid) {
    for (double beta : kBetaGrid) {
      const DWParams p(q, beta);
      for (std::int64_t y = 0; y < 30; ++y) {
        const double pmf = dw_pmf(y, p);
        if (pmf > 1e-200) EXPECT_NEAR(dw_log_pmf(y, p), std::log(pmf), 1e-9 * (1.0 + std::abs(std::log(pmf))));
      }
    }
  }
}

TEST(DWCdf, Examples) {
  EXPECT_EQ(dw_cdf(-1, DWParams(0.3, 2.0)), 0.0);
  EXPECT_EQ(dw_cdf(-5, DWParams(0.9, 0.5)), 0.0);
  EXPECT_NEAR(dw_cdf(2, DWParams(0.5, 1.0)), 0.875, 1e-15);
  EXPECT_NEAR(dw_cdf(0, DWParams(0.4, 100.0)), 0.6, 1e-15);
}

TEST(DWCdf, NondecreasingWithLimitOne) {
  for (double q : kQGrid) {
    for (double beta : kBetaGrid) {
      const DWParams p(q, beta);
      double previous = 0.0;
      for (std::int64_t y = 0; y < 2000; ++y) {
        const double value = dw_cdf(y, p);
        EXPECT_GE(value, previous);
        previous = value;
      }
      EXPECT_NEAR(dw_cdf(std::int64_t{1} << 50, p), 1.0, 1e-12);
      EXPECT_NEAR(dw_cdf(100, p) + dw_sf(100, p), 1.0, 1e-15);
    }
  }
}

TEST(DWQuantile, Examples) {
  EXPECT_EQ(dw_quantile(0.2, DWParams(0.5, 1.0)), 0);
  EXPECT_EQ(dw_quantile(0.5, DWParams(0.9, 1.0)), 6);
  EXPECT_NEAR(dw_cdf(5, DWParams(0.9, 1.0)), 0.4686, 1e-4);
  EXPECT_NEAR(dw_cdf(6, DWParams(0.9, 1.0)), 0.5217, 1e-4);
  EXPECT_EQ(dw_quantile(0.5, DWParams(std::exp(-1.0), 1.0)), 0);
}

TEST(DWQuantile, RejectsInvalidLevels) {
  const DWParams p(0.5, 1.0);
  EXPECT_THROW(dw_quantile(0.0, p), std::invalid_argument);
  EXPECT_THROW(dw_quantile(1.0, p), std::invalid_argument);
  EXPECT_THROW(dw_quantile(-0.1, p), std::invalid_argument);
  EXPECT_THROW(dw_quantile(std::nan(""), p), std::invalid_argument);
}

TEST(DWQuantile, ExactBoundaryLevelsDoNotOvershoot) {
  // tau = F(y) exactly must return y, not y + 1.
  for (double q : kQGrid) {
    for (double beta : kBetaGrid) {
      const DWParams p(q, beta);
      for (std::int64_t y = 0; y < 50; ++y) {
        const double tau = dw_cdf(y, p);
        if (tau <= 0.0 || tau >= 1.0) continue;
        EXPECT_EQ(dw_quantile(tau, p), y) << "q=" << q << " beta=" << beta;
      }
    }
  }
}

TEST(DWQuantile, GaloisConnection) {
  for (double q : kQGrid) {
    for (double beta : kBetaGrid) {
      const DWParams p(q, beta);
      for (int k = 1; k <= 99; ++k) {
        const double tau = k / 100.0;
        const std::int64_t y = dw_quantile(tau, p);
        EXPECT_GE(dw_cdf(y, p), tau);
        EXPECT_TRUE(y == 0 || dw_cdf(y - 1, p) < tau);
      }
    }
  }
}

TEST(DWQuantile, ClosedFormAboveOneMinusQ) {
  const DWParams p(0.8, 1.3);
  for (double tau : {0.25, 0.5, 0.75, 0.9, 0.99}) {
    ASSERT_GE(tau, 1.0 - p.q());
    const double closed = std::ceil(std::pow(std::log(1.0 - tau) / std::log(p.q()), 1.0 / p.beta()) - 1.0);
    EXPECT_EQ(dw_quantile(tau, p), static_cast<std::int64_t>(closed));
  }
}

TEST(DWInvariants, Normalization) {
  for (double q : kQGrid) {
    for (double beta : kBetaGrid) {
      const DWParams p(q, beta);
      double total = 0.0;
      std::int64_t y = 0;
      for (; dw_sf(y, p) > 1e-12; ++y) total += dw_pmf(y, p);
      total += dw_pmf(y, p);
      EXPECT_NEAR(total, 1.0, 1e-9) << "q=" << q << " beta=" << beta;
    }
  }
}

TEST(DWInvariants, Telescoping) {
  for (double q : kQGrid) {
    for (double beta : kBetaGrid) {
      const DWParams p(q, beta);
      for (std::int64_t y = 0; y <= 1000; ++y) {
        EXPECT_NEAR(dw_pmf(y, p), dw_cdf(y, p) - dw_cdf(y - 1, p), 1e-15);
      }
    }
  }
}

TEST(DWInvariants, GeometricSpecialCase) {
  for (double q : kQGrid) {
    const DWParams p(q, 1.0);
    for (std::int64_t y = 0; y <= 100; ++y) {
      EXPECT_NEAR(dw_pmf(y, p), std::pow(q, static_cast<double>(y)) * (1.0 - q), 1e-12);
    }
  }
}

TEST(DWInvariants, DiscreteRayleighSpecialCase) {
  for (double q : kQGrid) {
    const DWParams p(q, 2.0);
    for (std::int64_t y = 0; y <= 100; ++y) {
      const double yy = static_cast<double>(y);
      EXPECT_NEAR(dw_pmf(y, p), std::pow(q, yy * yy) - std::pow(q, (yy + 1) * (yy + 1)), 1e-12);
    }
  }
}

TEST(DWInvariants, MatchesPowReference) {
  for (double q : kQGrid) {
    for (double beta : kBetaGrid) {
      for (std::int64_t y = 0; y < 40; ++y) EXPECT_NEAR(dw_pmf(y, DWParams(q, beta)), reference_pmf(y, q, beta), 1e-12);
    }
  }
}

TEST(DWMoments, Examples) {
  EXPECT_NEAR(dw_mean(DWParams(0.5, 1.0)), 1.0, 1e-10);
  EXPECT_NEAR(dw_variance(DWParams(0.5, 1.0)), 2.0, 1e-10);
  EXPECT_NEAR(dw_mean(DWParams(0.7, 50.0)), 0.7, 1e-9);
  EXPECT_NEAR(dw_variance(DWParams(0.7, 50.0)), 0.21, 1e-6);
  EXPECT_NEAR(dw_mean(DWParams(1e-9, 1.0)), 1e-9, 1e-15);
}

TEST(DWMoments, GeometricClosedForms) {
  for (double q : kQGrid) {
    const DWParams p(q, 1.0);
    EXPECT_NEAR(dw_mean(p), q / (1.0 - q), 1e-9);
    EXPECT_NEAR(dw_variance(p), q / ((1.0 - q) * (1.0 - q)), 1e-8);
  }
}

TEST(DWMoments, OverDispersedAgainstPoissonWithSameMean) {
  const DWParams p(0.7, 1.0);
  EXPECT_GT(dw_variance(p), dw_mean(p));
}

TEST(DWMoments, MatchBruteForceSummation) {
  for (double q : kQGrid) {
    for (double beta : kBetaGrid) {
      const DWParams p(q, beta);
      const std::int64_t support = brute_force_support(p);
      double mean = 0.0;
      for (std::int64_t y = 0; y <= support; ++y) mean += static_cast<double>(y) * reference_pmf(y, q, beta);
      double variance = 0.0;
      for (std::int64_t y = 0; y <= support; ++y) {
        const double d = static_cast<double>(y) - mean;
        variance += d * d * dw_pmf(y, p);
      }
      const DWMoments m = dw_moments(p);
      EXPECT_NEAR(m.mean, mean, 1e-8 * std::max(1.0, mean)) << "q=" << q << " beta=" << beta;
      EXPECT_NEAR(m.variance, variance, 1e-8 * std::max(1.0, variance)) << "q=" << q << " beta=" << beta;
      EXPECT_GE(m.variance, 0.0);
    }
  }
}

TEST(DWMoments, DispersionRegions) {
  for (double q : kQGrid) {
    for (double beta : {0.5, 0.8, 1.0}) {
      const DWParams p(q, beta);
      EXPECT_GT(dw_variance(p) / dw_mean(p), 1.0) << "q=" << q << " beta=" << beta;
    }
    for (double beta : {2.0, 2.5, 3.0, 5.0}) {
      const DWParams p(q, beta);
      EXPECT_LT(dw_variance(p) / dw_mean(p), 1.0) << "q=" << q << " beta=" << beta;
    }
  }
}

TEST(DWMoments, TermCapIsAnExplicitError) {
  const DWParams p(0.999, 0.3);
  EXPECT_THROW(dw_mean(p, TruncationPolicy{1e-12, 1000}), NumericalError);
  EXPECT_THROW(dw_variance(p, TruncationPolicy{1e-12, 1000}), NumericalError);
}

TEST(DWSample, ForcedUniformsMatchQuantile) {
  EXPECT_EQ(dw_quantile(0.3, DWParams(0.5, 1.0)), 0);
  EXPECT_EQ(dw_quantile(0.5, DWParams(0.9, 1.0)), 6);
}

TEST(DWSample, EachDrawIsTheQuantileOfAUniform) {
  const DWParams p(0.7, 1.6);
  RandomStream a(42);
  RandomStream b(42);
  const auto draws = dw_sample(p, a, 500);
  for (std::int64_t draw : draws) EXPECT_EQ(draw, dw_quantile(b.uniform_open(), p));
}

TEST(DWSample, DeterministicGivenSeed) {
  const DWParams p(0.4, 0.8);
  RandomStream a(7);
  RandomStream b(7);
  EXPECT_EQ(dw_sample(p, a, 1000), dw_sample(p, b, 1000));
  RandomStream c(8);
  RandomStream d(7);
  EXPECT_NE(dw_sample(p, c, 1000), dw_sample(p, d, 1000));
}

TEST(DWSample, RejectsEmptyRequest) {
  RandomStream stream(1);
  EXPECT_THROW(dw_sample(DWParams(0.5, 1.0), stream, 0), std::invalid_argument);
}

TEST(DWSample, ChiSquareGoodnessOfFit) {
  const DWParams p(0.7, 1.6);
  RandomStream stream(20240607);
  const std::size_t n = 100000;
  std::map<std::int64_t, double> observed;
  for (std::int64_t y : dw_sample(p, stream, n)) observed[y] += 1.0;

  // cells y = 0..K-1 plus a pooled tail, each with expected count >= 5
  std::int64_t cells = 0;
  while (static_cast<double>(n) * dw_sf(cells, p) >= 5.0) ++cells;
  double statistic = 0.0;
  double tail_observed = 0.0;
  for (const auto& [y, count] : observed) {
    if (y >= cells) tail_observed += count;
  }
  for (std::int64_t y = 0; y < cells; ++y) {
    const double expected = static_cast<double>(n) * dw_pmf(y, p);
    const double o = observed.count(y) ? observed[y] : 0.0;
    statistic += (o - expected) * (o - expected) / expected;
  }
  const double tail_expected = static_cast<double>(n) * dw_sf(cells - 1, p);
  statistic += (tail_observed - tail_expected) * (tail_observed - tail_expected) / tail_expected;
  const double p_value = chi_square_sf(statistic, static_cast<double>(cells));
  EXPECT_GT(p_value, 0.01) << "statistic " << statistic << " on " << cells << " df";
}

TEST(Normal, QuantileAccuracy) {
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-12);
  EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-15);
  EXPECT_NEAR(normal_quantile(0.025), -1.959963984540054, 1e-12);
  EXPECT_NEAR(normal_quantile(1e-10), -6.361340902404056, 1e-9);
  EXPECT_THROW(normal_quantile(0.0), std::invalid_argument);
  EXPECT_THROW(normal_quantile(1.0), std::invalid_argument);
}

TEST(Normal, QuantileInvertsCdf) {
  for (double p = 1e-300; p < 0.5; p *= 7.0) {
    EXPECT_NEAR(normal_cdf(normal_quantile(p)) / p, 1.0, 1e-9) << p;
  }
  for (int k = 1; k < 1000; ++k) {
    const double p = k / 1000.0;
    EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-12);
  }
}

TEST(Normal, ChiSquareTail) {
  EXPECT_NEAR(chi_square_sf(3.841458820694124, 1.0), 0.05, 1e-12);
  EXPECT_NEAR(chi_square_sf(2.0 * 2.302585092994046, 2.0), 0.1, 1e-12);
  EXPECT_EQ(chi_square_sf(0.0, 1.0), 1.0);
  EXPECT_EQ(chi_square_sf(0.0, 0.0), 1.0);
}

TEST(RandomStream, UniformRangesAndDeterminism) {
  RandomStream a(123);
  RandomStream b(123);
  for (int i = 0; i < 10000; ++i) {
    const double u = a.uniform_open();
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_EQ(u, b.uniform_open());
    const double v = a.uniform_left_open();
    EXPECT_GT(v, 0.0);
    EXPECT_LE(v, 1.0);
    b.uniform_left_open();
  }
}

TEST(RandomStream, SubstreamsIgnoreParentConsumption) {
  RandomStream fresh(99);
  RandomStream used(99);
  for (int i = 0; i < 100; ++i) used.uniform_open();
  RandomStream s1 = fresh.substream(5);
  RandomStream s2 = used.substream(5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(s1.uniform_open(), s2.uniform_open());
  EXPECT_NE(derive_seed(99, 5), derive_seed(99, 6));
  EXPECT_NE(derive_seed(99, 5), derive_seed(100, 5));
}
