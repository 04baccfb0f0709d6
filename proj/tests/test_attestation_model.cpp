#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "attestgame/attestation_model.hpp"
#include "attestgame/errors.hpp"
#include "oracles.hpp"

using namespace attestgame;

TEST(Checksum, SingleModifiedBlockIsLinear) {
  EXPECT_EQ(checksum_detection_probability({10, 500}, 1, 4), 0.4);
  for (std::uint64_t n = 1; n <= 200; ++n) {
    for (std::uint64_t b = 0; b <= n; ++b) {
      ASSERT_EQ(checksum_detection_probability({n, 500}, 1, b),
                static_cast<double>(b) / static_cast<double>(n));
    }
  }
}

TEST(Checksum, MatchesSubsetEnumeration) {
  EXPECT_NEAR(checksum_detection_probability({5, 500}, 2, 2), 0.7, 1e-15);
  EXPECT_NEAR(oracle::enumerate_checksum(5, 2, 2), 0.7, 1e-15);
  for (unsigned n = 1; n <= 12; ++n) {
    for (unsigned k = 0; k <= n; ++k) {
      for (unsigned b = 0; b <= n; ++b) {
        EXPECT_NEAR(checksum_detection_probability({n, 500}, k, b),
                    oracle::enumerate_checksum(n, k, b), 1e-12)
            << n << " " << k << " " << b;
      }
    }
  }
}

TEST(Checksum, EmptyAndFullCoverage) {
  EXPECT_EQ(checksum_detection_probability({10, 500}, 3, 0), 0.0);
  EXPECT_EQ(checksum_detection_probability({10, 500}, 3, 10), 1.0);
  EXPECT_EQ(checksum_detection_probability({10, 500}, 0, 10), 0.0);
}

TEST(Checksum, RangeErrors) {
  EXPECT_THROW(checksum_detection_probability({10, 500}, 11, 1), DomainError);
  EXPECT_THROW(checksum_detection_probability({10, 500}, 1, 11), DomainError);
  EXPECT_THROW(checksum_detection_probability({0, 500}, 0, 0), DomainError);
  EXPECT_THROW(simulate_attestation({10, 500}, 1, 4, 0, 1), DomainError);
}

TEST(Checksum, MonotoneInCoverageAndModification) {
  for (std::uint64_t n : {7u, 30u, 50u}) {
    for (std::uint64_t k = 0; k <= n; ++k) {
      for (std::uint64_t b = 0; b <= n; ++b) {
        const double here = checksum_detection_probability({n, 500}, k, b);
        if (b < n) EXPECT_LE(here, checksum_detection_probability({n, 500}, k, b + 1) + 1e-15);
        if (k < n) EXPECT_LE(here, checksum_detection_probability({n, 500}, k + 1, b) + 1e-15);
      }
    }
  }
}

TEST(Simulation, AgreesWithClosedForm) {
  const double sim = simulate_attestation({10, 500}, 1, 4, 1000000, 3);
  EXPECT_NEAR(sim, 0.4, 3.0 * std::sqrt(0.4 * 0.6 / 1e6));
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::uint64_t n = 1 + rng() % 50;
    const std::uint64_t k = rng() % (n + 1);
    const std::uint64_t b = rng() % (n + 1);
    const double exact = checksum_detection_probability({n, 500}, k, b);
    const double sigma = std::sqrt(exact * (1 - exact) / 1e5);
    EXPECT_NEAR(simulate_attestation({n, 500}, k, b, 100000, trial), exact, 4 * sigma + 1e-12);
    EXPECT_NEAR(oracle::monte_carlo_checksum(n, k, b, 20000, trial), exact,
                4 * std::sqrt(exact * (1 - exact) / 2e4) + 1e-12);
  }
}

TEST(Simulation, NothingModifiedNeverDetected) {
  EXPECT_EQ(simulate_attestation({20, 500}, 0, 20, 1000, 4), 0.0);
}

TEST(Simulation, Deterministic) {
  EXPECT_EQ(simulate_attestation({40, 500}, 3, 7, 5000, 77),
            simulate_attestation({40, 500}, 3, 7, 5000, 77));
}

TEST(Calibration, PerfectIdentityFit) {
  const std::vector<CalibrationPoint> points{{0.1, 0.1, 1}, {0.5, 0.5, 5}, {0.9, 0.9, 9}};
  const auto c = calibrate(points);
  EXPECT_NEAR(c.detection_slope, 1.0, 1e-12);
  EXPECT_NEAR(c.detection_intercept, 0.0, 1e-12);
  EXPECT_NEAR(c.detection_residual, 0.0, 1e-12);
  EXPECT_FALSE(c.synthetic);
}

TEST(Calibration, TwoPointCostLine) {
  const std::vector<CalibrationPoint> points{{0.2, 0.2, 0.1}, {0.8, 0.8, 0.4}};
  const auto c = calibrate(points);
  EXPECT_NEAR(c.cost_slope, 0.5, 1e-12);
  EXPECT_NEAR(c.cost_intercept, 0.0, 1e-12);
}

TEST(Calibration, HypergeometricDataGivesUnitSlope) {
  std::vector<CalibrationPoint> points;
  for (std::uint64_t b = 0; b <= 40; ++b) {
    const double coverage = static_cast<double>(b) / 40.0;
    points.push_back({coverage, checksum_detection_probability({40, 500}, 1, b), 3.0 * coverage});
  }
  const auto c = calibrate(points);
  EXPECT_NEAR(c.detection_slope, 1.0, 1e-9);
  EXPECT_NEAR(c.detection_intercept, 0.0, 1e-9);
}

TEST(Calibration, DegenerateInput) {
  const std::vector<CalibrationPoint> same{{0.5, 0.4, 1}, {0.5, 0.6, 2}};
  EXPECT_THROW(calibrate(same), DegenerateFit);
  EXPECT_THROW(calibrate(std::vector<CalibrationPoint>{}), DegenerateFit);
}

TEST(Calibration, PredictionsClamped) {
  CoverageCalibration c;
  c.detection_slope = 2.0;
  c.detection_intercept = -0.5;
  c.cost_intercept = -3.0;
  EXPECT_EQ(c.detection_rate(1.0), 1.0);
  EXPECT_EQ(c.detection_rate(0.0), 0.0);
  EXPECT_EQ(c.runtime_ms(0.1), 0.0);
}

TEST(Calibration, CsvParsing) {
  std::istringstream good("coverage,detection_rate,runtime_ms\n0.1,0.1,1\n0.9,0.8,9\n");
  EXPECT_EQ(read_calibration_csv(good).size(), 2u);
  std::istringstream bad_header("cov,det,ms\n0.1,0.1,1\n");
  EXPECT_THROW(read_calibration_csv(bad_header), ParseError);
  std::istringstream bad_row("coverage,detection_rate,runtime_ms\n0.1,0.1,1\n0.5,abc,2\n");
  try {
    read_calibration_csv(bad_row);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  std::istringstream out_of_range("coverage,detection_rate,runtime_ms\n1.5,0.1,1\n");
  EXPECT_THROW(read_calibration_csv(out_of_range), ParseError);
}

TEST(MethodFromCoverage, IdentityCalibration) {
  const auto c = default_calibration();
  EXPECT_TRUE(c.synthetic);
  EXPECT_EQ(method_from_coverage(0.0, c, 1.0).detection_rate, 0.0);
  EXPECT_EQ(method_from_coverage(1.0, c, 1.0).detection_rate, 1.0);
  const auto half = method_from_coverage(0.5, c, 1.0);
  EXPECT_DOUBLE_EQ(half.detection_rate, 0.5);
  EXPECT_DOUBLE_EQ(half.run_cost, 5.0);
  EXPECT_DOUBLE_EQ(method_from_coverage(0.5, c, 2.5).run_cost, 12.5);
  EXPECT_THROW(method_from_coverage(1.2, c, 1.0), DomainError);
}
