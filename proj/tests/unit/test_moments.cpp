#include <gtest/gtest.h>

#include <cmath>

#include "lclt/error.hpp"
#include "lclt/moments.hpp"
#include "oracles.hpp"

using namespace lclt;

TEST(Moments, ThreeVerticesIsBernoulli) {
    for (double p : {0.1, 0.5, 0.9}) {
        const auto m = moments(3, p);
        const double q = p * p * p;
        EXPECT_DOUBLE_EQ(m.mu, q);
        EXPECT_NEAR(m.sigma2, q * (1 - q), 1e-15);
    }
}

TEST(Moments, FourVerticesHalf) {
    const auto m = moments(4, 0.5);
    EXPECT_DOUBLE_EQ(m.mu, 0.5);
    const auto brute = oracle::brute_moments(4, 0.5);
    EXPECT_NEAR(static_cast<double>(brute.var), 0.625, 1e-15);
    EXPECT_NEAR(m.sigma2, static_cast<double>(brute.var), 1e-15);
}

TEST(Moments, AgreesWithBruteForceEnumeration) {
    for (int n = 3; n <= 6; ++n)
        for (int i = 0; i <= 10; ++i) {
            const double p = 0.05 + 0.09 * i;
            const auto brute = oracle::brute_moments(n, p);
            const auto m = moments(n, p);
            EXPECT_NEAR(m.mu / static_cast<double>(brute.mean), 1.0, 1e-12) << n << " " << p;
            EXPECT_NEAR(m.sigma2 / static_cast<double>(brute.var), 1.0, 1e-12) << n << " " << p;
        }
}

TEST(Moments, MeanIsBinomialTimesCube) {
    const auto m = moments(100, 0.3);
    EXPECT_NEAR(m.mu, 161700.0 * 0.027, 1e-9);
    EXPECT_DOUBLE_EQ(m.sigma, std::sqrt(m.sigma2));
}

TEST(Moments, VariancePositiveAndOfOrderN4P5) {
    for (std::size_t n : {64U, 256U, 1024U, 4096U}) {
        for (double scale : {4.0, 8.0, 16.0}) {
            const double p = std::min(0.9, scale / std::sqrt(static_cast<double>(n)));
            const auto m = moments(n, p);
            ASSERT_GT(m.sigma2, 0.0);
            const double ratio = m.sigma2 / (std::pow(n, 4.0) * std::pow(p, 5.0));
            EXPECT_GT(ratio, 0.01);
            EXPECT_LT(ratio, 1.0);
        }
    }
}

TEST(Moments, RejectsBadInput) {
    try {
        (void)moments(2, 0.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::invalid_parameter);
    }
    EXPECT_THROW((void)moments(10, 0.0), Error);
    EXPECT_THROW((void)moments(10, 1.0), Error);
}

TEST(Standardize, MeanMapsToZero) {
    const auto m = moments(4, 0.5);
    // mu = 0.5 is not integral; use a cell with integral mean instead.
    Moments integral = m;
    integral.mu = 3.0;
    EXPECT_DOUBLE_EQ(standardize(3, integral).x, 0.0);
}

TEST(Standardize, ThreeVerticesHalf) {
    const auto m = moments(3, 0.5);
    EXPECT_NEAR(standardize(1, m).x, (1 - 0.125) / std::sqrt(0.125 * 0.875), 1e-15);
}

TEST(Standardize, RoundTripsEveryCount) {
    for (std::size_t n : {3U, 6U, 40U}) {
        const auto m = moments(n, 0.37);
        const auto top = static_cast<std::int64_t>(n * (n - 1) * (n - 2) / 6);
        for (std::int64_t k = 0; k <= top; ++k) {
            const auto lp = standardize(k, m);
            ASSERT_EQ(lp.k, k);
            ASSERT_EQ(lattice_count(lp.x, m), k);
        }
    }
}

TEST(Standardize, DegenerateSigmaRejected) {
    Moments m;
    m.mu = 1.0;
    try {
        (void)standardize(1, m);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::degenerate);
    }
}

TEST(Binomial, SmallValues) {
    EXPECT_DOUBLE_EQ(binomial(6, 3), 20.0);
    EXPECT_DOUBLE_EQ(binomial(100, 3), 161700.0);
    EXPECT_DOUBLE_EQ(binomial(5, 0), 1.0);
    EXPECT_DOUBLE_EQ(binomial(3, 5), 0.0);
}
