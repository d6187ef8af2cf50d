#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <vector>

#include "lclt/charfn.hpp"
#include "lclt/error.hpp"
#include "lclt/exact_oracle.hpp"
#include "lclt/moments.hpp"
#include "oracles.hpp"

using namespace lclt;

namespace {

std::complex<double> oracle_standardized(int n, double p, double t) {
    const auto pmf = oracle::brute_pmf(n, p);
    const auto m = moments(n, p);
    return std::polar(1.0, -t * m.mu / m.sigma) * oracle::charfn_of_pmf(pmf, t / m.sigma);
}

} // namespace

TEST(EstimateCharfn, ZeroIsExactlyOne) {
    const std::vector<double> grid{0.0, 0.5};
    const auto s = estimate_charfn(20, 0.3, grid, 5000, 3);
    EXPECT_EQ(s.estimates[0], std::complex<double>(1.0, 0.0));
    EXPECT_EQ(s.ci_radius[0], 0.0);
    EXPECT_EQ(s.samples_used, 5000U);
}

TEST(EstimateCharfn, MatchesOracleAtSinglePoint) {
    const std::vector<double> grid{1.3};
    const auto s = estimate_charfn(5, 0.4, grid, 200000, 11);
    EXPECT_LE(std::abs(s.estimates[0] - oracle_standardized(5, 0.4, 1.3)), 3.0 * s.ci_radius[0]);
}

TEST(EstimateCharfn, PairedGridIsConjugateSymmetric) {
    const std::vector<double> grid{-2.0, 2.0};
    const auto s = estimate_charfn(30, 0.2, grid, 4000, 5);
    EXPECT_EQ(s.estimates[0], std::conj(s.estimates[1]));
    EXPECT_EQ(s.ci_radius[0], s.ci_radius[1]);
}

TEST(EstimateCharfn, ModulusWithinCi) {
    std::vector<double> grid;
    for (int i = -10; i <= 10; ++i) grid.push_back(0.4 * i);
    const auto s = estimate_charfn(40, 0.25, grid, 20000, 9);
    for (std::size_t j = 0; j < grid.size(); ++j) EXPECT_LE(std::abs(s.estimates[j]), 1.0 + s.ci_radius[j]);
}

TEST(EstimateCharfn, AgreesWithOracleOnSmallGraphs) {
    std::vector<double> grid;
    for (int i = 1; i <= 20; ++i) grid.push_back(-3.0 + 0.3 * i);
    std::size_t inside = 0;
    std::size_t total = 0;
    for (int n = 3; n <= 6; ++n) {
        for (double p : {0.3, 0.6}) {
            const auto s = estimate_charfn(n, p, grid, 100000, 100 + n);
            for (std::size_t j = 0; j < grid.size(); ++j) {
                inside += std::abs(s.estimates[j] - oracle_standardized(n, p, grid[j])) <= 3.0 * s.ci_radius[j];
                ++total;
            }
        }
    }
    EXPECT_GE(static_cast<double>(inside), 0.99 * total);
}

TEST(EstimateCharfn, WorkerCountDoesNotChangeResult) {
    const std::vector<double> grid{-1.0, 0.3, 2.0};
    const auto a = estimate_charfn(25, 0.3, grid, 3000, 7, 1);
    const auto b = estimate_charfn(25, 0.3, grid, 3000, 7, 3);
    EXPECT_EQ(a.estimates, b.estimates);
    EXPECT_EQ(a.ci_radius, b.ci_radius);
}

TEST(EstimateCharfn, RejectsBadInput) {
    const std::vector<double> empty;
    const std::vector<double> nan{std::nan("")};
    const std::vector<double> ok{1.0};
    EXPECT_THROW((void)estimate_charfn(10, 0.3, empty, 5000, 1), Error);
    EXPECT_THROW((void)estimate_charfn(10, 0.3, nan, 5000, 1), Error);
    EXPECT_THROW((void)estimate_charfn(10, 0.3, ok, 999, 1), Error);
}

TEST(OracleSeries, MatchesBruteForce) {
    const auto table = build_table(5);
    const std::vector<double> grid{-1.7, 0.0, 0.9, 4.0};
    const auto s = oracle_series(table, 0.45, grid);
    for (std::size_t j = 0; j < grid.size(); ++j)
        EXPECT_NEAR(std::abs(s.estimates[j] - oracle_standardized(5, 0.45, grid[j])), 0.0, 1e-12);
}

TEST(SteinDiscrepancy, ThreeVerticesClosedForm) {
    const auto table = build_table(3);
    std::vector<double> grid;
    for (int i = -20; i <= 20; ++i) grid.push_back(i / 20.0);
    const auto s = oracle_series(table, 0.5, grid);
    double expected = 0.0;
    for (double t : grid)
        expected = std::max(expected, std::abs(oracle::standardized_bernoulli_charfn(0.5, t) - std::exp(-t * t / 2)));
    const auto d = stein_discrepancy(3, 0.5, 1.0, s);
    EXPECT_NEAR(d.discrepancy, expected, 1e-12);
    EXPECT_EQ(d.points, grid.size());
    EXPECT_NEAR(d.predictor, 1.0 / (3.0 * std::sqrt(0.5)), 1e-15);
}

TEST(SteinDiscrepancy, ZeroCutoffAndNonnegative) {
    const auto table = build_table(4);
    const std::vector<double> grid{0.0, 0.5};
    const auto s = oracle_series(table, 0.3, grid);
    EXPECT_EQ(stein_discrepancy(4, 0.3, 0.0, s).discrepancy, 0.0);
    EXPECT_GE(stein_discrepancy(4, 0.3, 0.5, s).discrepancy, 0.0);
}

TEST(SteinDiscrepancy, GridShortOfKIsCoverageError) {
    const auto table = build_table(4);
    const std::vector<double> grid{0.0, 0.5};
    const auto s = oracle_series(table, 0.3, grid);
    try {
        (void)stein_discrepancy(4, 0.3, 2.0, s);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::coverage);
    }
}

TEST(SteinDiscrepancy, DecreasesAlongFamily) {
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) grid.push_back(-2.0 + 0.1 * i);
    std::vector<double> d;
    std::vector<double> ci;
    for (std::size_t n : {32U, 64U, 128U, 256U}) {
        const double p = std::pow(static_cast<double>(n), -0.4);
        const auto s = estimate_charfn(n, p, grid, 100000, 77);
        d.push_back(stein_discrepancy(n, p, 2.0, s).discrepancy);
        double c = 0.0;
        for (double r : s.ci_radius) c = std::max(c, r);
        ci.push_back(c);
    }
    int inversions = 0;
    for (std::size_t i = 0; i + 1 < d.size(); ++i) inversions += d[i + 1] > d[i] + ci[i] + ci[i + 1];
    EXPECT_LE(inversions, 1);
    EXPECT_LT(d.back(), d.front());
}

TEST(ClassifyRegime, RightEndpointIsEdge) {
    const std::size_t n = 512;
    const double p = 0.35;
    const auto b = regime_bounds(n, p, 0.05, 2.0);
    const auto c = classify_regime(n, p, std::numbers::pi * b.sigma, 0.05, 2.0, 1.0);
    EXPECT_EQ(c.regime, Regime::edge);
    ASSERT_TRUE(c.bound_value.has_value());
    EXPECT_DOUBLE_EQ(*c.bound_value, std::exp(-std::sqrt(512.0)));
    EXPECT_EQ(classify_regime(n, p, 3.2 * b.sigma, 0.05, 2.0).regime, Regime::uncovered);
}

TEST(ClassifyRegime, OverlapGoesToSmallerBound) {
    // sigma / 2^11 lies in both the mid and the edge interval here.
    const std::size_t n = 1000000;
    const double p = 0.45;
    const double gamma = 0.05;
    const auto b = regime_bounds(n, p, gamma, 1.0);
    ASSERT_FALSE(b.mid_empty());
    const double t = b.sigma / 2048.0;
    ASSERT_GT(t, b.mid_lo);
    const double mid_bound = std::exp(-std::pow(t, 2 * gamma));
    const auto strict = classify_regime(n, p, t, gamma, 1.0, 1.0);
    EXPECT_TRUE(strict.in_mid);
    EXPECT_TRUE(strict.in_edge);
    EXPECT_EQ(strict.regime, Regime::edge);
    // c_edge chosen so that exp(-c sqrt n) exceeds the mid bound.
    const double c_small = -std::log(mid_bound) / 1000.0 / 2.0;
    const auto loose = classify_regime(n, p, t, gamma, 1.0, c_small);
    EXPECT_EQ(loose.regime, Regime::mid);
    EXPECT_DOUBLE_EQ(*loose.bound_value, mid_bound);
}

TEST(ClassifyRegime, JustAboveMidLowerEnd) {
    const std::size_t n = 1000000;
    const double p = 0.45;
    const double gamma = 0.05;
    const double lo = std::pow(std::pow(2.0, 21) * p * p * n, 0.5 + gamma);
    const double t = lo * (1 + 1e-9);
    const auto c = classify_regime(n, p, t, gamma, 1.0);
    EXPECT_EQ(c.regime, Regime::mid);
    EXPECT_NEAR(*c.bound_value, std::exp(-std::pow(t, 2 * gamma)), 1e-15);
}

TEST(ClassifyRegime, MidIsEmptyAtTenThousandVertices) {
    // (2^21 p^2 n)^0.6 is far above sigma / 2^10 for n = 10^4, p = 0.1.
    const auto b = regime_bounds(10000, 0.1, 0.1, 1.0);
    EXPECT_TRUE(b.mid_empty());
    const auto c = classify_regime(10000, 0.1, b.mid_lo * (1 + 1e-9), 0.1, 1.0);
    EXPECT_FALSE(c.in_mid);
    EXPECT_NE(c.regime, Regime::mid);
}

TEST(ClassifyRegime, SteinOnlyForUnclaimedT) {
    const auto c = classify_regime(512, 0.35, 1.5, 0.05, 2.0);
    EXPECT_EQ(c.regime, Regime::stein);
    EXPECT_FALSE(c.bound_value.has_value());
}

TEST(ClassifyRegime, GammaOutsideRangeRejected) {
    for (double g : {0.0, 0.125, 0.2, -0.1}) {
        try {
            (void)classify_regime(512, 0.3, 1.0, g, 2.0);
            FAIL() << g;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::invalid_parameter);
        }
    }
}

TEST(RegimeGrid, IncludesBoundariesExactly) {
    const auto b = regime_bounds(512, 0.35, 0.05, 2.0);
    const auto grid = regime_grid(b, 8);
    for (double v : {b.K, b.edge_lo, b.mid_hi, b.edge_hi})
        EXPECT_NE(std::find(grid.begin(), grid.end(), v), grid.end()) << v;
    EXPECT_EQ(grid.front(), 0.0);
    EXPECT_TRUE(std::is_sorted(grid.begin(), grid.end()));
}

TEST(RegimeCheck, CsvHasHeaderAndOneRowPerT) {
    const auto table = build_table(6);
    const std::vector<double> grid{0.0, 1.0, 5.0};
    const auto s = oracle_series(table, 0.3, grid);
    const auto check = check_regime_bounds(s, 0.05, 2.0);
    std::ostringstream out;
    write_charfn_csv(out, s, check);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "t,re,im,modulus,ci,regime,bound");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 3);
}

TEST(RegimeCheck, ReportsBothEdgeRates) {
    const auto table = build_table(6);
    const std::vector<double> grid{0.0};
    const auto check = check_regime_bounds(oracle_series(table, 0.3, grid), 0.05, 2.0, 1.0);
    EXPECT_DOUBLE_EQ(check.edge_rate_sqrt_n, std::exp(-std::sqrt(6.0)));
    EXPECT_DOUBLE_EQ(check.edge_rate_pn, std::exp(-0.3 * 6.0 / 64.0));
}

TEST(IntervalCover, MatchesIndependentSweep) {
    for (auto [n, p, gamma] : {std::tuple{1000000.0, 0.01, 0.05}, std::tuple{1000000.0, 0.2, 0.01},
                               std::tuple{10000000.0, 0.01, 0.05}, std::tuple{10000000.0, 0.3, 0.05}}) {
        const auto r = interval_cover_check(static_cast<std::size_t>(n), p, gamma);
        const auto o = oracle::cover_sweep(n, p, gamma, moments(static_cast<std::size_t>(n), p).sigma);
        EXPECT_EQ(r.m_first, o.m_first);
        EXPECT_EQ(r.m_last, o.m_last);
        EXPECT_EQ(r.overlap_failures, o.failures) << n << " " << p;
        EXPECT_EQ(r.target_covered, o.covered) << n << " " << p;
        EXPECT_NEAR(r.last_right_endpoint / o.last_right, 1.0, 1e-12);
        EXPECT_TRUE(r.endpoints_monotone);
    }
}

TEST(IntervalCover, WitnessesLieInTheirIntervals) {
    const auto r = interval_cover_check(10000000, 0.05, 0.05);
    const double exponent = 1.0 / (2.0 - r.delta);
    for (const auto& w : r.witnesses) {
        if (!w.m) continue;
        const double m = static_cast<double>(*w.m);
        EXPECT_LT(std::pow(std::pow(2.0, 19) * r.p * r.p * 1e14 / m, exponent), w.t);
        EXPECT_LT(w.t, r.sigma / (256.0 * r.p * std::sqrt(m)));
    }
}

TEST(IntervalCover, OutsideValidRangeIsDomainError) {
    try {
        (void)interval_cover_check(1000, 0.1, 0.05);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::domain);
    }
}
