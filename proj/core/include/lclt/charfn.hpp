#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lclt/exact_oracle.hpp"
#include "lclt/moments.hpp"

namespace lclt {

/// Estimates of E[exp(i t X*)] on a grid of t, X* the standardized triangle count.
struct CharFnSeries {
    std::size_t n = 0;
    double p = 0.0;
    std::vector<double> t_grid;
    std::vector<std::complex<double>> estimates;
    std::vector<double> ci_radius; // 95% radius of the complex mean
    std::size_t samples_used = 0;
};

inline constexpr std::size_t kCharFnBatches = 30;

/// Monte Carlo estimate over `num_samples` graphs. Every grid point is
/// evaluated on the same samples; negative t reuses the cos/sin of |t|, so the
/// series is exactly conjugate-symmetric. Radii come from 30 batch means.
CharFnSeries estimate_charfn(std::size_t n, double p, std::span<const double> t_grid, std::size_t num_samples,
                             std::uint64_t seed, std::size_t workers = 1);

/// Exact E[exp(i t X*)] = exp(-i t mu / sigma) * phi_X(t / sigma) from the census.
CharFnSeries oracle_series(const TriangleEdgeTable& table, double p, std::span<const double> t_grid);

struct SteinDiscrepancy {
    double discrepancy = 0.0;    // sup over gridded |t| <= K of |phi(t) - exp(-t^2/2)|
    double predictor = 0.0;      // constant * K / (n p^(1/2))
    double ratio = 0.0;          // discrepancy / predictor
    std::size_t points = 0;
};

SteinDiscrepancy stein_discrepancy(std::size_t n, double p, double K, const CharFnSeries& series,
                                   double constant = 1.0);

enum class Regime { stein, mid, edge, uncovered };

std::string to_string(Regime regime);

/// Regime boundaries for one (n, p, gamma, K).
struct RegimeBounds {
    double K = 0.0;
    double mid_lo = 0.0;  // (2^21 p^2 n)^(1/2 + gamma)
    double mid_hi = 0.0;  // sigma / 2^10
    double edge_lo = 0.0; // sigma / 2^12
    double edge_hi = 0.0; // pi sigma
    bool mid_valid = false;  // p in (4 n^-1/2, 1/2)
    bool edge_valid = false; // p in (n^-1/2, 1/2)
    double sigma = 0.0;

    bool mid_empty() const noexcept { return !(mid_lo < mid_hi); }
};

RegimeBounds regime_bounds(std::size_t n, double p, double gamma, double K);

/// K = (log n)^(8/gamma) (p^2 n)^(1/2 + gamma).
double default_stein_cutoff(std::size_t n, double p, double gamma);

struct RegimeClassification {
    double t = 0.0;
    Regime regime = Regime::uncovered;
    std::optional<double> bound_value;
    double K = 0.0;
    double gamma = 0.0;
    double c_edge = 1.0;
    bool in_mid = false;
    bool in_edge = false;
};

/// Assigns |t| to a regime. Where the mid and edge intervals overlap, the one
/// with the smaller bound wins; the Stein window only claims t that neither
/// bounded regime covers.
RegimeClassification classify_regime(std::size_t n, double p, double t, double gamma, double K, double c_edge = 1.0);

/// Geometric spacing inside each interval between consecutive regime
/// boundaries, with K, sigma/2^12, sigma/2^10 and pi sigma included exactly.
std::vector<double> regime_grid(const RegimeBounds& bounds, std::size_t points_per_segment, bool include_zero = true);

struct RegimeCheckRow {
    RegimeClassification cls;
    double modulus = 0.0;
    double ci = 0.0;
    bool holds = true; // |estimate| <= bound + 3 ci, mid rows only
};

struct RegimeCheck {
    std::vector<RegimeCheckRow> rows;
    std::size_t mid_points = 0;
    std::size_t mid_violations = 0;
    double edge_rate_sqrt_n = 0.0; // exp(-c_edge sqrt n)
    double edge_rate_pn = 0.0;     // exp(-p n / 2^6)
};

RegimeCheck check_regime_bounds(const CharFnSeries& series, double gamma, double K, double c_edge = 1.0);

/// CSV with header `t,re,im,modulus,ci,regime,bound`.
void write_charfn_csv(std::ostream& out, const CharFnSeries& series, const RegimeCheck& check);

struct CoverWitness {
    double t = 0.0;
    std::optional<std::uint64_t> m;
};

struct CoverReport {
    std::size_t n = 0;
    double p = 0.0;
    double gamma = 0.0;
    double delta = 0.0; // 1/2 + gamma = 1 / (2 - delta)
    double sigma = 0.0;
    std::uint64_t m_first = 0;
    std::uint64_t m_last = 0;
    std::uint64_t overlap_failures = 0;
    std::optional<std::uint64_t> first_failure;
    bool overlaps_hold = false;
    bool endpoints_monotone = false;
    double target_lo = 0.0; // (2^21 p^2 n)^(1/2 + gamma)
    double target_hi = 0.0; // sigma / 2^10
    bool target_empty = false;
    bool target_covered = false;
    double last_right_endpoint = 0.0; // right end of I_floor(n/2)
    bool last_right_below_target = false;
    double first_left_endpoint = 0.0; // left end of I_ceil(4/p^2)
    bool first_left_above_target = false;
    std::vector<CoverWitness> witnesses;
};

/// Sweeps I_m = ((2^19 p^2 n^2 / m)^(1/(2-delta)), sigma / (2^8 p m^(1/2)))
/// over integers m in (4/p^2, n/2).
CoverReport interval_cover_check(std::size_t n, double p, double gamma, std::size_t witness_points = 16);

} // namespace lclt
