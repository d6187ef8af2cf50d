#include "lclt/charfn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "lclt/error.hpp"
#include "lclt/format.hpp"
#include "lclt/monte_carlo.hpp"

namespace lclt {
namespace {

struct CharFnBatch {
    std::vector<double> sum_cos;
    std::vector<double> sum_sin;
    std::size_t count = 0;
};

void validate_grid(std::span<const double> t_grid) {
    require(!t_grid.empty(), ErrorKind::invalid_parameter, "t grid is empty");
    for (const double t : t_grid) require(std::isfinite(t), ErrorKind::invalid_parameter, "t values must be finite");
}

void validate_gamma(double gamma) {
    require(std::isfinite(gamma) && gamma > 0.0 && gamma < 0.125, ErrorKind::invalid_parameter,
            "gamma must lie in (0, 1/8)");
}

} // namespace

CharFnSeries estimate_charfn(std::size_t n, double p, std::span<const double> t_grid, std::size_t num_samples,
                             std::uint64_t seed, std::size_t workers) {
    validate_grid(t_grid);
    require(num_samples >= 1000, ErrorKind::invalid_parameter, "charfn estimation needs at least 1000 samples");
    const Moments mom = moments(n, p);
    const std::size_t points = t_grid.size();

    std::vector<double> abs_t(points);
    for (std::size_t j = 0; j < points; ++j) abs_t[j] = std::abs(t_grid[j]);

    const SamplingPlan plan{n, p, seed, num_samples, kCharFnBatches, workers, 0};
    const auto batches = sample_triangle_counts<CharFnBatch>(
        plan, [points] { return CharFnBatch{std::vector<double>(points, 0.0), std::vector<double>(points, 0.0), 0}; },
        [&](CharFnBatch& acc, std::uint64_t k) {
            const double x = (static_cast<double>(k) - mom.mu) / mom.sigma;
            for (std::size_t j = 0; j < points; ++j) {
                const double angle = abs_t[j] * x;
                acc.sum_cos[j] += std::cos(angle);
                acc.sum_sin[j] += std::sin(angle);
            }
            ++acc.count;
        });

    CharFnSeries series;
    series.n = n;
    series.p = p;
    series.t_grid.assign(t_grid.begin(), t_grid.end());
    series.estimates.resize(points);
    series.ci_radius.resize(points);
    series.samples_used = num_samples;

    const auto total = static_cast<double>(num_samples);
    const auto b = static_cast<double>(batches.size());
    for (std::size_t j = 0; j < points; ++j) {
        double re = 0.0;
        double im = 0.0;
        for (const auto& batch : batches) {
            re += batch.sum_cos[j];
            im += batch.sum_sin[j];
        }
        re /= total;
        im /= total;
        double spread = 0.0;
        for (const auto& batch : batches) {
            if (batch.count == 0) continue;
            const double c = static_cast<double>(batch.count);
            const double dr = batch.sum_cos[j] / c - re;
            const double di = batch.sum_sin[j] / c - im;
            spread += dr * dr + di * di;
        }
        const double sign = t_grid[j] < 0.0 ? -1.0 : 1.0;
        series.estimates[j] = {re, sign * im};
        series.ci_radius[j] = 1.96 * std::sqrt(spread / (b * (b - 1.0)));
    }
    return series;
}

CharFnSeries oracle_series(const TriangleEdgeTable& table, double p, std::span<const double> t_grid) {
    validate_grid(t_grid);
    const Moments mom = moments(table.n(), p);
    const auto pmf = exact_pmf(table, p);
    CharFnSeries series;
    series.n = table.n();
    series.p = p;
    series.t_grid.assign(t_grid.begin(), t_grid.end());
    for (const double t : t_grid) {
        const auto phase = std::polar(1.0, -t * mom.mu / mom.sigma);
        series.estimates.push_back(t == 0.0 ? std::complex<double>(1.0, 0.0)
                                            : phase * charfn_from_pmf(pmf, t / mom.sigma));
        series.ci_radius.push_back(0.0);
    }
    return series;
}

SteinDiscrepancy stein_discrepancy(std::size_t n, double p, double K, const CharFnSeries& series, double constant) {
    require(K >= 0.0 && std::isfinite(K), ErrorKind::invalid_parameter, "K must be finite and nonnegative");
    double reach = 0.0;
    for (const double t : series.t_grid) reach = std::max(reach, std::abs(t));
    require(reach >= K * (1.0 - 1e-12), ErrorKind::coverage,
            "t grid reaches " + format_double(reach) + " but K = " + format_double(K));

    SteinDiscrepancy out;
    for (std::size_t j = 0; j < series.t_grid.size(); ++j) {
        const double t = series.t_grid[j];
        if (std::abs(t) > K) continue;
        const double gap = std::abs(series.estimates[j] - std::complex<double>(std::exp(-t * t / 2.0), 0.0));
        out.discrepancy = std::max(out.discrepancy, gap);
        ++out.points;
    }
    out.predictor = constant * K / (static_cast<double>(n) * std::sqrt(p));
    out.ratio = out.predictor > 0.0 ? out.discrepancy / out.predictor : 0.0;
    return out;
}

std::string to_string(Regime regime) {
    switch (regime) {
    case Regime::stein: return "stein";
    case Regime::mid: return "mid";
    case Regime::edge: return "edge";
    case Regime::uncovered: return "uncovered";
    }
    return "uncovered";
}

double default_stein_cutoff(std::size_t n, double p, double gamma) {
    validate_gamma(gamma);
    const auto dn = static_cast<double>(n);
    return std::pow(std::log(dn), 8.0 / gamma) * std::pow(p * p * dn, 0.5 + gamma);
}

RegimeBounds regime_bounds(std::size_t n, double p, double gamma, double K) {
    validate_gamma(gamma);
    require(K >= 0.0, ErrorKind::invalid_parameter, "K must be nonnegative");
    const Moments mom = moments(n, p);
    const auto dn = static_cast<double>(n);
    RegimeBounds b;
    b.K = K;
    b.sigma = mom.sigma;
    b.mid_lo = std::pow(std::ldexp(p * p * dn, 21), 0.5 + gamma);
    b.mid_hi = std::ldexp(mom.sigma, -10);
    b.edge_lo = std::ldexp(mom.sigma, -12);
    b.edge_hi = std::numbers::pi * mom.sigma;
    b.mid_valid = p > 4.0 / std::sqrt(dn) && p < 0.5;
    b.edge_valid = p > 1.0 / std::sqrt(dn) && p < 0.5;
    return b;
}

RegimeClassification classify_regime(std::size_t n, double p, double t, double gamma, double K, double c_edge) {
    const RegimeBounds b = regime_bounds(n, p, gamma, K);
    const double at = std::abs(t);
    RegimeClassification c;
    c.t = t;
    c.K = K;
    c.gamma = gamma;
    c.c_edge = c_edge;
    c.in_mid = b.mid_valid && at > b.mid_lo && at < b.mid_hi;
    c.in_edge = b.edge_valid && at > b.edge_lo && at <= b.edge_hi;

    const double mid_bound = std::exp(-std::pow(at, 2.0 * gamma));
    const double edge_bound = std::exp(-c_edge * std::sqrt(static_cast<double>(n)));
    if (c.in_mid && (!c.in_edge || mid_bound <= edge_bound)) {
        c.regime = Regime::mid;
        c.bound_value = mid_bound;
    } else if (c.in_edge) {
        c.regime = Regime::edge;
        c.bound_value = edge_bound;
    } else if (at <= K) {
        c.regime = Regime::stein;
    }
    return c;
}

std::vector<double> regime_grid(const RegimeBounds& bounds, std::size_t points_per_segment, bool include_zero) {
    require(points_per_segment >= 1, ErrorKind::invalid_parameter, "need at least one point per segment");
    std::vector<double> breaks;
    for (const double v : {bounds.K, bounds.edge_lo, bounds.mid_hi, bounds.edge_hi})
        if (v > 0.0 && v <= bounds.edge_hi) breaks.push_back(v);
    if (!bounds.mid_empty() && bounds.mid_lo > 0.0 && bounds.mid_lo < bounds.edge_hi) breaks.push_back(bounds.mid_lo);
    std::sort(breaks.begin(), breaks.end());
    breaks.insert(breaks.begin(), breaks.front() / 100.0);

    std::vector<double> grid;
    if (include_zero) grid.push_back(0.0);
    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
        const double lo = breaks[s];
        const double hi = breaks[s + 1];
        if (!(lo < hi)) continue;
        const double ratio = std::pow(hi / lo, 1.0 / static_cast<double>(points_per_segment + 1));
        double t = lo;
        for (std::size_t i = 0; i < points_per_segment; ++i) {
            t *= ratio;
            grid.push_back(t);
        }
    }
    for (const double v : breaks) grid.push_back(v);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

RegimeCheck check_regime_bounds(const CharFnSeries& series, double gamma, double K, double c_edge) {
    RegimeCheck check;
    const auto dn = static_cast<double>(series.n);
    check.edge_rate_sqrt_n = std::exp(-c_edge * std::sqrt(dn));
    check.edge_rate_pn = std::exp(-series.p * dn / 64.0);
    for (std::size_t j = 0; j < series.t_grid.size(); ++j) {
        RegimeCheckRow row;
        row.cls = classify_regime(series.n, series.p, series.t_grid[j], gamma, K, c_edge);
        row.modulus = std::abs(series.estimates[j]);
        row.ci = series.ci_radius[j];
        if (row.cls.regime == Regime::mid) {
            row.holds = row.modulus <= *row.cls.bound_value + 3.0 * row.ci;
            ++check.mid_points;
            if (!row.holds) ++check.mid_violations;
        }
        check.rows.push_back(row);
    }
    return check;
}

void write_charfn_csv(std::ostream& out, const CharFnSeries& series, const RegimeCheck& check) {
    out << "t,re,im,modulus,ci,regime,bound\n";
    for (std::size_t j = 0; j < series.t_grid.size(); ++j) {
        const auto& row = check.rows[j];
        out << format_double(series.t_grid[j]) << ',' << format_double(series.estimates[j].real()) << ','
            << format_double(series.estimates[j].imag()) << ',' << format_double(row.modulus) << ','
            << format_double(row.ci) << ',' << to_string(row.cls.regime) << ','
            << (row.cls.bound_value ? format_double(*row.cls.bound_value) : std::string{}) << '\n';
    }
}

CoverReport interval_cover_check(std::size_t n, double p, double gamma, std::size_t witness_points) {
    validate_gamma(gamma);
    const auto dn = static_cast<double>(n);
    require(p > 4.0 / std::sqrt(dn) && p < 0.5, ErrorKind::domain, "interval cover needs p in (4 n^-1/2, 1/2)");

    CoverReport r;
    r.n = n;
    r.p = p;
    r.gamma = gamma;
    r.delta = 2.0 - 1.0 / (0.5 + gamma);
    r.sigma = moments(n, p).sigma;
    const double exponent = 1.0 / (2.0 - r.delta);
    const double left_scale = std::ldexp(p * p * dn * dn, 19);
    const double right_scale = r.sigma / std::ldexp(p, 8);
    auto left = [&](double m) { return std::pow(left_scale / m, exponent); };
    auto right = [&](double m) { return right_scale / std::sqrt(m); };

    const double m_lo = 4.0 / (p * p);
    const double m_hi = dn / 2.0;
    r.m_first = static_cast<std::uint64_t>(std::floor(m_lo)) + 1;
    r.m_last = static_cast<std::uint64_t>(std::ceil(m_hi)) - 1;
    require(r.m_first <= r.m_last, ErrorKind::domain, "no integer m in (4/p^2, n/2); p is too small for n");

    r.target_lo = std::pow(std::ldexp(p * p * dn, 21), 0.5 + gamma);
    r.target_hi = std::ldexp(r.sigma, -10);
    r.target_empty = !(r.target_lo < r.target_hi);
    r.last_right_endpoint = right(std::floor(m_hi));
    r.last_right_below_target = r.last_right_endpoint < r.target_hi;
    r.first_left_endpoint = left(std::ceil(m_lo));
    r.first_left_above_target = r.first_left_endpoint > r.target_lo;

    // Consecutive overlap and monotonicity, plus the merged union in
    // increasing-left order (m descending).
    r.endpoints_monotone = true;
    for (std::uint64_t m = r.m_first; m + 1 <= r.m_last; ++m) {
        const auto dm = static_cast<double>(m);
        if (!(left(dm) < right(dm + 1.0))) {
            ++r.overlap_failures;
            if (!r.first_failure) r.first_failure = m;
        }
        if (!(left(dm + 1.0) < left(dm) && right(dm + 1.0) < right(dm))) r.endpoints_monotone = false;
    }
    r.overlaps_hold = r.overlap_failures == 0;

    if (r.target_empty) {
        r.target_covered = true;
    } else {
        // (target_lo, reach) is covered so far; a gap appears as soon as the
        // next interval starts at or beyond reach.
        double reach = r.target_lo;
        for (std::uint64_t m = r.m_last + 1; m-- > r.m_first;) {
            const auto dm = static_cast<double>(m);
            const double l = left(dm);
            const double h = right(dm);
            if (!(l < h)) continue;
            if (!(l <= r.target_lo || l < reach)) break;
            reach = std::max(reach, h);
            if (reach >= r.target_hi) break;
        }
        r.target_covered = reach >= r.target_hi;
    }

    // Witnesses: the set of m with t in I_m is contiguous; the smallest m with
    // left(m) < t has the largest right endpoint among them.
    const double w_lo = r.target_empty ? right(static_cast<double>(r.m_last)) : r.target_lo;
    const double w_hi = r.target_empty ? left(static_cast<double>(r.m_first)) : r.target_hi;
    for (std::size_t i = 0; i < witness_points; ++i) {
        const double frac = (static_cast<double>(i) + 0.5) / static_cast<double>(witness_points);
        const double t = w_lo * std::pow(w_hi / w_lo, frac);
        std::uint64_t lo = r.m_first;
        std::uint64_t hi = r.m_last + 1;
        while (lo < hi) {
            const std::uint64_t mid = lo + (hi - lo) / 2;
            if (left(static_cast<double>(mid)) < t) hi = mid;
            else lo = mid + 1;
        }
        CoverWitness w{t, std::nullopt};
        if (lo <= r.m_last && t < right(static_cast<double>(lo))) w.m = lo;
        r.witnesses.push_back(w);
    }
    return r;
}

} // namespace lclt
