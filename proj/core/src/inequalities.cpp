#include "lclt/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lclt/error.hpp"
#include "lclt/moments.hpp"

namespace lclt {

double nearest_int_dist(double x) {
    require(std::isfinite(x), ErrorKind::invalid_parameter, "nearest_int_dist needs a finite argument");
    return std::abs(x - std::nearbyint(x));
}

double binomial_charfn_bound(double p, double t) {
    require(p >= 0.0 && p <= 1.0, ErrorKind::invalid_parameter, "p must lie in [0, 1]");
    const double d = nearest_int_dist(t / (2.0 * std::numbers::pi));
    return 1.0 - 8.0 * p * (1.0 - p) * d * d;
}

double bernoulli_charfn_modulus(double p, double t) {
    const double s = std::sin(t / 2.0);
    return std::sqrt(std::max(0.0, 1.0 - 4.0 * p * (1.0 - p) * s * s));
}

double chernoff_bound(double mean, double t) {
    require(mean >= 0.0 && t >= 0.0, ErrorKind::invalid_parameter, "Chernoff needs mean >= 0 and t >= 0");
    const double denom = 2.0 * mean + t;
    if (denom == 0.0) return 2.0;
    return 2.0 * std::exp(-t * t / denom);
}

double binomial_two_sided_tail(std::size_t trials, double p, double t) {
    const double mean = static_cast<double>(trials) * p;
    long double tail = 0.0L;
    for (std::size_t k = 0; k <= trials; ++k) {
        if (std::abs(static_cast<double>(k) - mean) < t - 1e-9 * (1.0 + t)) continue;
        tail += static_cast<long double>(binomial(trials, k)) * std::pow(static_cast<long double>(p), k) *
                std::pow(static_cast<long double>(1.0 - p), trials - k);
    }
    return static_cast<double>(tail);
}

DerivativeProfile triangle_derivative_profile(std::size_t n, double p) {
    require(n >= 3, ErrorKind::invalid_parameter, "derivative profile needs n >= 3");
    const double mean = binomial(n, 3) * p * p * p;      // A empty
    const double one_edge = static_cast<double>(n - 2) * p * p; // A = {uv}
    const double two_edges = p;                           // A = {uv, vw}
    const double triangle = 1.0;                          // A = {uv, vw, uw}

    DerivativeProfile d;
    d.n = n;
    d.p = p;
    d.e[3] = triangle;
    d.e[2] = std::max(two_edges, d.e[3]);
    d.e[1] = std::max(one_edge, d.e[2]);
    d.e[0] = std::max(mean, d.e[1]);
    return d;
}

KimVuBound kimvu_bound(std::size_t n, double p, double r, double c3) {
    require(r > 1.0, ErrorKind::invalid_parameter, "Kim-Vu needs r > 1");
    KimVuBound b;
    b.profile = triangle_derivative_profile(n, p);
    b.threshold = c3 * r * r * r * std::sqrt(b.profile.e[0] * b.profile.e[1]);
    b.tail = std::exp(-r + 2.0 * std::log(static_cast<double>(n)));
    return b;
}

PaleyZygmund paley_zygmund_check(std::span<const double> values, double theta) {
    require(theta > 0.0 && theta < 1.0, ErrorKind::invalid_parameter, "theta must lie in (0, 1)");
    require(!values.empty(), ErrorKind::degenerate, "Paley-Zygmund needs a nonempty sample");
    long double sum = 0.0L;
    long double sum_sq = 0.0L;
    for (const double v : values) {
        require(v >= 0.0, ErrorKind::invalid_parameter, "Paley-Zygmund needs nonnegative values");
        sum += v;
        sum_sq += static_cast<long double>(v) * v;
    }
    require(sum > 0.0L, ErrorKind::degenerate, "Paley-Zygmund needs at least one positive value");
    const auto count = static_cast<long double>(values.size());
    const long double mean = sum / count;
    const long double second = sum_sq / count;
    std::size_t above = 0;
    for (const double v : values) above += static_cast<long double>(v) > theta * mean;

    PaleyZygmund pz;
    pz.lhs = static_cast<double>(static_cast<long double>(above) / count);
    pz.rhs = static_cast<double>((1.0L - theta) * (1.0L - theta) * mean * mean / second);
    pz.holds = pz.lhs >= pz.rhs;
    return pz;
}

double gaussian_tail(double K) {
    require(K >= 2.0, ErrorKind::domain, "the Gaussian tail chain needs K >= 2");
    return std::exp(-K * K / 2.0) / K;
}

Domination verify_charfn_bound_grid(std::size_t p_points, std::size_t t_points, double tolerance) {
    require(p_points >= 2 && t_points >= 2, ErrorKind::invalid_parameter, "grid needs at least two points per axis");
    Domination d;
    d.worst_excess = -std::numeric_limits<double>::infinity();
    const double t_span = 8.0 * std::numbers::pi;
    for (std::size_t i = 0; i < p_points; ++i) {
        const double p = 0.01 + 0.98 * static_cast<double>(i) / static_cast<double>(p_points - 1);
        for (std::size_t j = 0; j < t_points; ++j) {
            const double t = -4.0 * std::numbers::pi + t_span * static_cast<double>(j) / static_cast<double>(t_points - 1);
            const double excess = bernoulli_charfn_modulus(p, t) - binomial_charfn_bound(p, t);
            d.worst_excess = std::max(d.worst_excess, excess);
            d.violations += excess > tolerance;
            ++d.points;
        }
    }
    return d;
}

Domination verify_chernoff(std::size_t max_trials, double tolerance) {
    require(max_trials >= 1, ErrorKind::invalid_parameter, "need at least one trial");
    Domination d;
    d.worst_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t trials = 1; trials <= max_trials; ++trials)
        for (int tenth = 1; tenth <= 9; ++tenth) {
            const double p = tenth / 10.0;
            for (std::size_t t = 0; t <= trials; ++t) {
                const double exact = binomial_two_sided_tail(trials, p, static_cast<double>(t));
                const double excess = exact - chernoff_bound(static_cast<double>(trials) * p, static_cast<double>(t));
                d.worst_excess = std::max(d.worst_excess, excess);
                d.violations += excess > tolerance;
                ++d.points;
            }
        }
    return d;
}

} // namespace lclt
