#pragma once

// Brute-force reference computations used only by tests. None of them call
// into the library's enumeration, moment or bound code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

using Edge = std::pair<int, int>;

inline std::vector<Edge> all_pairs(int n) {
    std::vector<Edge> out;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) out.emplace_back(u, v);
    return out;
}

// Triangle count of the graph whose edges are the set bits of `mask` over all_pairs(n).
inline int triangles_of_mask(int n, std::uint64_t mask) {
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    const auto pairs = all_pairs(n);
    for (std::size_t i = 0; i < pairs.size(); ++i)
        if ((mask >> i) & 1U) adj[pairs[i].first][pairs[i].second] = adj[pairs[i].second][pairs[i].first] = true;
    int count = 0;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = b + 1; c < n; ++c) count += adj[a][b] && adj[b][c] && adj[a][c];
    return count;
}

// Law of the triangle count by summing over every labeled graph.
inline std::vector<long double> brute_pmf(int n, double p) {
    const int edges = n * (n - 1) / 2;
    const int top = n * (n - 1) * (n - 2) / 6;
    std::vector<long double> pmf(static_cast<std::size_t>(top) + 1, 0.0L);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << edges); ++mask) {
        const int m = std::popcount(mask);
        pmf[static_cast<std::size_t>(triangles_of_mask(n, mask))] +=
            std::pow(static_cast<long double>(p), m) * std::pow(1.0L - p, edges - m);
    }
    return pmf;
}

struct MeanVar {
    long double mean = 0.0L;
    long double var = 0.0L;
};

inline MeanVar brute_moments(int n, double p) {
    const auto pmf = brute_pmf(n, p);
    MeanVar mv;
    for (std::size_t k = 0; k < pmf.size(); ++k) mv.mean += pmf[k] * k;
    for (std::size_t k = 0; k < pmf.size(); ++k) mv.var += pmf[k] * (k - mv.mean) * (k - mv.mean);
    return mv;
}

inline std::complex<double> charfn_of_pmf(const std::vector<long double>& pmf, double theta) {
    std::complex<long double> z = 0.0L;
    for (std::size_t k = 0; k < pmf.size(); ++k)
        z += pmf[k] * std::polar(1.0L, static_cast<long double>(theta) * k);
    return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

// E exp(i t X*) for X ~ Bernoulli(q), q = p^3: the n = 3 triangle count.
inline std::complex<double> standardized_bernoulli_charfn(double p, double t) {
    const double q = p * p * p;
    const double s = std::sqrt(q * (1.0 - q));
    const std::complex<double> i(0.0, 1.0);
    return std::exp(-i * t * q / s) * (1.0 - q + q * std::exp(i * t / s));
}

// Maximum expected partial derivative of the triangle polynomial over every
// derivative set A of at least j edges, found by listing all sets of size <= 3
// (larger sets have zero derivative).
inline std::vector<double> brute_derivative_profile(int n, double p) {
    const auto pairs = all_pairs(n);
    std::vector<std::vector<int>> triangles;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = b + 1; c < n; ++c) {
                auto idx = [&](int u, int v) {
                    return static_cast<int>(std::find(pairs.begin(), pairs.end(), Edge{u, v}) - pairs.begin());
                };
                triangles.push_back({idx(a, b), idx(b, c), idx(a, c)});
            }
    auto expected_derivative = [&](const std::vector<int>& set) {
        double total = 0.0;
        for (const auto& tri : triangles) {
            bool contains = true;
            for (const int e : set) contains = contains && std::find(tri.begin(), tri.end(), e) != tri.end();
            if (contains) total += std::pow(p, 3 - static_cast<int>(set.size()));
        }
        return total;
    };
    std::vector<double> best(4, 0.0);
    const int e = static_cast<int>(pairs.size());
    auto consider = [&](const std::vector<int>& set) {
        const double v = expected_derivative(set);
        for (std::size_t j = 0; j <= set.size() && j < 4; ++j) best[j] = std::max(best[j], v);
    };
    consider({});
    for (int a = 0; a < e; ++a) {
        consider({a});
        for (int b = a + 1; b < e; ++b) {
            consider({a, b});
            for (int c = b + 1; c < e; ++c) consider({a, b, c});
        }
    }
    return best;
}

// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    std::function<double(double, double, double, double, double, double, int)> rec =
        [&](double lo, double hi, double flo, double fmid, double fhi, double whole, int depth) {
            const double mid = (lo + hi) / 2.0;
            const double lm = (lo + mid) / 2.0;
            const double rm = (mid + hi) / 2.0;
            const double flm = f(lm);
            const double frm = f(rm);
            const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
            const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
            if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
                return left + right + (left + right - whole) / 15.0;
            return rec(lo, mid, flo, flm, fmid, left, depth - 1) + rec(mid, hi, fmid, frm, fhi, right, depth - 1);
        };
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f((a + b) / 2.0);
    return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), 50);
}

inline double gaussian_tail_quadrature(double K) {
    return simpson([](double t) { return std::exp(-t * t / 2.0); }, K, K + 40.0, 1e-13);
}

// Exact two-sided binomial tail by a product recurrence on the pmf.
inline double binomial_tail(int trials, double p, double t) {
    std::vector<long double> pmf(static_cast<std::size_t>(trials) + 1);
    pmf[0] = std::pow(1.0L - p, trials);
    for (int k = 1; k <= trials; ++k)
        pmf[k] = pmf[k - 1] * (trials - k + 1) / k * p / (1.0L - p);
    long double tail = 0.0L;
    const long double mean = static_cast<long double>(trials) * p;
    for (int k = 0; k <= trials; ++k)
        if (std::abs(k - mean) >= t - 1e-9L) tail += pmf[k];
    return static_cast<double>(tail);
}

// Interval sweep written directly from I_m = ((2^19 p^2 n^2 / m)^(1/(2 - delta)),
// sigma / (2^8 p sqrt m)) with 1/2 + gamma = 1/(2 - delta).
struct CoverSweep {
    std::uint64_t m_first = 0;
    std::uint64_t m_last = 0;
    std::uint64_t failures = 0;
    bool covered = false;
    double last_right = 0.0;
};

inline CoverSweep cover_sweep(double n, double p, double gamma, double sigma) {
    const long double delta = 2.0L - 1.0L / (0.5L + gamma);
    auto left = [&](long double m) {
        return std::pow(524288.0L * p * p * n * n / m, 1.0L / (2.0L - delta));
    };
    auto right = [&](long double m) { return sigma / (256.0L * p * std::sqrt(m)); };
    CoverSweep s;
    s.m_first = static_cast<std::uint64_t>(std::floor(4.0 / (p * p))) + 1;
    const double half = n / 2.0;
    s.m_last = static_cast<std::uint64_t>(std::ceil(half)) - 1;
    std::vector<std::pair<long double, long double>> intervals;
    for (std::uint64_t m = s.m_first; m <= s.m_last; ++m) {
        if (m + 1 <= s.m_last && !(left(m) < right(m + 1))) ++s.failures;
        intervals.emplace_back(left(m), right(m));
    }
    s.last_right = static_cast<double>(right(static_cast<long double>(std::floor(half))));
    const long double lo = std::pow(2097152.0L * p * p * n, 0.5L + gamma);
    const long double hi = sigma / 1024.0L;
    if (!(lo < hi)) {
        s.covered = true;
        return s;
    }
    std::sort(intervals.begin(), intervals.end());
    // Open intervals: the point `reach` itself must lie inside the next one,
    // except at the open left end of the target.
    long double reach = lo;
    for (const auto& [a, b] : intervals) {
        if (a >= b) continue;
        const bool joins = reach == lo ? a <= lo : a < reach;
        if (!joins) break;
        reach = std::max(reach, b);
        if (reach >= hi) break;
    }
    s.covered = reach >= hi;
    return s;
}

// E over x_B^0, x_B^1 of |E over x_A^0 of exp(i t alpha / sigma)|, with every
// edge indicator enumerated explicitly.
inline double decoupling_rhs(const std::vector<int>& p1, const std::vector<int>& p2, const std::vector<int>& p3,
                             double p, double t, double sigma) {
    std::vector<Edge> b_pairs;
    for (const auto* side : {&p1, &p2})
        for (int u : *side)
            for (int w : p3) b_pairs.emplace_back(u, w);
    std::vector<Edge> a_pairs;
    for (int u : p1)
        for (int v : p2) a_pairs.emplace_back(u, v);
    const std::size_t nb = b_pairs.size();
    const std::size_t na = a_pairs.size();
    auto weight = [p](int ones, int total) { return std::pow(p, ones) * std::pow(1.0 - p, total - ones); };
    auto index_of = [&](int u, int w) {
        return static_cast<std::size_t>(std::find(b_pairs.begin(), b_pairs.end(), Edge{u, w}) - b_pairs.begin());
    };
    long double total = 0.0L;
    for (std::uint64_t x0 = 0; x0 < (std::uint64_t{1} << nb); ++x0)
        for (std::uint64_t x1 = 0; x1 < (std::uint64_t{1} << nb); ++x1) {
            std::vector<int> alpha_f(na, 0);
            for (std::size_t f = 0; f < na; ++f)
                for (int w : p3) {
                    const std::size_t iu = index_of(a_pairs[f].first, w);
                    const std::size_t iv = index_of(a_pairs[f].second, w);
                    const int du = static_cast<int>((x0 >> iu) & 1U) - static_cast<int>((x1 >> iu) & 1U);
                    const int dv = static_cast<int>((x0 >> iv) & 1U) - static_cast<int>((x1 >> iv) & 1U);
                    alpha_f[f] += du * dv;
                }
            std::complex<double> inner = 0.0;
            for (std::uint64_t xa = 0; xa < (std::uint64_t{1} << na); ++xa) {
                int alpha = 0;
                for (std::size_t f = 0; f < na; ++f)
                    if ((xa >> f) & 1U) alpha += alpha_f[f];
                inner += weight(std::popcount(xa), static_cast<int>(na)) * std::polar(1.0, t * alpha / sigma);
            }
            total += static_cast<long double>(weight(std::popcount(x0), static_cast<int>(nb)) *
                                              weight(std::popcount(x1), static_cast<int>(nb)) * std::abs(inner));
        }
    return static_cast<double>(total);
}

} // namespace oracle
