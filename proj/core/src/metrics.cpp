#include "lclt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <nlohmann/json.hpp>

#include "lclt/error.hpp"
#include "lclt/monte_carlo.hpp"

namespace lclt {
namespace {

constexpr double kWindow = 10.0;

std::int64_t max_triangles(std::size_t n) {
    const auto v = static_cast<std::int64_t>(n);
    return n < 3 ? 0 : v * (v - 1) * (v - 2) / 6;
}

struct Range {
    std::int64_t lo = 0;
    std::int64_t hi = -1;
};

// Integers k with |k - mu| <= 10 sigma.
Range gaussian_window(const Moments& m) {
    return {static_cast<std::int64_t>(std::ceil(m.mu - kWindow * m.sigma)),
            static_cast<std::int64_t>(std::floor(m.mu + kWindow * m.sigma))};
}

void require_coverage(const Pmf& pmf, const Moments& m) {
    require(m.sigma > 0.0, ErrorKind::degenerate, "distance needs sigma > 0");
    const Range w = gaussian_window(m);
    const std::int64_t lo = std::max<std::int64_t>(w.lo, 0);
    const std::int64_t hi = std::min(w.hi, max_triangles(pmf.n));
    if (lo > hi) return;
    require(pmf.cover_lo <= lo && pmf.cover_hi >= hi, ErrorKind::coverage,
            "pmf covers [" + std::to_string(pmf.cover_lo) + ", " + std::to_string(pmf.cover_hi) +
                "] but |x| <= 10 needs [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

Range evaluation_range(const Pmf& pmf, const Moments& m) {
    const Range w = gaussian_window(m);
    if (pmf.probs.empty()) return w;
    return {std::min(w.lo, pmf.k_lo), std::max(w.hi, pmf.k_hi())};
}

} // namespace

std::string to_string(PmfSource source) {
    switch (source) {
    case PmfSource::exact_oracle: return "exact-oracle";
    case PmfSource::monte_carlo: return "monte-carlo";
    case PmfSource::inversion: return "inversion";
    }
    return "unknown";
}

double Pmf::at(std::int64_t k) const noexcept {
    if (k < k_lo || k > k_hi()) return 0.0;
    return probs[static_cast<std::size_t>(k - k_lo)];
}

double Pmf::total() const noexcept {
    long double sum = 0.0L;
    for (const double v : probs) sum += v;
    return static_cast<double>(sum);
}

Pmf pmf_from_table(const TriangleEdgeTable& table, double p) {
    Pmf pmf;
    pmf.n = table.n();
    pmf.p = p;
    pmf.probs = exact_pmf(table, p);
    pmf.source = PmfSource::exact_oracle;
    pmf.cover_hi = max_triangles(table.n());
    return pmf;
}

Pmf invert_charfn(const CharFn& charfn, std::size_t n, double p, std::int64_t k_lo, std::int64_t k_hi,
                  const InversionControl& control) {
    require(k_lo >= 0 && k_lo <= k_hi && k_hi <= max_triangles(n), ErrorKind::invalid_parameter,
            "inversion range must lie inside [0, C(n,3)]");
    require(control.initial_panels >= 2 && control.max_panels >= control.initial_panels, ErrorKind::invalid_parameter,
            "bad panel limits");
    const auto width = static_cast<std::size_t>(k_hi - k_lo + 1);

    auto rule = [&](std::size_t panels) {
        std::vector<double> out(width, 0.0);
        const double step = 2.0 * std::numbers::pi / static_cast<double>(panels);
        for (std::size_t j = 0; j < panels; ++j) {
            const double theta = -std::numbers::pi + step * static_cast<double>(j);
            const std::complex<double> phi = charfn(theta);
            for (std::size_t i = 0; i < width; ++i) {
                const double angle = -theta * static_cast<double>(k_lo + static_cast<std::int64_t>(i));
                out[i] += phi.real() * std::cos(angle) - phi.imag() * std::sin(angle);
            }
        }
        for (double& v : out) v /= static_cast<double>(panels);
        return out;
    };

    std::size_t panels = control.initial_panels;
    std::vector<double> previous = rule(panels);
    double change = 0.0;
    while (true) {
        if (panels * 2 > control.max_panels)
            fail(ErrorKind::numeric, "inversion did not converge: " + std::to_string(panels) +
                                         " panels, last change " + std::to_string(change));
        panels *= 2;
        std::vector<double> next = rule(panels);
        change = 0.0;
        for (std::size_t i = 0; i < width; ++i) change = std::max(change, std::abs(next[i] - previous[i]));
        previous = std::move(next);
        if (change <= control.tolerance) break;
    }

    Pmf pmf;
    pmf.n = n;
    pmf.p = p;
    pmf.k_lo = k_lo;
    pmf.source = PmfSource::inversion;
    pmf.cover_lo = k_lo;
    pmf.cover_hi = k_hi;
    pmf.probs = std::move(previous);
    for (double& v : pmf.probs) {
        if (v < 0.0) {
            pmf.clipped += -v;
            v = 0.0;
        }
    }
    return pmf;
}

Pmf mc_pmf(std::size_t n, double p, std::size_t num_samples, std::uint64_t seed, std::size_t workers) {
    require(num_samples >= 10000, ErrorKind::invalid_parameter, "mc_pmf needs at least 10^4 samples");
    const Moments m = moments(n, p);
    const std::int64_t top = max_triangles(n);
    const std::int64_t lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(m.mu - 8.0 * m.sigma)));
    const std::int64_t hi = std::min(top, static_cast<std::int64_t>(std::ceil(m.mu + 8.0 * m.sigma)));
    const auto width = static_cast<std::size_t>(hi - lo + 1);

    struct Acc {
        std::vector<std::uint64_t> dense;
        std::map<std::int64_t, std::uint64_t> overflow;
    };
    SamplingPlan plan{n, p, seed, num_samples, kPmfBatches, workers, 0};
    const auto accs = sample_triangle_counts<Acc>(
        plan, [&] { return Acc{std::vector<std::uint64_t>(width, 0), {}}; },
        [&](Acc& acc, std::uint64_t k) {
            const auto v = static_cast<std::int64_t>(k);
            if (v >= lo && v <= hi)
                ++acc.dense[static_cast<std::size_t>(v - lo)];
            else
                ++acc.overflow[v];
        });

    std::int64_t first = lo;
    std::int64_t last = hi;
    for (const auto& acc : accs)
        if (!acc.overflow.empty()) {
            first = std::min(first, acc.overflow.begin()->first);
            last = std::max(last, acc.overflow.rbegin()->first);
        }
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(last - first + 1), 0);
    for (const auto& acc : accs) {
        for (std::size_t i = 0; i < width; ++i) counts[static_cast<std::size_t>(lo - first) + i] += acc.dense[i];
        for (const auto& [k, c] : acc.overflow) counts[static_cast<std::size_t>(k - first)] += c;
    }

    Pmf pmf;
    pmf.n = n;
    pmf.p = p;
    pmf.k_lo = first;
    pmf.source = PmfSource::monte_carlo;
    pmf.samples = num_samples;
    pmf.cover_lo = 0;
    pmf.cover_hi = top;
    const auto total = static_cast<double>(num_samples);
    pmf.probs.reserve(counts.size());
    pmf.ci.reserve(counts.size());
    for (const std::uint64_t c : counts) {
        const double q = static_cast<double>(c) / total;
        pmf.probs.push_back(q);
        pmf.ci.push_back(std::max(1.96 * std::sqrt(q * (1.0 - q) / total), 1.0 / total));
    }
    return pmf;
}

double total_variation(const Pmf& a, const Pmf& b) {
    const std::int64_t lo = std::min(a.k_lo, b.k_lo);
    const std::int64_t hi = std::max(a.k_hi(), b.k_hi());
    long double sum = 0.0L;
    for (std::int64_t k = lo; k <= hi; ++k) sum += std::abs(a.at(k) - b.at(k));
    return static_cast<double>(sum / 2.0L);
}

double aggregate_ci(const Pmf& pmf) {
    long double sum = 0.0L;
    for (const double c : pmf.ci) sum += c;
    return static_cast<double>(sum / 2.0L);
}

double normal_density(double x) { return std::exp(-x * x / 2.0) / std::sqrt(2.0 * std::numbers::pi); }

double sup_lattice_distance(const Pmf& pmf, const Moments& m) {
    require_coverage(pmf, m);
    const Range r = evaluation_range(pmf, m);
    double best = 0.0;
    for (std::int64_t k = r.lo; k <= r.hi; ++k) {
        const double x = (static_cast<double>(k) - m.mu) / m.sigma;
        best = std::max(best, std::abs(normal_density(x) - m.sigma * pmf.at(k)));
    }
    return best;
}

double sup_lattice_ci(const Pmf& pmf, const Moments& m) {
    if (pmf.ci.empty()) return 0.0;
    const Range w = gaussian_window(m);
    double worst = 0.0;
    for (std::size_t i = 0; i < pmf.ci.size(); ++i) {
        const std::int64_t k = pmf.k_lo + static_cast<std::int64_t>(i);
        if (k >= w.lo && k <= w.hi) worst = std::max(worst, pmf.ci[i]);
    }
    return m.sigma * worst;
}

L1Distance l1_distance(const Pmf& pmf, const Moments& m) {
    require_coverage(pmf, m);
    Range r = evaluation_range(pmf, m);
    r.lo = std::max<std::int64_t>(r.lo, 0);
    L1Distance out;
    long double sum = 0.0L;
    for (std::int64_t k = r.lo; k <= r.hi; ++k) {
        const double density = normal_density((static_cast<double>(k) - m.mu) / m.sigma) / m.sigma;
        sum += std::abs(density - pmf.at(k));
    }
    // Continuity-corrected Gaussian mass on {0, ..., lo - 1} and {hi + 1, ...}.
    const double s = m.sigma * std::numbers::sqrt2;
    double outside = 0.5 * std::erfc((m.mu - (static_cast<double>(r.hi) + 0.5)) / -s);
    if (r.lo > 0)
        outside += 0.5 * (std::erfc((m.mu - (static_cast<double>(r.lo) - 0.5)) / s) -
                          std::erfc((m.mu + 0.5) / s));
    out.outside_mass = std::max(0.0, outside);
    out.value = static_cast<double>(sum) + out.outside_mass;
    return out;
}

double anticoncentration_stat(const Pmf& pmf, const Moments& m) {
    double peak = 0.0;
    for (const double v : pmf.probs) peak = std::max(peak, v);
    return m.sigma * peak;
}

double predicted_distance_bound(std::size_t n, double p, double epsilon) {
    return std::pow(static_cast<double>(n), -0.5 + epsilon) * std::sqrt(p);
}

DistanceReport distance_report(const Pmf& pmf, double epsilon) {
    require(epsilon > 0.0 && epsilon < 1.0, ErrorKind::invalid_parameter, "epsilon must lie in (0, 1)");
    const Moments m = moments(pmf.n, pmf.p);
    DistanceReport r;
    r.n = pmf.n;
    r.p = pmf.p;
    r.epsilon = epsilon;
    r.sup_lattice = sup_lattice_distance(pmf, m);
    r.l1 = l1_distance(pmf, m).value;
    r.anticoncentration = anticoncentration_stat(pmf, m);
    r.predicted_bound = predicted_distance_bound(pmf.n, pmf.p, epsilon);
    r.source = to_string(pmf.source);
    r.samples = pmf.samples;
    return r;
}

std::string to_json(const DistanceReport& report) {
    nlohmann::ordered_json j;
    j["n"] = report.n;
    j["p"] = report.p;
    j["epsilon"] = report.epsilon;
    j["sup_lattice"] = report.sup_lattice;
    j["l1"] = report.l1;
    j["anticoncentration"] = report.anticoncentration;
    j["predicted_bound"] = report.predicted_bound;
    j["source"] = report.source;
    j["samples"] = report.samples;
    return j.dump(2);
}

} // namespace lclt
