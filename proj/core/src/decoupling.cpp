#include "lclt/decoupling.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "lclt/charfn.hpp"
#include "lclt/error.hpp"
#include "lclt/inequalities.hpp"
#include "lclt/moments.hpp"
#include "lclt/parallel.hpp"
#include "lclt/rng.hpp"

namespace lclt {
namespace {

constexpr std::uint64_t kPartitionStream = 0x7061727469746e00ULL;
constexpr std::uint64_t kReplicaSalt = 0x5265706c69636100ULL;

std::string fmt(double v) { return std::to_string(v); }

// Sign-split neighbourhoods of one vertex inside P3: `plus` marks w with
// uw in G0 only, `minus` marks w with uw in G1 only.
struct SignedRow {
    std::vector<Word> plus;
    std::vector<Word> minus;
};

std::int32_t signed_overlap(const SignedRow& a, const SignedRow& b) {
    std::int32_t total = 0;
    for (std::size_t k = 0; k < a.plus.size(); ++k) {
        total += std::popcount(a.plus[k] & b.plus[k]) + std::popcount(a.minus[k] & b.minus[k]);
        total -= std::popcount(a.plus[k] & b.minus[k]) + std::popcount(a.minus[k] & b.plus[k]);
    }
    return total;
}

SignedRow signed_row(const GnpSample& g0, const GnpSample& g1, std::uint32_t u, const std::vector<std::uint32_t>& p3) {
    SignedRow row{std::vector<Word>((p3.size() + 63) / 64, 0), std::vector<Word>((p3.size() + 63) / 64, 0)};
    for (std::size_t idx = 0; idx < p3.size(); ++idx) {
        const bool in0 = g0.has_edge(u, p3[idx]);
        const bool in1 = g1.has_edge(u, p3[idx]);
        if (in0 && !in1) row.plus[idx >> 6] |= Word{1} << (idx & 63);
        if (in1 && !in0) row.minus[idx >> 6] |= Word{1} << (idx & 63);
    }
    return row;
}

double window_scale(const AlphaWindow& window, double p, std::size_t m) {
    return window.scale == WindowScale::expected_alpha_sq ? std::sqrt(expected_alpha_sq(p, m))
                                                          : p * std::sqrt(static_cast<double>(m));
}

std::size_t count_in_window(const std::vector<std::int32_t>& alphas, const AlphaWindow& window, double scale) {
    const double lo = window.lower * scale;
    const double hi = window.upper * scale;
    std::size_t count = 0;
    for (const std::int32_t a : alphas) {
        const double v = window.absolute ? std::abs(static_cast<double>(a)) : static_cast<double>(a);
        count += v > lo && v < hi;
    }
    return count;
}

} // namespace

EndowedPartition make_partition(std::size_t n, std::size_t m, std::uint64_t seed) {
    require(m >= 1 && m < n, ErrorKind::invalid_parameter,
            "endowed partition needs 1 <= m < n (m=" + std::to_string(m) + ", n=" + std::to_string(n) + ")");
    require(n <= kMaxVertices, ErrorKind::invalid_parameter, "vertex count exceeds 2^16");
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0U);
    CounterRng rng(seed, kPartitionStream);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);

    const std::size_t s1 = (n - m) / 2;
    const std::size_t s2 = n - m - s1;
    EndowedPartition part;
    part.n = n;
    part.m = m;
    part.part1.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s1));
    part.part2.assign(order.begin() + static_cast<std::ptrdiff_t>(s1),
                      order.begin() + static_cast<std::ptrdiff_t>(s1 + s2));
    part.part3.assign(order.begin() + static_cast<std::ptrdiff_t>(s1 + s2), order.end());
    std::sort(part.part1.begin(), part.part1.end());
    std::sort(part.part2.begin(), part.part2.end());
    std::sort(part.part3.begin(), part.part3.end());
    return part;
}

double expected_alpha_sq(double p, std::size_t m) {
    return 4.0 * p * p * (1.0 - p) * (1.0 - p) * static_cast<double>(m);
}

AlphaProfile compute_alphas(const GnpSample& g0, const GnpSample& g1, const EndowedPartition& part) {
    require(g0.n() == part.n && g1.n() == part.n, ErrorKind::invalid_parameter,
            "graphs and partition disagree on the vertex count");
    std::vector<SignedRow> rows1;
    std::vector<SignedRow> rows2;
    rows1.reserve(part.part1.size());
    rows2.reserve(part.part2.size());
    for (const auto u : part.part1) rows1.push_back(signed_row(g0, g1, u, part.part3));
    for (const auto v : part.part2) rows2.push_back(signed_row(g0, g1, v, part.part3));

    AlphaProfile profile;
    profile.partition = part;
    profile.p = g0.p();
    profile.expected_alpha_sq = expected_alpha_sq(profile.p, part.m);
    profile.alphas.reserve(part.a_size());
    for (const auto& r1 : rows1)
        for (const auto& r2 : rows2) profile.alphas.push_back(signed_overlap(r1, r2));
    profile.a_prime = typical_set(profile, kProofWindow);
    return profile;
}

std::vector<std::size_t> typical_set(const AlphaProfile& profile, const AlphaWindow& window) {
    const double scale = window_scale(window, profile.p, profile.partition.m);
    const double lo = window.lower * scale;
    const double hi = window.upper * scale;
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f < profile.alphas.size(); ++f) {
        const auto a = static_cast<double>(profile.alphas[f]);
        const double v = window.absolute ? std::abs(a) : a;
        if (v > lo && v < hi) out.push_back(f);
    }
    return out;
}

std::int64_t alpha_value(const AlphaProfile& profile, const GnpSample& g0) {
    const auto& part = profile.partition;
    const std::size_t width = part.part2.size();
    std::int64_t total = 0;
    for (std::size_t i = 0; i < part.part1.size(); ++i)
        for (std::size_t j = 0; j < width; ++j)
            if (g0.has_edge(part.part1[i], part.part2[j])) total += profile.alphas[i * width + j];
    return total;
}

double inner_charfn_product(const AlphaProfile& profile, bool restrict_to_a_prime, double p, double t, double sigma) {
    require(sigma > 0.0, ErrorKind::degenerate, "sigma must be positive");
    double product = 1.0;
    auto factor = [&](std::int32_t alpha) {
        return bernoulli_charfn_modulus(p, t * static_cast<double>(alpha) / sigma);
    };
    if (restrict_to_a_prime) {
        for (const std::size_t f : profile.a_prime) product *= factor(profile.alphas[f]);
    } else {
        for (const std::int32_t a : profile.alphas) {
            if (a != 0) product *= factor(a);
            if (product == 0.0) break;
        }
    }
    return product;
}

DecouplingCheck verify_decoupling(std::size_t n, std::size_t m, double p, double t, std::size_t outer_samples,
                                  std::uint64_t seed, std::size_t workers) {
    const EndowedPartition part = make_partition(n, m, seed);
    const Moments mom = moments(n, p);
    const double grid[] = {t};
    const CharFnSeries lhs_series = estimate_charfn(n, p, grid, outer_samples, seed, workers);

    struct Acc {
        double sum = 0.0;
        std::size_t count = 0;
    };
    const std::uint64_t replica_seed = mix64(seed ^ kReplicaSalt);
    const auto batches = run_batches<Acc>(kCharFnBatches, workers, [] { return Acc{}; }, [&](std::size_t b, Acc& acc) {
        const IndexRange range = partition_range(outer_samples, kCharFnBatches, b);
        GnpSample g0, g1;
        for (std::size_t i = range.begin; i < range.end; ++i) {
            sample_gnp_into(g0, n, p, replica_seed, 2 * i);
            sample_gnp_into(g1, n, p, replica_seed, 2 * i + 1);
            acc.sum += inner_charfn_product(compute_alphas(g0, g1, part), false, p, t, mom.sigma);
            ++acc.count;
        }
    });

    DecouplingCheck check;
    check.t = t;
    check.lhs = std::abs(lhs_series.estimates[0]);
    check.lhs_ci = lhs_series.ci_radius[0];
    double total = 0.0;
    for (const auto& b : batches) total += b.sum;
    check.rhs = total / static_cast<double>(outer_samples);
    double spread = 0.0;
    for (const auto& b : batches) {
        if (b.count == 0) continue;
        const double d = b.sum / static_cast<double>(b.count) - check.rhs;
        spread += d * d;
    }
    const auto nb = static_cast<double>(batches.size());
    check.rhs_ci = 1.96 * std::sqrt(spread / (nb * (nb - 1.0)));
    check.margin = check.rhs - std::pow(check.lhs, 4);
    check.combined_ci = check.rhs_ci + 4.0 * std::pow(check.lhs, 3) * check.lhs_ci;
    return check;
}

std::vector<DecouplingCheck> exact_decoupling(const TriangleEdgeTable& table, const EndowedPartition& part, double p,
                                              std::span<const double> t_values) {
    require(table.n() == part.n, ErrorKind::invalid_parameter, "census and partition disagree on n");
    const std::size_t b = part.b_size();
    require(2 * b <= 24, ErrorKind::resource_limit, "exhaustive decoupling limited to 2|B| <= 24");
    const std::size_t m = part.m;
    const std::size_t s1 = part.part1.size();
    const std::size_t s2 = part.part2.size();

    // Group outcomes of x_B^{0,1} by their alpha vector.
    std::map<std::vector<std::int32_t>, long double> law;
    const std::uint64_t outcomes = std::uint64_t{1} << (2 * b);
    std::vector<std::int32_t> alphas(s1 * s2);
    for (std::uint64_t mask = 0; mask < outcomes; ++mask) {
        auto diff = [&](std::size_t u_idx, std::size_t w_idx) {
            const std::size_t bit = u_idx * m + w_idx;
            return static_cast<int>((mask >> bit) & 1U) - static_cast<int>((mask >> (b + bit)) & 1U);
        };
        for (std::size_t i = 0; i < s1; ++i)
            for (std::size_t j = 0; j < s2; ++j) {
                std::int32_t a = 0;
                for (std::size_t w = 0; w < m; ++w) a += diff(i, w) * diff(s1 + j, w);
                alphas[i * s2 + j] = a;
            }
        const int ones = std::popcount(mask);
        const long double weight = std::pow(static_cast<long double>(p), ones) *
                                   std::pow(static_cast<long double>(1.0 - p), static_cast<int>(2 * b) - ones);
        law[alphas] += weight;
    }

    const Moments mom = moments(part.n, p);
    const auto pmf = exact_pmf(table, p);
    std::vector<DecouplingCheck> out;
    for (const double t : t_values) {
        DecouplingCheck c;
        c.t = t;
        c.lhs = std::abs(charfn_from_pmf(pmf, t / mom.sigma));
        long double rhs = 0.0L;
        for (const auto& [vec, weight] : law) {
            double product = 1.0;
            for (const std::int32_t a : vec) product *= bernoulli_charfn_modulus(p, t * a / mom.sigma);
            rhs += weight * product;
        }
        c.rhs = static_cast<double>(rhs);
        c.margin = c.rhs - std::pow(c.lhs, 4);
        out.push_back(c);
    }
    return out;
}

TypicalAlphaReport typical_alpha_trial(std::size_t n, std::size_t m, double p, std::size_t trials, std::uint64_t seed,
                                       std::size_t workers) {
    require(p > 0.0 && p < 1.0, ErrorKind::invalid_parameter, "p must lie in (0, 1)");
    require(trials >= 1, ErrorKind::invalid_parameter, "need at least one trial");
    const double floor_m = 1.0 / (p * p * (1.0 - p) * (1.0 - p));
    require(static_cast<double>(m) >= floor_m, ErrorKind::domain,
            "m = " + std::to_string(m) + " is below p^-2 (1-p)^-2 = " + fmt(floor_m));
    require(2 * m <= n, ErrorKind::domain, "m = " + std::to_string(m) + " exceeds n/2");

    const EndowedPartition part = make_partition(n, m, seed);
    const double threshold = static_cast<double>(part.a_size()) / 128.0;
    const double lemma_scale = window_scale(kLemmaWindow, p, m);
    const double proof_scale = window_scale(kProofWindow, p, m);

    struct Acc {
        std::vector<TypicalAlphaRow> rows;
        long double alpha_sq = 0.0L;
        std::vector<double> first_trial;
    };
    const std::size_t batches = std::min<std::size_t>(trials, 32);
    const auto accs = run_batches<Acc>(batches, workers, [] { return Acc{}; }, [&](std::size_t bi, Acc& acc) {
        const IndexRange range = partition_range(trials, batches, bi);
        GnpSample g0, g1;
        for (std::size_t i = range.begin; i < range.end; ++i) {
            sample_gnp_into(g0, n, p, seed, 2 * i);
            sample_gnp_into(g1, n, p, seed, 2 * i + 1);
            const AlphaProfile profile = compute_alphas(g0, g1, part);
            acc.rows.push_back({i, count_in_window(profile.alphas, kLemmaWindow, lemma_scale),
                                count_in_window(profile.alphas, kProofWindow, proof_scale)});
            for (const std::int32_t a : profile.alphas) acc.alpha_sq += static_cast<long double>(a) * a;
            if (i == 0)
                for (const std::int32_t a : profile.alphas) acc.first_trial.push_back(static_cast<double>(a) * a);
        }
    });

    TypicalAlphaReport report;
    report.n = n;
    report.m = m;
    report.p = p;
    report.trials = trials;
    report.a_size = part.a_size();
    report.threshold = threshold;
    report.expected_alpha_sq = expected_alpha_sq(p, m);
    long double alpha_sq = 0.0L;
    std::size_t pass_lemma = 0;
    std::size_t pass_proof = 0;
    for (const auto& acc : accs) {
        alpha_sq += acc.alpha_sq;
        for (const auto& row : acc.rows) {
            pass_lemma += static_cast<double>(row.a_prime_lemma) >= threshold;
            pass_proof += static_cast<double>(row.a_prime_proof) >= threshold;
            report.rows.push_back(row);
        }
        if (!acc.first_trial.empty()) report.alpha_sq_sample = acc.first_trial;
    }
    report.mean_alpha_sq = static_cast<double>(alpha_sq / static_cast<long double>(trials * report.a_size));
    report.freq_lemma = static_cast<double>(pass_lemma) / static_cast<double>(trials);
    report.freq_proof = static_cast<double>(pass_proof) / static_cast<double>(trials);
    return report;
}

SingleVertexReport single_vertex_trial(std::size_t n, double p, std::size_t trials, std::uint64_t seed,
                                       std::size_t workers) {
    require(p > 0.0, ErrorKind::invalid_parameter, "p must be positive");
    require(p < 0.5, ErrorKind::domain, "single-vertex bound needs p < 1/2");
    require(trials >= 1, ErrorKind::invalid_parameter, "need at least one trial");
    const EndowedPartition part = make_partition(n, 1, seed);
    const std::uint32_t w = part.part3.front();
    const auto dn = static_cast<double>(n);

    struct Acc {
        std::vector<SingleVertexRow> rows;
    };
    const std::size_t batches = std::min<std::size_t>(trials, 32);
    const auto accs = run_batches<Acc>(batches, workers, [] { return Acc{}; }, [&](std::size_t bi, Acc& acc) {
        const IndexRange range = partition_range(trials, batches, bi);
        GnpSample g0, g1;
        for (std::size_t i = range.begin; i < range.end; ++i) {
            sample_gnp_into(g0, n, p, seed, 2 * i);
            sample_gnp_into(g1, n, p, seed, 2 * i + 1);
            std::size_t sym = 0;
            const auto r0 = g0.row(w);
            const auto r1 = g1.row(w);
            for (std::size_t k = 0; k < r0.size(); ++k) sym += static_cast<std::size_t>(std::popcount(r0[k] ^ r1[k]));
            const AlphaProfile profile = compute_alphas(g0, g1, part);
            std::size_t unit = 0;
            for (const std::int32_t a : profile.alphas) unit += a == 1 || a == -1;
            acc.rows.push_back({i, sym, unit});
        }
    });

    SingleVertexReport report;
    report.n = n;
    report.p = p;
    report.trials = trials;
    report.a_size = part.a_size();
    report.threshold = (p * dn) * (p * dn) / 16.0;
    report.probability_bound = 1.0 - std::exp(-p * dn / 16.0);
    const double q = 2.0 * p * (1.0 - p);
    report.sym_diff_expected = (dn - 1.0) * q;

    std::vector<std::size_t> histogram(n, 0);
    std::size_t passes = 0;
    long double sum = 0.0L;
    long double sum_sq = 0.0L;
    for (const auto& acc : accs)
        for (const auto& row : acc.rows) {
            report.rows.push_back(row);
            passes += static_cast<double>(row.a_prime) >= report.threshold;
            sum += row.sym_diff;
            sum_sq += static_cast<long double>(row.sym_diff) * row.sym_diff;
            ++histogram[row.sym_diff];
        }
    const auto dt = static_cast<long double>(trials);
    report.frequency = static_cast<double>(passes) / static_cast<double>(trials);
    report.sym_diff_mean = static_cast<double>(sum / dt);
    const long double var = trials > 1 ? (sum_sq - sum * sum / dt) / (dt - 1.0L) : 0.0L;
    report.sym_diff_stderr = static_cast<double>(std::sqrt(std::max(0.0L, var) / dt));

    double tv = 0.0;
    const double trials_d = static_cast<double>(trials);
    for (std::size_t k = 0; k < n; ++k) {
        const double log_pmf = std::lgamma(dn) - std::lgamma(static_cast<double>(k) + 1.0) -
                               std::lgamma(dn - static_cast<double>(k)) + static_cast<double>(k) * std::log(q) +
                               (dn - 1.0 - static_cast<double>(k)) * std::log1p(-q);
        tv += std::abs(static_cast<double>(histogram[k]) / trials_d - std::exp(log_pmf));
    }
    report.sym_diff_tv = tv / 2.0;
    return report;
}

} // namespace lclt
