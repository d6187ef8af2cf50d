#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lclt/exact_oracle.hpp"
#include "lclt/graph.hpp"

namespace lclt {

/// Vertex partition P1 | P2 | P3 with |P1| = floor((n-m)/2), |P2| = ceil((n-m)/2),
/// |P3| = m. The cross pairs A = P1 x P2 and B = (P1 u P2) x P3 stay implicit.
struct EndowedPartition {
    std::size_t n = 0;
    std::size_t m = 0;
    std::vector<std::uint32_t> part1;
    std::vector<std::uint32_t> part2;
    std::vector<std::uint32_t> part3;

    std::size_t a_size() const noexcept { return part1.size() * part2.size(); }
    std::size_t b_size() const noexcept { return (part1.size() + part2.size()) * part3.size(); }
};

/// Seeded uniformly random m-endowed partition; each part is sorted.
EndowedPartition make_partition(std::size_t n, std::size_t m, std::uint64_t seed);

/// Which scale a typical-set window is measured against.
enum class WindowScale {
    expected_alpha_sq, // sqrt(E alpha_f^2) = sqrt(4 p^2 (1-p)^2 m)
    p_sqrt_m,          // sqrt(p^2 m)
};

/// Typical set A' = {f : value(f) in (lower * scale, upper * scale)} where
/// value(f) is alpha_f, or |alpha_f| when `absolute` is set.
struct AlphaWindow {
    double lower = 0.5;
    double upper = 16.0;
    WindowScale scale = WindowScale::p_sqrt_m;
    bool absolute = true;
};

/// The window as stated for the typical-alpha lemma: signed alpha_f, scale
/// sqrt(E alpha_f^2), upper factor 2^3.
inline constexpr AlphaWindow kLemmaWindow{0.5, 8.0, WindowScale::expected_alpha_sq, false};
/// The window used inside the mid-regime argument: |alpha_f|, scale
/// sqrt(p^2 m), upper factor 2^4. This is the default.
inline constexpr AlphaWindow kProofWindow{0.5, 16.0, WindowScale::p_sqrt_m, true};

struct AlphaProfile {
    EndowedPartition partition;
    double p = 0.0;
    /// alpha_f for f = (part1[i], part2[j]) at index i * |P2| + j.
    std::vector<std::int32_t> alphas;
    /// Indices into `alphas` inside the default (kProofWindow) typical set.
    std::vector<std::size_t> a_prime;
    double expected_alpha_sq = 0.0; // 4 p^2 (1-p)^2 m
};

double expected_alpha_sq(double p, std::size_t m);

/// alpha_{uv} = sum over w in P3 of (x0_uw - x1_uw)(x0_vw - x1_vw), reading
/// only the B edges of both graphs.
AlphaProfile compute_alphas(const GnpSample& g0, const GnpSample& g1, const EndowedPartition& part);

std::vector<std::size_t> typical_set(const AlphaProfile& profile, const AlphaWindow& window);

/// alpha = sum over f in A of alpha_f x0_f.
std::int64_t alpha_value(const AlphaProfile& profile, const GnpSample& g0);

/// |prod_f (1 - p + p exp(i t alpha_f / sigma))| over A, or over A' when
/// `restrict_to_a_prime` is set. Equals |E_{x_A^0} exp(i t alpha / sigma)|
/// given the B edges.
double inner_charfn_product(const AlphaProfile& profile, bool restrict_to_a_prime, double p, double t, double sigma);

struct DecouplingCheck {
    double t = 0.0;
    double lhs = 0.0;     // |E exp(i t X / sigma)|
    double lhs_ci = 0.0;
    double rhs = 0.0;     // E_{x_B} |E_{x_A^0} exp(i t alpha / sigma)|
    double rhs_ci = 0.0;
    double margin = 0.0;  // rhs - lhs^4
    double combined_ci = 0.0;
};

/// Monte Carlo check of |E e^{itX/sigma}|^4 <= E_{x_B^{0,1}} |E_{x_A^0} e^{it alpha/sigma}|.
DecouplingCheck verify_decoupling(std::size_t n, std::size_t m, double p, double t, std::size_t outer_samples,
                                  std::uint64_t seed, std::size_t workers = 1);

/// Both sides by full enumeration: the left side from the census, the right
/// side over all 2^(2|B|) outcomes of the B edges in both graphs.
std::vector<DecouplingCheck> exact_decoupling(const TriangleEdgeTable& table, const EndowedPartition& part, double p,
                                              std::span<const double> t_values);

struct TypicalAlphaRow {
    std::size_t trial = 0;
    std::size_t a_prime_lemma = 0; // |A'| under kLemmaWindow
    std::size_t a_prime_proof = 0; // |A'| under kProofWindow
};

struct TypicalAlphaReport {
    std::size_t n = 0;
    std::size_t m = 0;
    double p = 0.0;
    std::size_t trials = 0;
    std::size_t a_size = 0;
    double threshold = 0.0; // |A| / 2^7
    double expected_alpha_sq = 0.0;
    double mean_alpha_sq = 0.0; // empirical, over all f and trials
    double freq_lemma = 0.0;
    double freq_proof = 0.0;
    std::vector<TypicalAlphaRow> rows;
    std::vector<double> alpha_sq_sample; // alpha_f^2 for every f of the first trial
};

TypicalAlphaReport typical_alpha_trial(std::size_t n, std::size_t m, double p, std::size_t trials, std::uint64_t seed,
                                       std::size_t workers = 1);

struct SingleVertexRow {
    std::size_t trial = 0;
    std::size_t sym_diff = 0; // |N_G0(w) xor N_G1(w)|
    std::size_t a_prime = 0;  // #{f in A : |alpha_f| = 1}
};

struct SingleVertexReport {
    std::size_t n = 0;
    double p = 0.0;
    std::size_t trials = 0;
    std::size_t a_size = 0;
    double threshold = 0.0;       // (p n)^2 / 2^4
    double probability_bound = 0.0; // 1 - exp(-p n / 2^4)
    double frequency = 0.0;
    double sym_diff_mean = 0.0;
    double sym_diff_expected = 0.0; // (n-1) 2p(1-p)
    double sym_diff_stderr = 0.0;
    double sym_diff_tv = 0.0;     // TV distance to Bin(n-1, 2p(1-p))
    std::vector<SingleVertexRow> rows;
};

SingleVertexReport single_vertex_trial(std::size_t n, double p, std::size_t trials, std::uint64_t seed,
                                       std::size_t workers = 1);

} // namespace lclt
