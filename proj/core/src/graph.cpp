#include "lclt/graph.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <string>
#include <vector>

#if defined(__AVX512F__) && defined(__AVX512DQ__)
#include <immintrin.h>
#define LCLT_AVX512_MIX 1
#endif
#if defined(__AVX512F__) && defined(__AVX512VPOPCNTDQ__)
#define LCLT_AVX512_POPCNT 1
#endif

#include "lclt/error.hpp"
#include "lclt/rng.hpp"

namespace lclt {
namespace {

// Bits strictly above position `bit` within a word.
constexpr Word above(std::size_t bit) noexcept { return bit >= 63 ? 0 : (~Word{0} << (bit + 1)); }

// In-place transpose of a 64x64 bit block; bit c of a[r] is entry (r, c).
void transpose64(std::array<Word, 64>& a) noexcept {
    Word m = 0x00000000FFFFFFFFULL;
    for (std::size_t j = 32; j != 0; j >>= 1, m ^= m << j) {
        for (std::size_t k = 0; k < 64; k = ((k | j) + 1) & ~j) {
            const Word t = ((a[k] >> j) ^ a[k | j]) & m;
            a[k | j] ^= t;
            a[k] ^= t << j;
        }
    }
}

void validate(std::size_t n, double p) {
    require(n >= 1, ErrorKind::invalid_parameter, "vertex count must be at least 1");
    require(n <= kMaxVertices, ErrorKind::invalid_parameter,
            "vertex count " + std::to_string(n) + " exceeds 2^16");
    require(std::isfinite(p) && p >= 0.0 && p <= 1.0, ErrorKind::invalid_parameter,
            "edge probability must lie in [0, 1]");
}

} // namespace

BernoulliWords::BernoulliWords(double p) noexcept {
    if (p >= 1.0) {
        all_ones_ = true;
    } else if (p > 0.0) {
        threshold_ = static_cast<std::uint64_t>(std::ldexp(p, 64));
    }
}

std::uint64_t BernoulliWords::word(const CounterRng& rng, std::uint64_t index) const noexcept {
    if (all_ones_) return ~Word{0};
    Word result = 0;
    Word undecided = ~Word{0};
    for (int plane = 0; plane < 64 && undecided != 0; ++plane) {
        const Word r = rng.at(index * 64 + static_cast<std::uint64_t>(plane) + 1);
        if ((threshold_ >> (63 - plane)) & 1U) {
            result |= undecided & ~r;
            undecided &= r;
        } else {
            undecided &= ~r;
        }
        if (plane < 63 && (threshold_ << (plane + 1)) == 0) break;
    }
    return result;
}

#ifdef LCLT_AVX512_MIX
namespace {

__m512i mix64x8(__m512i z) noexcept {
    z = _mm512_mullo_epi64(_mm512_xor_si512(z, _mm512_srli_epi64(z, 30)), _mm512_set1_epi64(0xbf58476d1ce4e5b9LL));
    z = _mm512_mullo_epi64(_mm512_xor_si512(z, _mm512_srli_epi64(z, 27)),
                           _mm512_set1_epi64(static_cast<long long>(0x94d049bb133111ebULL)));
    return _mm512_xor_si512(z, _mm512_srli_epi64(z, 31));
}

} // namespace
#endif

void BernoulliWords::fill(const CounterRng& rng, std::uint64_t first_index, std::uint64_t* out,
                          std::size_t count) const noexcept {
    std::size_t j = 0;
#ifdef LCLT_AVX512_MIX
    if (!all_ones_) {
        const __m512i key = _mm512_set1_epi64(static_cast<long long>(rng.key()));
        const __m512i golden = _mm512_set1_epi64(static_cast<long long>(CounterRng::golden));
        const __m512i lanes = _mm512_setr_epi64(0, 1, 2, 3, 4, 5, 6, 7);
        for (; j + 8 <= count; j += 8) {
            const __m512i base = _mm512_slli_epi64(
                _mm512_add_epi64(_mm512_set1_epi64(static_cast<long long>(first_index + j)), lanes), 6);
            __m512i result = _mm512_setzero_si512();
            __m512i undecided = _mm512_set1_epi64(-1);
            for (int plane = 0; plane < 64; ++plane) {
                const __m512i pos = _mm512_add_epi64(base, _mm512_set1_epi64(plane + 1));
                const __m512i r = mix64x8(_mm512_add_epi64(key, _mm512_mullo_epi64(pos, golden)));
                if ((threshold_ >> (63 - plane)) & 1U) {
                    result = _mm512_or_si512(result, _mm512_andnot_si512(r, undecided));
                    undecided = _mm512_and_si512(undecided, r);
                } else {
                    undecided = _mm512_andnot_si512(r, undecided);
                }
                if (_mm512_test_epi64_mask(undecided, undecided) == 0) break;
                if (plane < 63 && (threshold_ << (plane + 1)) == 0) break;
            }
            _mm512_storeu_si512(out + j, result);
        }
    }
#endif
    for (; j < count; ++j) out[j] = word(rng, first_index + j);
}

std::size_t GnpSample::degree(std::size_t u) const noexcept {
    std::size_t d = 0;
    for (const Word w : row(u)) d += static_cast<std::size_t>(std::popcount(w));
    return d;
}

std::size_t GnpSample::edge_count() const noexcept {
    std::size_t total = 0;
    for (const Word w : bits_) total += static_cast<std::size_t>(std::popcount(w));
    return total / 2;
}

void GnpSample::reset(std::size_t n, double p, std::uint64_t seed, std::uint64_t stream_id) {
    n_ = n;
    words_ = (n + 63) / 64;
    p_ = p;
    seed_ = seed;
    stream_id_ = stream_id;
    bits_.assign(n_ * words_, 0);
}

GnpSample GnpSample::from_edges(std::size_t n, std::span<const std::pair<std::size_t, std::size_t>> edges) {
    validate(n, 0.0);
    GnpSample g;
    g.reset(n, 0.0, 0, 0);
    for (const auto& [u, v] : edges) {
        require(u < n && v < n && u != v, ErrorKind::invalid_parameter, "edge endpoints out of range");
        g.bits_[u * g.words_ + (v >> 6)] |= Word{1} << (v & 63);
        g.bits_[v * g.words_ + (u >> 6)] |= Word{1} << (u & 63);
    }
    return g;
}

void GnpSample::mirror_upper_triangle() noexcept {
    std::array<Word, 64> block{};
    for (std::size_t bi = 0; bi < words_; ++bi) {
        for (std::size_t bj = bi; bj < words_; ++bj) {
            for (std::size_t r = 0; r < 64; ++r) {
                const std::size_t u = bi * 64 + r;
                block[r] = u < n_ ? bits_[u * words_ + bj] : 0;
            }
            transpose64(block);
            for (std::size_t r = 0; r < 64; ++r) {
                const std::size_t v = bj * 64 + r;
                if (v < n_) bits_[v * words_ + bi] |= block[r];
            }
        }
    }
}

void sample_gnp_into(GnpSample& out, std::size_t n, double p, std::uint64_t seed, std::uint64_t stream_id) {
    validate(n, p);
    out.reset(n, p, seed, stream_id);
    CounterRng rng(seed, stream_id);

    if (p > 0.0 && p < kSparseThreshold) {
        const double log_q = std::log1p(-p);
        for (std::size_t u = 0; u + 1 < n; ++u) {
            Word* row = out.mutable_row(u);
            double v = static_cast<double>(u);
            while (true) {
                const double skip = std::floor(std::log(1.0 - rng.uniform()) / log_q);
                v += 1.0 + skip;
                if (v >= static_cast<double>(n)) break;
                const auto col = static_cast<std::size_t>(v);
                row[col >> 6] |= Word{1} << (col & 63);
            }
        }
    } else if (p > 0.0) {
        // Upper-triangle words in row order; word i of that sequence is
        // BernoulliWords index i.
        const BernoulliWords bernoulli(p);
        const std::size_t words = out.words_;
        std::size_t total = 0;
        for (std::size_t u = 0; u + 1 < n; ++u) total += words - (u >> 6);
        thread_local std::vector<Word> flat;
        flat.resize(total);
        bernoulli.fill(rng, 0, flat.data(), total);
        const std::size_t tail_bits = n & 63;
        const Word last_mask = tail_bits == 0 ? ~Word{0} : (Word{1} << tail_bits) - 1;
        const Word* src = flat.data();
        for (std::size_t u = 0; u + 1 < n; ++u) {
            Word* row = out.mutable_row(u);
            const std::size_t first = u >> 6;
            for (std::size_t k = first; k < words; ++k) row[k] = *src++;
            row[first] &= above(u & 63);
            row[words - 1] &= last_mask;
        }
    }
    out.mirror_upper_triangle();
}

GnpSample sample_gnp(std::size_t n, double p, std::uint64_t seed, std::uint64_t stream_id) {
    GnpSample g;
    sample_gnp_into(g, n, p, seed, stream_id);
    return g;
}

std::uint64_t count_triangles_naive(const GnpSample& g) {
    const std::size_t n = g.n();
    std::uint64_t count = 0;
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v) {
            if (!g.has_edge(u, v)) continue;
            for (std::size_t w = v + 1; w < n; ++w)
                if (g.has_edge(u, w) && g.has_edge(v, w)) ++count;
        }
    return count;
}

std::uint64_t count_triangles(const GnpSample& g) {
    const std::size_t n = g.n();
    const std::size_t words = g.words_per_row();
#ifdef LCLT_AVX512_POPCNT
    // Forward rows U_u = N(u) restricted to w > u, padded to 512-bit chunks.
    // Each triangle u < v < w is counted once as |U_u & U_v| over edges uv.
    const std::size_t chunks = (words + 7) / 8;
    const std::size_t stride = chunks * 8;
    thread_local std::vector<Word> upper;
    thread_local std::vector<std::uint32_t> nbrs;
    upper.assign(n * stride, 0);
    nbrs.resize(n);
    std::uint32_t* const adj = nbrs.data();
    for (std::size_t u = 0; u < n; ++u) {
        const Word* r = g.row(u).data();
        Word* o = upper.data() + u * stride;
        const std::size_t k0 = u >> 6;
        o[k0] = r[k0] & above(u & 63);
        for (std::size_t k = k0 + 1; k < words; ++k) o[k] = r[k];
    }
    __m512i acc0 = _mm512_setzero_si512();
    __m512i acc1 = _mm512_setzero_si512();
    const Word* base = upper.data();
    for (std::size_t u = 0; u < n; ++u) {
        const Word* ru = base + u * stride;
        std::size_t degree = 0;
        for (std::size_t k = u >> 6; k < words; ++k)
            for (Word nb = ru[k]; nb != 0; nb &= nb - 1)
                adj[degree++] = static_cast<std::uint32_t>(k * 64 + static_cast<std::size_t>(std::countr_zero(nb)));
        for (std::size_t c = u >> 9; c < chunks; ++c) {
            // Only neighbours v < 512 (c + 1) have bits in chunk c.
            const std::size_t end =
                c + 1 == chunks ? degree
                                : static_cast<std::size_t>(std::upper_bound(adj, adj + degree,
                                                                            static_cast<std::uint32_t>(512 * (c + 1) - 1)) -
                                                           adj);
            const __m512i zu = _mm512_loadu_si512(ru + 8 * c);
            std::size_t i = 0;
            for (; i + 1 < end; i += 2) {
                const __m512i a = _mm512_loadu_si512(base + adj[i] * stride + 8 * c);
                const __m512i b = _mm512_loadu_si512(base + adj[i + 1] * stride + 8 * c);
                acc0 = _mm512_add_epi64(acc0, _mm512_popcnt_epi64(_mm512_and_si512(zu, a)));
                acc1 = _mm512_add_epi64(acc1, _mm512_popcnt_epi64(_mm512_and_si512(zu, b)));
            }
            if (i < end) {
                const __m512i a = _mm512_loadu_si512(base + adj[i] * stride + 8 * c);
                acc0 = _mm512_add_epi64(acc0, _mm512_popcnt_epi64(_mm512_and_si512(zu, a)));
            }
        }
    }
    return static_cast<std::uint64_t>(_mm512_reduce_add_epi64(_mm512_add_epi64(acc0, acc1)));
#else
    std::uint64_t count = 0;
    for (std::size_t u = 0; u < n; ++u) {
        const Word* ru = g.row(u).data();
        for (std::size_t k = u >> 6; k < words; ++k) {
            Word neighbours = ru[k];
            if (k == (u >> 6)) neighbours &= above(u & 63);
            while (neighbours != 0) {
                const std::size_t v = k * 64 + static_cast<std::size_t>(std::countr_zero(neighbours));
                neighbours &= neighbours - 1;
                const Word* rv = g.row(v).data();
                const std::size_t kv = v >> 6;
                count += static_cast<std::uint64_t>(std::popcount(ru[kv] & rv[kv] & above(v & 63)));
                for (std::size_t j = kv + 1; j < words; ++j)
                    count += static_cast<std::uint64_t>(std::popcount(ru[j] & rv[j]));
            }
        }
    }
    return count;
#endif
}

} // namespace lclt
