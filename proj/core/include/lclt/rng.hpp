#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

namespace lclt {

/// Stafford variant 13 finalizer, as used by SplitMix64.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based 64-bit generator. Output i of stream s is
/// mix64(key(seed, s) + i * golden), so any (seed, stream, position) triple is
/// addressable without touching other streams.
class CounterRng {
public:
    using result_type = std::uint64_t;

    static constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;

    CounterRng(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : key_(mix64(seed ^ mix64(stream_id + 0x632be59bd9b4e019ULL))) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return mix64(key_ + (++counter_) * golden); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound) by Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t bound) noexcept {
        __extension__ using u128 = unsigned __int128;
        u128 product = static_cast<u128>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(product);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                product = static_cast<u128>((*this)()) * bound;
                low = static_cast<std::uint64_t>(product);
            }
        }
        return static_cast<std::uint64_t>(product >> 64);
    }

    std::uint64_t position() const noexcept { return counter_; }

    /// Output at an absolute position, independent of the running counter.
    result_type at(std::uint64_t index) const noexcept { return mix64(key_ + index * golden); }

    std::uint64_t key() const noexcept { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Produces 64 independent Bernoulli(p) bits per word by comparing a lazily
/// revealed uniform against the binary expansion of p, one bit plane at a time.
/// Plane j of word i reads generator output i * 64 + j + 1, so a word depends
/// only on its index. Costs about log2(64) + 2 outputs per word and is exact up
/// to 2^-64.
class BernoulliWords {
public:
    explicit BernoulliWords(double p) noexcept;

    std::uint64_t threshold() const noexcept { return threshold_; }
    bool all_ones() const noexcept { return all_ones_; }

    std::uint64_t word(const CounterRng& rng, std::uint64_t index) const noexcept;

    /// out[j] = word(rng, first_index + j) for j < count.
    void fill(const CounterRng& rng, std::uint64_t first_index, std::uint64_t* out, std::size_t count) const noexcept;

private:
    std::uint64_t threshold_ = 0; // floor(p * 2^64)
    bool all_ones_ = false;
};

} // namespace lclt
