#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lclt {

using Word = std::uint64_t;

inline constexpr std::size_t kMaxVertices = std::size_t{1} << 16;

/// One draw of G(n, p) stored as n rows of machine-word bitsets.
/// Immutable once sampled; rows are symmetric with an empty diagonal.
class GnpSample {
public:
    GnpSample() = default;

    std::size_t n() const noexcept { return n_; }
    double p() const noexcept { return p_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }
    std::size_t words_per_row() const noexcept { return words_; }

    std::span<const Word> row(std::size_t u) const noexcept { return {bits_.data() + u * words_, words_}; }

    bool has_edge(std::size_t u, std::size_t v) const noexcept {
        return (bits_[u * words_ + (v >> 6)] >> (v & 63)) & 1U;
    }

    std::size_t degree(std::size_t u) const noexcept;
    std::size_t edge_count() const noexcept;

    /// Builds a sample from an explicit edge list; used by tests and fixtures.
    static GnpSample from_edges(std::size_t n, std::span<const std::pair<std::size_t, std::size_t>> edges);

    bool operator==(const GnpSample&) const = default;

private:
    friend void sample_gnp_into(GnpSample&, std::size_t, double, std::uint64_t, std::uint64_t);

    void reset(std::size_t n, double p, std::uint64_t seed, std::uint64_t stream_id);
    Word* mutable_row(std::size_t u) noexcept { return bits_.data() + u * words_; }
    void mirror_upper_triangle() noexcept;

    std::size_t n_ = 0;
    std::size_t words_ = 0;
    double p_ = 0.0;
    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;
    std::vector<Word> bits_;
};

/// Draws G(n, p) deterministically from (seed, stream_id). Uses per-row
/// geometric skipping below p = 0.05 and bit-plane Bernoulli words otherwise.
GnpSample sample_gnp(std::size_t n, double p, std::uint64_t seed, std::uint64_t stream_id);

/// Same as sample_gnp but reuses the storage of `out`.
void sample_gnp_into(GnpSample& out, std::size_t n, double p, std::uint64_t seed, std::uint64_t stream_id);

inline constexpr double kSparseThreshold = 0.05;

/// O(n^3) reference count over vertex triples.
std::uint64_t count_triangles_naive(const GnpSample& g);

/// Row-intersection count: for every edge uv with u < v, popcount of the
/// common neighbours w > v.
std::uint64_t count_triangles(const GnpSample& g);

} // namespace lclt
