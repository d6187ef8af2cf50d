#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace lclt {

inline constexpr std::size_t kDefaultExactCeiling = 7;

/// Joint census of labeled graphs on n vertices: count(k, m) is the number of
/// graphs with exactly k triangles and m edges.
class TriangleEdgeTable {
public:
    TriangleEdgeTable() = default;
    explicit TriangleEdgeTable(std::size_t n);

    std::size_t n() const noexcept { return n_; }
    std::size_t max_edges() const noexcept { return max_edges_; }
    std::size_t max_triangles() const noexcept { return max_triangles_; }

    std::uint64_t count(std::size_t k, std::size_t m) const { return cells_[k * (max_edges_ + 1) + m]; }
    std::uint64_t& count(std::size_t k, std::size_t m) { return cells_[k * (max_edges_ + 1) + m]; }

    /// Checks the census invariants: total 2^C(n,2), no triangle below three
    /// edges, and exactly one complete graph. Throws a checksum error.
    void validate() const;

    TriangleEdgeTable& operator+=(const TriangleEdgeTable& other);
    bool operator==(const TriangleEdgeTable&) const = default;

private:
    std::size_t n_ = 0;
    std::size_t max_edges_ = 0;
    std::size_t max_triangles_ = 0;
    std::vector<std::uint64_t> cells_;
};

/// Enumerates all 2^C(n,2) edge masks. `ceiling` bounds n (resource limit).
TriangleEdgeTable build_table(std::size_t n, std::size_t ceiling = kDefaultExactCeiling, std::size_t workers = 1);

/// P(X = k) for k = 0..C(n,3).
std::vector<double> exact_pmf(const TriangleEdgeTable& table, double p);

/// E[exp(i theta X)] for the integer-valued triangle count.
std::complex<double> exact_charfn(const TriangleEdgeTable& table, double p, double theta);

/// Same as exact_charfn but reuses a precomputed pmf.
std::complex<double> charfn_from_pmf(const std::vector<double>& pmf, double theta);

/// Cache format: "# n=<n> edges=<C(n,2)>", header "k,m,count", one row per
/// nonzero cell in (k, m) order, counts as decimal integers.
void write_table(std::ostream& out, const TriangleEdgeTable& table);

/// Parses the cache format and validates the census invariants.
TriangleEdgeTable read_table(std::istream& in);

} // namespace lclt
