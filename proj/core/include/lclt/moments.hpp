#pragma once

#include <cstdint>

namespace lclt {

/// Mean and variance of the triangle count of G(n, p).
struct Moments {
    std::uint64_t n = 0;
    double p = 0.0;
    double mu = 0.0;
    double sigma2 = 0.0;
    double sigma = 0.0;
};

/// Closed form from the edge-overlap decomposition:
///   mu     = C(n,3) p^3
///   sigma2 = C(n,3)(p^3 - p^6) + 2 C(n,2) C(n-2,2)(p^5 - p^6)
/// The second term counts ordered pairs of triangles sharing exactly one edge;
/// edge-disjoint pairs are independent and contribute nothing.
Moments moments(std::uint64_t n, double p);

/// A triangle count together with its position on the standardized lattice.
struct LatticePoint {
    std::int64_t k = 0;
    double x = 0.0;
};

LatticePoint standardize(std::int64_t k, const Moments& m);

/// Inverse of standardize: the integer count nearest to x * sigma + mu.
std::int64_t lattice_count(double x, const Moments& m);

double binomial(std::uint64_t n, std::uint64_t k);

} // namespace lclt
