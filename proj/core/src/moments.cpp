#include "lclt/moments.hpp"

#include <algorithm>
#include <cmath>

#include "lclt/error.hpp"

namespace lclt {

double binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    long double result = 1.0L;
    for (std::uint64_t i = 1; i <= k; ++i)
        result = result * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    return static_cast<double>(result);
}

Moments moments(std::uint64_t n, double p) {
    require(n >= 3, ErrorKind::invalid_parameter, "moments need at least 3 vertices");
    require(std::isfinite(p) && p > 0.0 && p < 1.0, ErrorKind::invalid_parameter,
            "moments need 0 < p < 1");
    const long double q = p;
    const long double p3 = q * q * q;
    const long double p5 = p3 * q * q;
    const long double p6 = p3 * p3;
    const long double ln = static_cast<long double>(n);
    const long double triples = ln * (ln - 1) * (ln - 2) / 6;
    const long double pairs = ln * (ln - 1) / 2;
    const long double pairs_rest = (ln - 2) * (ln - 3) / 2;

    Moments m;
    m.n = n;
    m.p = p;
    m.mu = static_cast<double>(triples * p3);
    const long double var = triples * (p3 - p6) + 2 * pairs * pairs_rest * (p5 - p6);
    m.sigma2 = static_cast<double>(var);
    m.sigma = static_cast<double>(std::sqrt(var));
    return m;
}

LatticePoint standardize(std::int64_t k, const Moments& m) {
    require(m.sigma > 0.0, ErrorKind::degenerate, "standardization needs sigma > 0");
    return {k, (static_cast<double>(k) - m.mu) / m.sigma};
}

std::int64_t lattice_count(double x, const Moments& m) {
    return static_cast<std::int64_t>(std::llround(x * m.sigma + m.mu));
}

} // namespace lclt
