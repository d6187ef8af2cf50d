#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "lclt/exact_oracle.hpp"
#include "lclt/moments.hpp"

namespace lclt {

enum class PmfSource { exact_oracle, monte_carlo, inversion };

std::string to_string(PmfSource source);

/// Law of the triangle count. probs[i] is P(X = k_lo + i); every k in
/// [cover_lo, cover_hi] outside that window has mass zero.
struct Pmf {
    std::size_t n = 0;
    double p = 0.0;
    std::int64_t k_lo = 0;
    std::vector<double> probs;
    std::vector<double> ci; // per-k radius, Monte Carlo only
    PmfSource source = PmfSource::exact_oracle;
    std::size_t samples = 0;
    std::int64_t cover_lo = 0;
    std::int64_t cover_hi = 0;
    double clipped = 0.0; // total negative mass removed by inversion

    std::int64_t k_hi() const noexcept { return k_lo + static_cast<std::int64_t>(probs.size()) - 1; }
    double at(std::int64_t k) const noexcept;
    double total() const noexcept;
};

Pmf pmf_from_table(const TriangleEdgeTable& table, double p);

using CharFn = std::function<std::complex<double>(double theta)>;

struct InversionControl {
    std::size_t initial_panels = 32;
    std::size_t max_panels = std::size_t{1} << 20;
    double tolerance = 1e-12;
};

/// P(X = k) = (1/2pi) int_{-pi}^{pi} phi(theta) e^{-i theta k} d theta for
/// k in [k_lo, k_hi], by the periodic trapezoid rule. Panels double until two
/// successive rules agree to `tolerance`; negative masses are clipped to zero.
Pmf invert_charfn(const CharFn& charfn, std::size_t n, double p, std::int64_t k_lo, std::int64_t k_hi,
                  const InversionControl& control = {});

inline constexpr std::size_t kPmfBatches = 16;

/// Empirical law from `num_samples` graphs, with per-k radius
/// max(1.96 sqrt(P (1 - P) / N), 1 / N).
Pmf mc_pmf(std::size_t n, double p, std::size_t num_samples, std::uint64_t seed, std::size_t workers = 1);

/// Half the L1 distance between two laws.
double total_variation(const Pmf& a, const Pmf& b);

/// Half the sum of the per-k radii.
double aggregate_ci(const Pmf& pmf);

/// Standard normal density.
double normal_density(double x);

/// sup over lattice points x = (k - mu)/sigma, |x| <= 10, of |N(x) - sigma P(X = k)|.
double sup_lattice_distance(const Pmf& pmf, const Moments& m);

/// sigma times the largest per-k radius inside the |x| <= 10 window.
double sup_lattice_ci(const Pmf& pmf, const Moments& m);

struct L1Distance {
    double value = 0.0;        // includes outside_mass
    double outside_mass = 0.0; // Gaussian mass on nonnegative integers outside the evaluated range
};

/// Sum over nonnegative integers k of |N(k; mu, sigma^2) - P(X = k)|.
L1Distance l1_distance(const Pmf& pmf, const Moments& m);

/// sigma * max_k P(X = k).
double anticoncentration_stat(const Pmf& pmf, const Moments& m);

/// n^(-1/2 + epsilon) p^(1/2).
double predicted_distance_bound(std::size_t n, double p, double epsilon);

struct DistanceReport {
    std::size_t n = 0;
    double p = 0.0;
    double epsilon = 0.1;
    double sup_lattice = 0.0;
    double l1 = 0.0;
    double anticoncentration = 0.0;
    double predicted_bound = 0.0;
    std::string source;
    std::size_t samples = 0;
};

DistanceReport distance_report(const Pmf& pmf, double epsilon = 0.1);

/// JSON object with exactly the fields n, p, epsilon, sup_lattice, l1,
/// anticoncentration, predicted_bound, source, samples.
std::string to_json(const DistanceReport& report);

} // namespace lclt
