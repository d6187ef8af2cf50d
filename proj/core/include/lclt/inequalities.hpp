#pragma once

#include <cstddef>
#include <span>

namespace lclt {

/// Distance from x to the nearest integer, in [0, 1/2].
double nearest_int_dist(double x);

/// 1 - 8 p (1-p) ||t / 2 pi||^2, an upper bound on |1 - p + p e^{it}|.
double binomial_charfn_bound(double p, double t);

/// |1 - p + p e^{it}| computed as sqrt(1 - 4 p (1-p) sin^2(t/2)).
double bernoulli_charfn_modulus(double p, double t);

/// 2 exp(-t^2 / (2 mean + t)). Returns the vacuous value 2 when mean = t = 0.
double chernoff_bound(double mean, double t);

/// Exact P(|Y - E Y| >= t) for Y ~ Bin(trials, p), by direct summation.
double binomial_two_sided_tail(std::size_t trials, double p, double t);

/// Maximum expected partial derivatives of the triangle polynomial,
/// e[j] = max over |A| >= j of E(d_A X). Derivative sets with nonzero
/// derivative are: empty, one edge, two incident edges, a triangle.
struct DerivativeProfile {
    std::size_t n = 0;
    double p = 0.0;
    double e[4] = {0.0, 0.0, 0.0, 0.0};
};

DerivativeProfile triangle_derivative_profile(std::size_t n, double p);

struct KimVuBound {
    double threshold = 0.0; // c_3 r^3 (E_0 E_1)^(1/2)
    double tail = 0.0;      // exp(-r + 2 log n)
    DerivativeProfile profile;
};

KimVuBound kimvu_bound(std::size_t n, double p, double r, double c3 = 1.0);

struct PaleyZygmund {
    double lhs = 0.0; // empirical P(S > theta E S)
    double rhs = 0.0; // (1 - theta)^2 (E S)^2 / E S^2
    bool holds = false;
};

/// Evaluates Paley-Zygmund on the empirical measure of `values`, where it
/// holds exactly.
PaleyZygmund paley_zygmund_check(std::span<const double> values, double theta);

/// exp(-K^2/2) / K, which dominates the Gaussian tail integral from K and is
/// itself at most exp(-K) for K >= 2.
double gaussian_tail(double K);

struct Domination {
    std::size_t points = 0;
    std::size_t violations = 0;
    double worst_excess = 0.0; // max of (exact - bound); nonpositive when dominated
};

/// binomial_charfn_bound against bernoulli_charfn_modulus on an evenly spaced
/// p_points x t_points grid over p in [0.01, 0.99], t in [-4 pi, 4 pi].
Domination verify_charfn_bound_grid(std::size_t p_points, std::size_t t_points, double tolerance);

/// chernoff_bound against binomial_two_sided_tail for trials in [1, max_trials],
/// p in {0.1, ..., 0.9}, every integer t in [0, trials].
Domination verify_chernoff(std::size_t max_trials, double tolerance);

} // namespace lclt
