#pragma once

// Uniform-in-n ("stitched") boundaries built from the fixed-n bound.
//
// Time is split into geometric epochs [ceil(eta^k), floor(eta^{k+1})]; within
// epoch k the fixed-n quantile is evaluated at the epoch cap with the error
// budget delta / h(k), h(k) = zeta(c) (k+1)^c, so the total error over all
// epochs telescopes to delta.

#include <cmath>
#include <stdexcept>

#include "bentkus/bentkus.hpp"

namespace bentkus {

namespace detail {

// Riemann zeta for real c > 1: Kahan-summed partial sum plus an
// Euler-Maclaurin tail correction. Accurate to ~1e-13 for c >= 1.05.
inline double zeta_fn(double c) {
    if (!(c > 1.0)) throw std::domain_error("zeta: exponent must exceed 1");
    constexpr int N = 10000;
    double sum = 0.0, comp = 0.0;
    for (int k = 1; k <= N; ++k) {
        double term = std::pow(static_cast<double>(k), -c) - comp;
        double t = sum + term;
        comp = (t - sum) - term;
        sum = t;
    }
    double Nd = static_cast<double>(N);
    double tail = std::pow(Nd, 1.0 - c) / (c - 1.0) + 0.5 * std::pow(Nd, -c) +
                  c * std::pow(Nd, -c - 1.0) / 12.0 -
                  c * (c + 1.0) * (c + 2.0) * std::pow(Nd, -c - 3.0) / 720.0;
    return sum + tail;
}

// round(x) if x is within float noise of an integer, used when taking
// ceil/floor of eta^k so that e.g. 1.1^10 doesn't straddle a lattice point.
inline double snap(double x) {
    double r = std::round(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return r;
    return x;
}

}  // namespace detail

struct StitchConfig {
    double eta = 1.1;     // epoch growth factor
    double power = 1.1;   // polynomial rate c in h(k)
    double delta1_frac = 2.0 / 3.0;  // share of delta spent on the mean term
    double delta2_frac = 1.0 / 3.0;  // share spent on the variance term
    double zeta_c;        // zeta(power), cached

    explicit StitchConfig(double eta_ = 1.1, double power_ = 1.1,
                          double d1 = 2.0 / 3.0, double d2 = 1.0 / 3.0)
        : eta(eta_), power(power_), delta1_frac(d1), delta2_frac(d2),
          zeta_c(detail::zeta_fn(power_)) {
        if (!(eta > 1.0)) throw std::domain_error("StitchConfig: eta must exceed 1");
        if (!(power > 1.0)) throw std::domain_error("StitchConfig: power must exceed 1");
        if (!(d1 > 0.0 && d2 > 0.0 && d1 + d2 <= 1.0 + 1e-12))
            throw std::domain_error("StitchConfig: delta fractions must be positive and sum to <= 1");
    }
};

struct Epoch {
    long long k;    // epoch index
    long long cap;  // floor(eta^{k+1}), the n at which the quantile is taken
};

// Epoch containing n: the smallest k with ceil(eta^k) <= n < eta^{k+1}.
// Epochs are half-open on the right, so when eta^{k+1} is an exact integer
// (e.g. eta = 2) that n belongs to the next epoch; the cap stays
// floor(eta^{k+1}).
inline Epoch epoch(long long n, double eta) {
    if (n < 1) throw std::domain_error("epoch: n must be >= 1");
    if (!(eta > 1.0)) throw std::domain_error("epoch: eta must exceed 1");
    long double pw = 1.0L;  // eta^k
    for (long long k = 0;; ++k) {
        long double nxt = pw * static_cast<long double>(eta);  // eta^{k+1}
        double lo = std::ceil(detail::snap(static_cast<double>(pw)));
        double s = detail::snap(static_cast<double>(nxt));
        double hi = std::ceil(s) - 1.0;  // largest integer strictly below eta^{k+1}
        if (lo <= static_cast<double>(n) && static_cast<double>(n) <= hi)
            return {k, static_cast<long long>(std::floor(s))};
        if (hi > 2.0 * static_cast<double>(n) + 10.0)
            throw std::runtime_error("epoch: search overshot without match");
        pw = nxt;
    }
}

// Per-epoch error budget delta_part / h(k), h(k) = zeta(c) (k+1)^c.
inline double stitch_budget(double delta_part, long long k, const StitchConfig& cfg) {
    if (!(delta_part > 0.0)) throw std::domain_error("stitch_budget: delta must be positive");
    double h = cfg.zeta_c * std::pow(static_cast<double>(k) + 1.0, cfg.power);
    return delta_part / h;
}

enum class BudgetKind { boundary, variance };

// Per-epoch budget with the configured delta1/delta2 split applied first.
inline double budget(long long k, const StitchConfig& cfg, BudgetKind which, double delta) {
    double frac = which == BudgetKind::boundary ? cfg.delta1_frac : cfg.delta2_frac;
    return stitch_budget(frac * delta, k, cfg);
}

// Uniform boundary on the sum scale: for all n >= 1 simultaneously,
// P(exists n: S_n >= bound(n)) <= delta.
inline double adaptive_bentkus_bound(long long n, double delta, const BentkusParams& params,
                                     const StitchConfig& cfg = StitchConfig()) {
    Epoch ep = epoch(n, cfg.eta);
    double d = stitch_budget(delta, ep.k, cfg);
    return bentkus_quantile(d, ep.cap, params);
}

}  // namespace bentkus
