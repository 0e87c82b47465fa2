#pragma once

// Over-estimates of the standard deviation from pairwise differences,
// valid uniformly over time. Two constructions: an explicit one with a
// Gaussian-quantile correction, and a sharper implicit one solved by
// bisection against the fixed-n quantile.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bentkus/stitching.hpp"

namespace bentkus {

// Gaussian correction term g_{2,n}(delta) for the explicit over-estimate.
// Negative values are possible (they tighten the bound); when the adjusted
// level reaches 1 the correction vanishes.
// The denominator uses the pair count floor(n/2): solving the quadratic of
// the underlying pairwise-sum deviation inequality in A gives
// g = sqrt(floor(c_n/2)) * width * z / (2 sqrt(2) floor(n/2)). With n in
// place of floor(n/2) the correction is half as large and the over-estimate
// measurably under-covers.
inline double gaussian_correction(long long n, double delta, double width,
                                  const StitchConfig& cfg = StitchConfig()) {
    if (n < 1) throw std::domain_error("gaussian_correction: n must be >= 1");
    if (!(delta > 0.0)) throw std::domain_error("gaussian_correction: delta must be positive");
    Epoch ep = epoch(n, cfg.eta);
    double h = cfg.zeta_c * std::pow(static_cast<double>(ep.k) + 1.0, cfg.power);
    double level = 2.0 * delta / (M_E * M_E * h);
    if (level >= 1.0) return 0.0;
    if (n < 2) return std::numeric_limits<double>::infinity();  // no pairs yet
    double u = std::min(1.0 - level, 1.0 - 1e-12);
    double half_cap = std::floor(static_cast<double>(ep.cap) / 2.0);
    return std::sqrt(half_cap) * width * normal_inv_cdf(u) /
           (2.0 * std::sqrt(2.0) * static_cast<double>(n / 2));
}

// Explicit over-estimate: sqrt(ahat2 + g^2) + g, never exceeding width / 2.
inline double explicit_var_upper_bound(double ahat2, long long n, double delta, double width,
                                       const StitchConfig& cfg = StitchConfig()) {
    if (!(ahat2 >= 0.0)) throw std::domain_error("explicit_var_upper_bound: ahat2 negative");
    if (n < 2) return width / 2.0;  // no pairs yet: the trivial bound
    double g = gaussian_correction(n, delta, width, cfg);
    double a = std::sqrt(ahat2 + g * g) + g;
    return std::min(std::max(a, 0.0), width / 2.0);
}

struct ImplicitVarBound {
    double a;
    bool saturated;  // bisection hit the top of the search interval
};

// Implicit over-estimate: the largest a consistent with
//   ahat2 >= a^2 - (B/n) q(d1/h; cap, a, B) - (1/n^2) q(d2/(2h); cap, a, B)^2,
// found by bisection (the right side is increasing in a past the crossing).
inline ImplicitVarBound implicit_var_upper_bound(double ahat2, long long n, double B,
                                                 double delta1, double delta2,
                                                 const StitchConfig& cfg = StitchConfig()) {
    if (!(ahat2 >= 0.0)) throw std::domain_error("implicit_var_upper_bound: ahat2 negative");
    if (!(B > 0.0)) throw std::domain_error("implicit_var_upper_bound: B must be positive");
    if (n < 1) throw std::domain_error("implicit_var_upper_bound: n must be >= 1");
    Epoch ep = epoch(n, cfg.eta);
    double h = cfg.zeta_c * std::pow(static_cast<double>(ep.k) + 1.0, cfg.power);
    double nd = static_cast<double>(n);
    auto plausible = [&](double a) {
        BentkusParams prm(a, B);
        double q1 = bentkus_quantile(std::min(1.0, delta1 / h), ep.cap, prm);
        double q2 = bentkus_quantile(std::min(1.0, delta2 / (2.0 * h)), ep.cap, prm);
        return ahat2 >= a * a - (B / nd) * q1 - (q2 * q2) / (nd * nd);
    };
    double lo = 1e-12 * B, hi = B * std::sqrt(nd);
    if (plausible(hi)) return {hi, true};
    if (!plausible(lo)) return {lo, false};
    double tol = 1e-8 * B;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (plausible(mid))
            lo = mid;
        else
            hi = mid;
    }
    return {hi, false};
}

// Streaming pairwise variance over-estimate with running minimum. Feed
// observations in arrival order; bounds are refreshed on every even count.
class VarianceEstimator {
  public:
    VarianceEstimator(double lower, double upper, double delta,
                      StitchConfig cfg = StitchConfig())
        : lower_(lower), upper_(upper), delta_(delta), cfg_(cfg) {
        if (!(upper > lower)) throw std::domain_error("VarianceEstimator: empty support");
        if (!(delta > 0.0 && delta < 1.0))
            throw std::domain_error("VarianceEstimator: delta outside (0, 1)");
        running_min_ = (upper_ - lower_) / 2.0;
    }

    void add(double x) {
        if (!(x >= lower_ && x <= upper_))
            throw std::domain_error("VarianceEstimator: observation outside support");
        ++n_;
        if (n_ % 2 == 1) {
            pending_ = x;
        } else {
            double d = x - pending_;
            sumsq_ += d * d / 2.0;
        }
        double bound = (n_ < 2) ? (upper_ - lower_) / 2.0
                                : explicit_var_upper_bound(pairwise_estimate_sq(), n_, delta_,
                                                           upper_ - lower_, cfg_);
        running_min_ = std::min(running_min_, bound);
    }

    long long count() const { return n_; }

    // Ahat_n^2, the mean of squared pair half-differences.
    double pairwise_estimate_sq() const {
        if (n_ < 2) throw std::domain_error("pairwise_estimate_sq: need at least one pair");
        return sumsq_ / static_cast<double>(n_ / 2);
    }

    // Current explicit over-estimate at this n.
    double upper_bound() const {
        if (n_ < 2) return (upper_ - lower_) / 2.0;
        return explicit_var_upper_bound(pairwise_estimate_sq(), n_, delta_, upper_ - lower_,
                                        cfg_);
    }

    // Running minimum of the over-estimate, capped at (upper - lower) / 2.
    double running_min() const { return running_min_; }

  private:
    double lower_, upper_, delta_;
    StitchConfig cfg_;
    long long n_ = 0;
    double pending_ = 0.0;
    double sumsq_ = 0.0;
    double running_min_;
};

}  // namespace bentkus
