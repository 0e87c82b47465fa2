#pragma once

// Confidence sequences and fixed-n confidence intervals for the mean of
// bounded observations in [lower, upper].
//
// Anytime-valid methods (valid simultaneously over all n):
//   a_bentkus    - empirical-Bentkus recursion with the pairwise variance
//                  over-estimate and stitched error budgets
//   a_hoeffding  - adaptive Hoeffding boundary
//   e_bernstein  - empirical Bernstein boundary with stitched budgets
// Fixed-n baselines (valid at each n separately):
//   hoeffding_fixed, bernstein_fixed
// Two-sided intervals spend delta/2 per side throughout.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bentkus/variance.hpp"

namespace bentkus {

enum class Method { a_bentkus, a_hoeffding, e_bernstein, hoeffding_fixed, bernstein_fixed };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::a_bentkus: return "a-bentkus";
        case Method::a_hoeffding: return "a-hoeffding";
        case Method::e_bernstein: return "e-bernstein";
        case Method::hoeffding_fixed: return "hoeffding";
        case Method::bernstein_fixed: return "bernstein";
    }
    return "?";
}

inline Method method_from_name(const std::string& s) {
    if (s == "a-bentkus") return Method::a_bentkus;
    if (s == "a-hoeffding") return Method::a_hoeffding;
    if (s == "e-bernstein") return Method::e_bernstein;
    if (s == "hoeffding") return Method::hoeffding_fixed;
    if (s == "bernstein") return Method::bernstein_fixed;
    throw std::domain_error("unknown method: " + s);
}

// One-sided bounds on the sum scale: P(S_n >= bound) <= delta, for centered
// variables with the stated range / variance / almost-sure upper bound.

inline double hoeffding_bound(double delta, long long n, double range) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("hoeffding_bound: bad delta");
    return range * std::sqrt(static_cast<double>(n) * std::log(1.0 / delta) / 2.0);
}

inline double bernstein_bound(double delta, long long n, double A, double B) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("bernstein_bound: bad delta");
    double L = std::log(1.0 / delta);
    double nd = static_cast<double>(n);
    return std::sqrt(2.0 * nd * A * A * L + B * B * L * L / 9.0) + B * L / 3.0;
}

// Uniform over n; n = 1 is covered by the n = 2 value of the boundary.
inline double adaptive_hoeffding_bound(double delta, long long n, double range) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::domain_error("adaptive_hoeffding_bound: bad delta");
    double m = static_cast<double>(std::max<long long>(n, 2));
    double loglog = std::log(std::log(m) / std::log(1.1) + 1.0);
    return range * std::sqrt(0.6 * m * loglog + m * std::log(12.0 / delta) / 1.8);
}

// Uniform over n via stitching; ahat2 is the empirical variance at time n.
inline double empirical_bernstein_bound(double delta, long long n, double ahat2, double range,
                                        const StitchConfig& cfg = StitchConfig()) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::domain_error("empirical_bernstein_bound: bad delta");
    Epoch ep = epoch(n, cfg.eta);
    double h = cfg.zeta_c * std::pow(static_cast<double>(ep.k) + 1.0, cfg.power);
    double l = std::log(3.0 * h / (2.0 * delta));
    double nd = static_cast<double>(n);
    return std::sqrt(2.0 * nd * cfg.eta * ahat2 * l) + 3.0 * range * cfg.eta * l;
}

struct ConfidenceInterval {
    long long n = 0;
    double lower;      // reported lower bound (cumulative for anytime methods)
    double upper;      // reported upper bound
    double radius;     // (upper - lower) / 2
    double raw_lower;  // this step's untruncated lower bound
    double raw_upper;  // this step's untruncated upper bound
};

struct ConfSeqOptions {
    double known_stddev = -1.0;  // if > 0, skip variance estimation and use this
    StitchConfig stitch = StitchConfig();
};

class ConfSeq {
  public:
    ConfSeq(Method method, double lower, double upper, double delta,
            ConfSeqOptions options = ConfSeqOptions())
        : method_(method), lo_(lower), up_(upper), delta_(delta), opt_(options),
          var_(lower, upper, options.stitch.delta2_frac * delta, options.stitch) {
        if (!(up_ > lo_)) throw std::domain_error("ConfSeq: empty support");
        if (!(delta_ > 0.0 && delta_ < 1.0)) throw std::domain_error("ConfSeq: delta outside (0, 1)");
        mu_up_raw_ = up_;
        mu_low_raw_ = lo_;
        best_lower_ = lo_;
        best_upper_ = up_;
    }

    Method method() const { return method_; }
    long long count() const { return n_; }
    double mean() const { return mean_; }

    void update(double y) {
        if (!(y >= lo_ && y <= up_))
            throw std::domain_error("ConfSeq::update: observation outside support");
        ++n_;
        double d = y - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (y - mean_);
        if (method_ == Method::a_bentkus && !(opt_.known_stddev > 0.0)) var_.add(y);
        compute();
    }

    ConfidenceInterval current() const {
        if (n_ == 0) return {0, lo_, up_, (up_ - lo_) / 2.0, lo_, up_};
        return ci_;
    }

  private:
    void compute() {
        const double width = up_ - lo_;
        const double nd = static_cast<double>(n_);
        const double dd = delta_ / 2.0;  // per side
        double raw_lo, raw_hi;
        switch (method_) {
            case Method::a_bentkus: {
                Epoch ep = epoch(n_, opt_.stitch.eta);
                double d1 = opt_.stitch.delta1_frac * delta_;
                double budget = stitch_budget(d1 / 2.0, ep.k, opt_.stitch);
                double A = opt_.known_stddev > 0.0 ? opt_.known_stddev : var_.running_min();
                A = std::max(A, 1e-12 * width);
                double b_up = std::max(mu_up_raw_ - lo_, 1e-12 * width);
                double q_up = bentkus_quantile(budget, ep.cap, BentkusParams(A, b_up));
                double b_low = std::max(up_ - mu_low_raw_, 1e-12 * width);
                double q_low = bentkus_quantile(budget, ep.cap, BentkusParams(A, b_low));
                raw_hi = mean_ + q_up / nd;
                raw_lo = mean_ - q_low / nd;
                mu_up_raw_ = raw_hi;  // recursion state keeps the raw values
                mu_low_raw_ = raw_lo;
                break;
            }
            case Method::a_hoeffding: {
                double r = adaptive_hoeffding_bound(dd, n_, width) / nd;
                raw_lo = mean_ - r;
                raw_hi = mean_ + r;
                break;
            }
            case Method::e_bernstein: {
                double r = empirical_bernstein_bound(dd, n_, m2_ / nd, width, opt_.stitch) / nd;
                raw_lo = mean_ - r;
                raw_hi = mean_ + r;
                break;
            }
            case Method::hoeffding_fixed: {
                double r = hoeffding_bound(dd, n_, width) / nd;
                raw_lo = mean_ - r;
                raw_hi = mean_ + r;
                break;
            }
            case Method::bernstein_fixed: {
                double A = opt_.known_stddev > 0.0 ? opt_.known_stddev : width / 2.0;
                double r = bernstein_bound(dd, n_, A, width) / nd;
                raw_lo = mean_ - r;
                raw_hi = mean_ + r;
                break;
            }
        }
        double clip_lo = std::min(std::max(raw_lo, lo_), up_);
        double clip_hi = std::min(std::max(raw_hi, lo_), up_);
        if (anytime()) {
            best_lower_ = std::max(best_lower_, clip_lo);
            best_upper_ = std::min(best_upper_, clip_hi);
        } else {
            best_lower_ = clip_lo;
            best_upper_ = clip_hi;
        }
        ci_ = {n_, best_lower_, best_upper_, (best_upper_ - best_lower_) / 2.0, raw_lo, raw_hi};
    }

    bool anytime() const {
        return method_ == Method::a_bentkus || method_ == Method::a_hoeffding ||
               method_ == Method::e_bernstein;
    }

    Method method_;
    double lo_, up_, delta_;
    ConfSeqOptions opt_;
    VarianceEstimator var_;
    long long n_ = 0;
    double mean_ = 0.0, m2_ = 0.0;
    double mu_up_raw_, mu_low_raw_;   // a_bentkus recursion state
    double best_lower_, best_upper_;  // cumulative intersection
    ConfidenceInterval ci_;
};

}  // namespace bentkus
