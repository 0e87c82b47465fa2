#pragma once

// Numerically stable binomial kernels: log-space pmf, upper-tail
// probabilities, truncated first/second moments, log-linear tail
// interpolation, and an inverse normal CDF. These are the primitives the
// tail-bound computations are built on.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace bentkus {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without overflow.
inline double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

namespace detail {

// Cached log(k!) values. The vector's capacity is reserved up front so
// previously returned pointers stay valid while the table grows.
inline const double* log_factorial_table(std::size_t n) {
    static constexpr std::size_t kMax = 1u << 21;
    static std::mutex mu;
    static std::vector<double>* table = nullptr;
    std::lock_guard<std::mutex> lock(mu);
    if (table == nullptr) {
        table = new std::vector<double>();
        table->reserve(kMax + 1);
    }
    if (n >= kMax) throw std::length_error("log_factorial_table: n too large");
    for (std::size_t k = table->size(); k <= n; ++k)
        table->push_back(std::lgamma(static_cast<double>(k) + 1.0));
    return table->data();
}

}  // namespace detail

inline double log_factorial(long long k) {
    if (k < 0) throw std::domain_error("log_factorial: negative argument");
    return detail::log_factorial_table(static_cast<std::size_t>(k))[k];
}

// log P(Bi(n, p) = k), with exact handling of p in {0, 1}.
inline double log_binom_pmf(long long n, double p, long long k) {
    if (n < 1) throw std::domain_error("log_binom_pmf: n must be >= 1");
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("log_binom_pmf: p outside [0, 1]");
    if (k < 0 || k > n) throw std::domain_error("log_binom_pmf: k outside [0, n]");
    if (p == 0.0) return k == 0 ? 0.0 : kNegInf;
    if (p == 1.0) return k == n ? 0.0 : kNegInf;
    const double* lf = detail::log_factorial_table(static_cast<std::size_t>(n));
    double lc = lf[n] - lf[k] - lf[n - k];
    return lc + static_cast<double>(k) * std::log(p) +
           static_cast<double>(n - k) * std::log1p(-p);
}

inline double binom_pmf(long long n, double p, long long k) {
    double lp = log_binom_pmf(n, p, k);
    return lp == kNegInf ? 0.0 : std::exp(lp);
}

struct PartialMoments {
    double p;  // P(Z >= k)
    double e;  // E[Z 1{Z >= k}]
    double v;  // E[Z^2 1{Z >= k}]
};

// Precomputed tail probabilities and truncated moments of Bi(n, p).
// Immutable after construction; concurrent reads are safe.
class BinomialTable {
  public:
    BinomialTable(long long n, double p) : n_(n), p_(p) {
        if (n < 1) throw std::domain_error("BinomialTable: n must be >= 1");
        if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("BinomialTable: p outside [0, 1]");
        tail_.assign(static_cast<std::size_t>(n) + 2, 0.0);
        e_.assign(static_cast<std::size_t>(n) + 2, 0.0);
        v_.assign(static_cast<std::size_t>(n) + 2, 0.0);
        // Entries above np + 60 sd are below ~1e-300 and are left at zero;
        // log-space queries (log_tail) still cover the full range.
        double sd = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
        long long kcap = n;
        double capf = static_cast<double>(n) * p + 60.0 * sd + 60.0;
        if (capf < static_cast<double>(n)) kcap = static_cast<long long>(capf);
        // Backward summation, smallest terms first.
        double t = 0.0, e = 0.0, v = 0.0;
        for (long long k = kcap; k >= 0; --k) {
            double lp = log_binom_pmf(n, p, k);
            if (lp > -745.0) {
                double f = std::exp(lp);
                double kd = static_cast<double>(k);
                t += f;
                e += kd * f;
                v += kd * kd * f;
            }
            tail_[k] = std::min(t, 1.0);  // guard against summation overshoot
            e_[k] = e;
            v_[k] = v;
        }
        tail_[0] = 1.0;
    }

    BinomialTable(const BinomialTable&) = delete;
    BinomialTable& operator=(const BinomialTable&) = delete;

    long long n() const { return n_; }
    double p() const { return p_; }

    // P(Z >= k); 1 for k <= 0, 0 for k > n.
    double tail(long long k) const {
        if (k <= 0) return 1.0;
        if (k > n_) return 0.0;
        return tail_[k];
    }

    // log P(Z >= k), exact in log space even where tail() underflows.
    double log_tail(long long k) const {
        if (k <= 0) return 0.0;
        if (k > n_) return kNegInf;
        std::call_once(log_tail_once_, [this] {
            log_tail_.assign(static_cast<std::size_t>(n_) + 2, kNegInf);
            double acc = kNegInf;
            for (long long j = n_; j >= 0; --j) {
                acc = log_add_exp(acc, log_binom_pmf(n_, p_, j));
                log_tail_[j] = acc;
            }
            log_tail_[0] = 0.0;
        });
        return log_tail_[k];
    }

    PartialMoments moments(long long k) const {
        if (k < 0 || k > n_) throw std::domain_error("BinomialTable::moments: k outside [0, n]");
        return {tail_[k], e_[k], v_[k]};
    }

    // Log-linear interpolation of the tail between lattice points.
    double tail_loglinear(double x) const {
        if (!(x >= 0.0 && x <= static_cast<double>(n_)))
            throw std::domain_error("tail_loglinear: x outside [0, n]");
        double fl = std::floor(x);
        long long k0 = static_cast<long long>(fl);
        if (x == fl) return tail(k0);
        double lam = x - fl;
        double lv = (1.0 - lam) * log_tail(k0) + lam * log_tail(k0 + 1);
        return lv == kNegInf ? 0.0 : std::exp(lv);
    }

  private:
    long long n_;
    double p_;
    std::vector<double> tail_, e_, v_;
    mutable std::once_flag log_tail_once_;
    mutable std::vector<double> log_tail_;
};

inline double binom_tail(const BinomialTable& table, long long k) { return table.tail(k); }

inline PartialMoments partial_moments(const BinomialTable& table, long long k) {
    return table.moments(k);
}

inline double tail_loglinear(const BinomialTable& table, double x) {
    return table.tail_loglinear(x);
}

// Standard normal CDF via the complementary error function.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

inline double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

// Inverse standard normal CDF: rational initial approximation (Acklam)
// polished with Newton steps against the erfc-based CDF. Absolute error is
// well below 1e-9 over the usable range.
inline double normal_inv_cdf(double u) {
    if (!(u > 0.0 && u < 1.0))
        throw std::domain_error("normal_inv_cdf: u must lie strictly in (0, 1)");
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double ulow = 0.02425;
    double z;
    if (u < ulow) {
        double q = std::sqrt(-2.0 * std::log(u));
        z = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (u <= 1.0 - ulow) {
        double q = u - 0.5, r = q * q;
        z = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log1p(-u));
        z = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    for (int i = 0; i < 2; ++i) {
        double dens = normal_pdf(z);
        if (dens < 1e-280) break;
        double err = (z > 0.0) ? (std::erfc(z / std::sqrt(2.0)) * 0.5 - (1.0 - u))
                               : (normal_cdf(z) - u);
        if (z > 0.0) err = -err;
        z -= err / dens;
    }
    return z;
}

}  // namespace bentkus
