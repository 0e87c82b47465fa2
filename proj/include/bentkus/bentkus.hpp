#pragma once

// Fixed-n Bentkus tail bound for sums of bounded mean-zero variables.
//
// The bound evaluates P2(x; Z_n) = inf_{x' <= x} E[(Z_n - x')_+^2] / (x - x')_+^2
// for a binomial Z_n ~ Bi(n, p_AB), which is piecewise rational with
// breakpoints Psi_k = (v_k - k e_k) / (e_k - k p_k). The affine
// reparameterization through p_AB = A^2 / (A^2 + B^2) turns this into a tail
// bound and quantile for the worst-case two-point law on {-A^2/B, B}.

#include <cmath>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bentkus/binomial.hpp"

namespace bentkus {

namespace detail {
inline constexpr double kBranchTol = 1e-12;  // relative slack at breakpoints
}

// Small LRU cache for quantile values keyed by (n, quantized delta).
// Concurrent use never returns a wrong value; at worst a value is recomputed.
class QuantileCache {
  public:
    explicit QuantileCache(std::size_t capacity = 8192) : capacity_(capacity) {}

    std::optional<double> find(long long n, double delta) const {
        Key key = make_key(n, delta);
        std::lock_guard<std::mutex> lock(mu_);
        auto it = map_.find(key);
        if (it == map_.end()) return std::nullopt;
        lru_.splice(lru_.begin(), lru_, it->second.second);
        return it->second.first;
    }

    void insert(long long n, double delta, double value) const {
        Key key = make_key(n, delta);
        std::lock_guard<std::mutex> lock(mu_);
        if (map_.count(key)) return;
        lru_.push_front(key);
        map_.emplace(key, std::make_pair(value, lru_.begin()));
        if (map_.size() > capacity_) {
            map_.erase(lru_.back());
            lru_.pop_back();
        }
    }

  private:
    using Key = std::pair<long long, std::int64_t>;
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            return std::hash<long long>()(k.first) * 1000003u ^
                   std::hash<std::int64_t>()(k.second);
        }
    };

    // delta rounded to 12 significant digits, packed with its exponent.
    static Key make_key(long long n, double delta) {
        int ex = static_cast<int>(std::floor(std::log10(delta)));
        double mant = delta * std::pow(10.0, 11 - ex);
        return {n, static_cast<std::int64_t>(std::llround(mant)) * 1000 + (ex + 400)};
    }

    std::size_t capacity_;
    mutable std::mutex mu_;
    mutable std::list<Key> lru_;
    mutable std::unordered_map<Key, std::pair<double, std::list<Key>::iterator>, KeyHash> map_;
};

// Variance upper bound A and almost-sure upper bound B of the centered
// variables, with the derived Bernoulli parameter p_AB.
struct BentkusParams {
    double A;
    double B;
    double p_ab;
    std::shared_ptr<QuantileCache> cache;

    BentkusParams(double A_, double B_)
        : A(A_), B(B_), p_ab(A_ * A_ / (A_ * A_ + B_ * B_)),
          cache(std::make_shared<QuantileCache>()) {
        if (!(A > 0.0))
            throw std::domain_error(
                "BentkusParams: A must be positive (floor A at eps*B for degenerate data)");
        if (!(B > 0.0)) throw std::domain_error("BentkusParams: B must be positive");
    }
};

struct Breakpoints {
    std::vector<double> psi;  // psi[k] for k = 0..n-1
};

namespace detail {

// Psi_k from the table's truncated moments. Requires e_k - k p_k > 0.
inline double psi_at(const BinomialTable& table, long long k) {
    PartialMoments m = table.moments(k);
    double kd = static_cast<double>(k);
    double den = m.e - kd * m.p;
    if (!(den > 0.0))
        throw std::runtime_error("psi breakpoint: non-positive denominator (table corrupt?)");
    return (m.v - kd * m.e) / den;
}

// P2 evaluated by the branch-k rational formula at x.
inline double p2_branch(const BinomialTable& table, long long k, double x) {
    if (k == 0) {
        double np = static_cast<double>(table.n()) * table.p();
        double var = np * (1.0 - table.p());
        double d = x - np;
        return var / (d * d + var);
    }
    PartialMoments m = table.moments(k);
    double num = m.v * m.p - m.e * m.e;
    double den = x * x * m.p - 2.0 * x * m.e + m.v;
    if (!(den > 0.0)) return 1.0;
    return std::min(1.0, num / den);
}

// Largest k whose tail is comfortably above the subnormal range, so the
// truncated moments retain full relative precision. Beyond this the bound is
// treated as 0 (the quantile saturation path covers deltas that small).
inline long long representable_limit(const BinomialTable& table) {
    constexpr double kFloor = 1e-280;
    long long lo = 0, hi = table.n();
    while (lo < hi) {  // table.tail is non-increasing
        long long mid = (lo + hi + 1) / 2;
        if (table.tail(mid) > kFloor)
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

}  // namespace detail

inline Breakpoints psi_breakpoints(const BinomialTable& table) {
    if (!(table.p() > 0.0 && table.p() < 1.0))
        throw std::domain_error("psi_breakpoints: p must lie in (0, 1)");
    Breakpoints out;
    out.psi.reserve(static_cast<std::size_t>(table.n()));
    for (long long k = 0; k < table.n(); ++k) out.psi.push_back(detail::psi_at(table, k));
    return out;
}

// P2(x; Z_n): 1 below n p, piecewise rational between breakpoints, the top
// atom p^n at x = n, and 0 beyond the support.
inline double p2_binomial(double x, const BinomialTable& table) {
    const long long n = table.n();
    const double p = table.p();
    const double np = static_cast<double>(n) * p;
    const double nd = static_cast<double>(n);
    if (x <= np) return 1.0;
    if (x > nd * (1.0 + detail::kBranchTol)) return 0.0;
    if (x >= nd * (1.0 - detail::kBranchTol)) {
        double lp = nd * std::log(p);
        return lp < -745.0 ? 0.0 : std::exp(lp);
    }
    // Smallest k with x <= Psi_k; Psi is non-decreasing.
    long long hi = std::min(n - 1, detail::representable_limit(table));
    if (x > detail::psi_at(table, hi) * (1.0 + detail::kBranchTol)) return 0.0;  // deep tail
    long long lo = 0;
    while (lo < hi) {
        long long mid = (lo + hi) / 2;
        if (x <= detail::psi_at(table, mid) * (1.0 + detail::kBranchTol))
            hi = mid;
        else
            lo = mid + 1;
    }
    return detail::p2_branch(table, lo, x);
}

struct P2Quantile {
    double x;
    bool saturated;  // delta below the top atom p^n
};

// Integer bracket for the quantile: k1 is the largest k with tail >= delta,
// k2 the smallest k with tail <= 2 delta / e^2 (clamped to n).
inline std::pair<long long, long long> bracket_quantile(double delta, const BinomialTable& table) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::domain_error("bracket_quantile: delta outside (0, 1]");
    const long long n = table.n();
    long long lo = 0, hi = n;
    while (lo < hi) {  // largest k with tail(k) >= delta
        long long mid = (lo + hi + 1) / 2;
        if (table.tail(mid) >= delta)
            lo = mid;
        else
            hi = mid - 1;
    }
    long long k1 = lo;
    double thr = 2.0 * delta / (M_E * M_E);
    long long a = 0, b = n + 1;
    while (a < b) {  // smallest k with tail(k) <= thr
        long long mid = (a + b) / 2;
        if (table.tail(mid) <= thr)
            b = mid;
        else
            a = mid + 1;
    }
    long long k2 = std::min(a, n);
    return {k1, k2};
}

inline P2Quantile p2_quantile_binomial(double delta, const BinomialTable& table) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::domain_error("p2_quantile_binomial: delta outside (0, 1]");
    const long long n = table.n();
    const double p = table.p();
    const double nd = static_cast<double>(n);
    const double np = nd * p;
    // Saturation test against the top atom, in log space.
    double log_pn = p > 0.0 ? nd * std::log(p) : kNegInf;
    double log_delta = std::log(delta);
    double tol = 1e-12 * std::abs(log_pn) + 1e-14;
    if (log_delta <= log_pn + tol) {
        if (log_delta >= log_pn - tol) return {nd, false};  // exactly the atom
        return {nd, true};
    }
    // Quadratic branch (k = 0) covers delta >= P2(Psi_0).
    double var = np * (1.0 - p);
    double q0 = 1.0 - p;
    double p2_psi0 = var / (q0 * q0 + var);
    if (delta >= p2_psi0) {
        double x = np + std::sqrt(std::max(0.0, (1.0 - delta) * var / delta));
        return {x, false};
    }
    // Locate the branch: smallest k with P2(Psi_k) <= delta, restricted by
    // the integer bracket.
    auto [k1, k2] = bracket_quantile(delta, table);
    (void)k1;
    long long lo = 1, hi = std::min({k2, n - 1, detail::representable_limit(table)});
    while (lo < hi) {
        long long mid = (lo + hi) / 2;
        if (detail::p2_branch(table, mid, detail::psi_at(table, mid)) <= delta)
            hi = mid;
        else
            lo = mid + 1;
    }
    long long k = lo;
    PartialMoments m = table.moments(k);
    double num = m.v * m.p - m.e * m.e;
    double disc = m.e * m.e - m.p * (m.v - num / delta);
    double x = (m.e + std::sqrt(std::max(0.0, disc))) / m.p;
    // Clamp into the closed branch interval against float drift.
    double psi_k = detail::psi_at(table, k);
    double psi_km1 = k >= 1 ? detail::psi_at(table, k - 1) : np;
    x = std::min(std::max(x, psi_km1), psi_k);
    return {std::min(x, nd), false};
}

// Tail bound for the worst-case sum: P(S_n >= u) <= bentkus_tail(u, n, params).
inline double bentkus_tail(double u, long long n, const BentkusParams& params) {
    if (n < 1) throw std::domain_error("bentkus_tail: n must be >= 1");
    BinomialTable table(n, params.p_ab);
    double x = static_cast<double>(n) * params.p_ab + u * (1.0 - params.p_ab) / params.B;
    return p2_binomial(x, table);
}

struct BentkusQuantile {
    double value;
    bool saturated;
};

// Quantile of the Bentkus tail: the u with bentkus_tail(u) = delta, or
// n B + 1 when delta lies strictly below the top atom.
inline BentkusQuantile bentkus_quantile_ex(double delta, long long n,
                                           const BentkusParams& params) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::domain_error("bentkus_quantile: delta outside (0, 1]");
    if (n < 1) throw std::domain_error("bentkus_quantile: n must be >= 1");
    if (params.cache) {
        if (auto hit = params.cache->find(n, delta))
            return {*hit, *hit > static_cast<double>(n) * params.B};
    }
    BinomialTable table(n, params.p_ab);
    P2Quantile q = p2_quantile_binomial(delta, table);
    double value;
    if (q.saturated) {
        value = static_cast<double>(n) * params.B + 1.0;
    } else {
        double a2 = params.A * params.A, b2 = params.B * params.B;
        value = ((a2 + b2) * q.x - static_cast<double>(n) * a2) / params.B;
    }
    if (params.cache) params.cache->insert(n, delta, value);
    return {value, q.saturated};
}

inline double bentkus_quantile(double delta, long long n, const BentkusParams& params) {
    return bentkus_quantile_ex(delta, n, params).value;
}

}  // namespace bentkus
