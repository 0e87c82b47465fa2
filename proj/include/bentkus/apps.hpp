#pragma once

// Sequential applications driven by confidence sequences: adaptive
// (epsilon, delta) mean estimation with a data-dependent stopping time, and
// best-arm identification by successive elimination.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bentkus/confseq.hpp"

namespace bentkus {

using ConfSeqFactory = std::function<ConfSeq(double delta)>;

struct StoppingTracePoint {
    long long n;
    double lb, ub;  // running bounds on |mu|
    double radius;  // symmetrized interval radius Q_n at this step
};

struct StoppingResult {
    long long stopping_time = 0;
    double estimate = 0.0;
    bool truncated = false;
    std::vector<StoppingTracePoint> trace;
};

struct StoppingOptions {
    long long max_n = 10'000'000;
    bool record_trace = false;
};

// Sample until (1 + eps) LB >= (1 - eps) UB, where LB / UB are running bounds
// on |mu| derived from the confidence sequence. The returned estimate is
// within a factor (1 +- eps) of |mu| (signed) with probability 1 - delta.
inline StoppingResult adaptive_stop(const std::function<double()>& stream, double epsilon,
                                    double delta, const ConfSeqFactory& factory,
                                    StoppingOptions opt = StoppingOptions()) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::domain_error("adaptive_stop: epsilon outside (0, 1)");
    ConfSeq cs = factory(delta);
    StoppingResult res;
    double lb = 0.0, ub = std::numeric_limits<double>::infinity();
    long long next_record = 1;
    for (long long n = 1; n <= opt.max_n; ++n) {
        cs.update(stream());
        ConfidenceInterval ci = cs.current();
        double mean = cs.mean();
        double q = std::max(mean - ci.lower, ci.upper - mean);
        lb = std::max(lb, std::abs(mean) - q);
        ub = std::min(ub, std::abs(mean) + q);
        bool stop = (1.0 + epsilon) * lb >= (1.0 - epsilon) * ub;
        if (opt.record_trace && (n >= next_record || stop)) {
            res.trace.push_back({n, lb, ub, q});
            next_record = std::max(next_record + 1, static_cast<long long>(next_record * 1.1));
        }
        if (stop) {
            double sign = mean >= 0.0 ? 1.0 : -1.0;
            res.stopping_time = n;
            res.estimate = 0.5 * sign * ((1.0 + epsilon) * lb + (1.0 - epsilon) * ub);
            return res;
        }
    }
    ConfidenceInterval ci = cs.current();
    double mean = cs.mean();
    double sign = mean >= 0.0 ? 1.0 : -1.0;
    res.stopping_time = opt.max_n;
    res.estimate = std::isfinite(ub) ? 0.5 * sign * ((1.0 + epsilon) * lb + (1.0 - epsilon) * ub)
                                     : 0.5 * (ci.lower + ci.upper);
    res.truncated = true;
    return res;
}

enum class RadiusMode {
    step,        // this step's raw half-width drives arm selection
    cumulative,  // the intersected interval's half-width drives selection
};

struct BestArmOptions {
    long long max_total_pulls = 10'000'000;
    RadiusMode radius_mode = RadiusMode::step;
    bool record_traces = false;
};

struct Elimination {
    long long at_pull;
    std::size_t arm;
};

struct BanditResult {
    std::size_t winner = 0;
    long long total_pulls = 0;
    bool truncated = false;
    std::vector<long long> pulls_per_arm;
    std::vector<Elimination> eliminations;
    std::vector<std::size_t> pull_trace;
};

namespace detail {

// Stable key for a delta value (12 significant digits + exponent).
inline std::int64_t delta_key(double delta) {
    int ex = static_cast<int>(std::floor(std::log10(delta)));
    double mant = delta * std::pow(10.0, 11 - ex);
    return static_cast<std::int64_t>(std::llround(mant)) * 1000 + (ex + 400);
}

// Per-arm reward history with confidence sequences cached per delta. The
// error budget an arm runs at changes as arms are eliminated, so sequences
// at new deltas are rebuilt by replaying the history.
struct ArmState {
    std::vector<double> history;
    double sum = 0.0;
    std::map<std::int64_t, ConfSeq> by_delta;

    double mean() const {
        return history.empty() ? 0.0 : sum / static_cast<double>(history.size());
    }

    ConfSeq& at_delta(double delta, const ConfSeqFactory& factory) {
        std::int64_t key = delta_key(delta);
        auto it = by_delta.find(key);
        if (it == by_delta.end()) {
            ConfSeq cs = factory(delta);
            for (double y : history) cs.update(y);
            it = by_delta.emplace(key, std::move(cs)).first;
        }
        return it->second;
    }

    void add(double y) {
        history.push_back(y);
        sum += y;
        for (auto& [k, cs] : by_delta) cs.update(y);
    }
};

}  // namespace detail

// Successive elimination: the current empirical leader runs its confidence
// sequence at (delta/2)/(K-1) and every other active arm at delta/2, where K
// is the number of active arms. Each round the active arm with the largest
// radius is pulled; an arm is eliminated once its upper bound falls below the
// leader's lower bound. Identifies the arm with the highest mean with
// probability at least 1 - delta.
inline BanditResult best_arm(const std::vector<std::function<double()>>& arms, double delta,
                             const ConfSeqFactory& factory,
                             BestArmOptions opt = BestArmOptions()) {
    const std::size_t total_arms = arms.size();
    if (total_arms == 0) throw std::domain_error("best_arm: no arms");
    BanditResult res;
    res.pulls_per_arm.assign(total_arms, 0);
    if (total_arms == 1) return res;

    std::vector<detail::ArmState> state(total_arms);
    std::vector<std::size_t> active(total_arms);
    for (std::size_t i = 0; i < total_arms; ++i) active[i] = i;

    while (true) {
        // Empirical leader; ties go to the lowest id.
        std::size_t leader = active[0];
        for (std::size_t a : active)
            if (state[a].mean() > state[leader].mean()) leader = a;

        const std::size_t k = active.size();
        const double delta_other = delta / 2.0;
        const double delta_leader = delta_other / static_cast<double>(k - 1);

        struct Row {
            std::size_t arm;
            double lower, upper, radius, mean;
        };
        std::vector<Row> rows;
        rows.reserve(k);
        for (std::size_t a : active) {
            double d = (a == leader) ? delta_leader : delta_other;
            ConfidenceInterval ci = state[a].at_delta(d, factory).current();
            double r = (opt.radius_mode == RadiusMode::step)
                           ? (ci.raw_upper - ci.raw_lower) / 2.0
                           : (ci.upper - ci.lower) / 2.0;
            rows.push_back({a, ci.lower, ci.upper, r, state[a].mean()});
        }

        double leader_lower = 0.0;
        for (const Row& row : rows)
            if (row.arm == leader) leader_lower = row.lower;
        std::vector<std::size_t> survivors;
        survivors.reserve(k);
        for (const Row& row : rows) {
            if (row.arm != leader && row.upper < leader_lower)
                res.eliminations.push_back({res.total_pulls, row.arm});
            else
                survivors.push_back(row.arm);
        }
        active = std::move(survivors);
        if (active.size() == 1) {
            res.winner = active[0];
            return res;
        }
        if (res.total_pulls >= opt.max_total_pulls) {
            res.winner = leader;
            res.truncated = true;
            return res;
        }

        // Pull the widest active arm; break ties toward the smaller mean,
        // then the lowest id.
        const Row* best = nullptr;
        for (const Row& row : rows) {
            bool is_active = false;
            for (std::size_t a : active) is_active |= (a == row.arm);
            if (!is_active) continue;
            if (best == nullptr || row.radius > best->radius ||
                (row.radius == best->radius && row.mean < best->mean))
                best = &row;
        }
        std::size_t pull = best->arm;
        state[pull].add(arms[pull]());
        ++res.total_pulls;
        ++res.pulls_per_arm[pull];
        if (opt.record_traces) res.pull_trace.push_back(pull);
    }
}

}  // namespace bentkus
