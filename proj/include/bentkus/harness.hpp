#pragma once

// Experiment engine: seeded, configuration-driven reproductions of the
// coverage, stopping-time, best-arm, and bound-comparison studies. Configs
// are JSON; reports are CSV (RFC 4180) or JSON, with aggregate rows that are
// exact recomputations of the per-replication rows.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bentkus/apps.hpp"
#include "bentkus/rng.hpp"

namespace bentkus {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { coverage, width, stopping, bestarm, bound_table, sweep };

inline ExperimentKind kind_from_name(const std::string& s) {
    if (s == "coverage") return ExperimentKind::coverage;
    if (s == "width") return ExperimentKind::width;
    if (s == "stopping") return ExperimentKind::stopping;
    if (s == "bestarm") return ExperimentKind::bestarm;
    if (s == "bound-table") return ExperimentKind::bound_table;
    if (s == "sweep") return ExperimentKind::sweep;
    throw ConfigError("unknown experiment kind: " + s);
}

inline const char* kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::coverage: return "coverage";
        case ExperimentKind::width: return "width";
        case ExperimentKind::stopping: return "stopping";
        case ExperimentKind::bestarm: return "bestarm";
        case ExperimentKind::bound_table: return "bound-table";
        case ExperimentKind::sweep: return "sweep";
    }
    return "?";
}

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::coverage;
    std::string distribution = "bernoulli";  // "bernoulli" or "uniform-average"
    double p = 0.5;                          // bernoulli success probability
    int m = 10;                              // uniform-average sample count
    std::vector<std::string> methods;        // empty = kind-specific default
    double delta = 0.05;
    double epsilon = 0.1;
    long long horizon = 5000;
    int replications = 30;
    std::uint64_t seed = 1;
    int arms = 5;
    double eta = 1.1;
    double power = 1.1;
    double delta1_frac = 2.0 / 3.0;
    double delta2_frac = 1.0 / 3.0;
    double A = std::sqrt(3.0) / 4.0;  // bound-table variance parameter
    double B = 0.75;                  // bound-table range parameter
    std::vector<double> eta_grid = {1.05, 1.1, 1.5, 2.0};
    std::vector<double> power_grid = {1.05, 1.1, 1.4, 2.0};
    bool record_traces = false;
    std::string out;
    std::string format = "csv";

    StitchConfig stitch() const { return StitchConfig(eta, power, delta1_frac, delta2_frac); }

    std::vector<std::string> resolved_methods() const {
        if (!methods.empty()) return methods;
        switch (kind) {
            case ExperimentKind::coverage:
            case ExperimentKind::width:
                return {"a-bentkus", "a-hoeffding", "e-bernstein"};
            case ExperimentKind::stopping:
            case ExperimentKind::bestarm:
                return {"a-bentkus", "a-hoeffding", "e-bernstein"};
            case ExperimentKind::bound_table:
                return {"bentkus", "bernstein", "hoeffding", "a-bentkus", "a-hoeffding"};
            case ExperimentKind::sweep:
                return {"a-bentkus"};
        }
        return {};
    }

    void validate() const {
        if (replications < 1) throw ConfigError("replications must be >= 1");
        if (horizon < 1) throw ConfigError("horizon must be >= 1");
        if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
        if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
        if (arms < 1) throw ConfigError("arms must be >= 1");
        if (distribution != "bernoulli" && distribution != "uniform-average")
            throw ConfigError("unknown distribution: " + distribution);
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p must lie in [0, 1]");
        if (m < 1) throw ConfigError("m must be >= 1");
        if (format != "csv" && format != "json")
            throw ConfigError("format must be csv or json");
        if (!(eta > 1.0)) throw ConfigError("eta must exceed 1");
        if (!(power > 1.0)) throw ConfigError("power must exceed 1");
        bool table_kind =
            kind == ExperimentKind::bound_table || kind == ExperimentKind::sweep;
        for (const std::string& name : resolved_methods()) {
            if (table_kind) {
                if (name != "bentkus" && name != "bernstein" && name != "hoeffding" &&
                    name != "a-bentkus" && name != "a-hoeffding")
                    throw ConfigError("method not available in bound tables: " + name);
            } else {
                try {
                    method_from_name(name);
                } catch (const std::domain_error& e) {
                    throw ConfigError(e.what());
                }
            }
        }
    }

    static ExperimentConfig from_json(const nlohmann::json& j) {
        ExperimentConfig cfg;
        try {
            if (j.contains("schema") && j.at("schema").get<int>() != 1)
                throw ConfigError("unsupported schema version");
            if (j.contains("kind")) cfg.kind = kind_from_name(j.at("kind").get<std::string>());
            if (j.contains("distribution"))
                cfg.distribution = j.at("distribution").get<std::string>();
            if (j.contains("p")) cfg.p = j.at("p").get<double>();
            if (j.contains("m")) cfg.m = j.at("m").get<int>();
            if (j.contains("methods"))
                cfg.methods = j.at("methods").get<std::vector<std::string>>();
            if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
            if (j.contains("epsilon")) cfg.epsilon = j.at("epsilon").get<double>();
            if (j.contains("horizon")) cfg.horizon = j.at("horizon").get<long long>();
            if (j.contains("replications")) cfg.replications = j.at("replications").get<int>();
            if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
            if (j.contains("arms")) cfg.arms = j.at("arms").get<int>();
            if (j.contains("eta")) cfg.eta = j.at("eta").get<double>();
            if (j.contains("power")) cfg.power = j.at("power").get<double>();
            if (j.contains("delta1_frac")) cfg.delta1_frac = j.at("delta1_frac").get<double>();
            if (j.contains("delta2_frac")) cfg.delta2_frac = j.at("delta2_frac").get<double>();
            if (j.contains("A")) cfg.A = j.at("A").get<double>();
            if (j.contains("B")) cfg.B = j.at("B").get<double>();
            if (j.contains("eta_grid"))
                cfg.eta_grid = j.at("eta_grid").get<std::vector<double>>();
            if (j.contains("power_grid"))
                cfg.power_grid = j.at("power_grid").get<std::vector<double>>();
            if (j.contains("record_traces"))
                cfg.record_traces = j.at("record_traces").get<bool>();
            if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
            if (j.contains("format")) cfg.format = j.at("format").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        cfg.validate();
        return cfg;
    }

    static ExperimentConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);  // parse errors carry byte positions
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(std::string("config parse: ") + e.what());
        }
        return from_json(j);
    }
};

// Shortest round-trip decimal representation.
inline std::string format_double(double x) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    (void)ec;
    return std::string(buf, ptr);
}

struct Report {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }

    static std::string csv_escape(const std::string& s) {
        if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
        std::string out = "\"";
        for (char c : s) {
            if (c == '"') out += '"';
            out += c;
        }
        out += '"';
        return out;
    }

    std::string to_csv() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < columns.size(); ++i)
            os << (i ? "," : "") << csv_escape(columns[i]);
        os << "\r\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                os << (i ? "," : "") << csv_escape(row[i]);
            os << "\r\n";
        }
        return os.str();
    }

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& row : rows) {
            nlohmann::json obj;
            for (std::size_t i = 0; i < columns.size() && i < row.size(); ++i)
                obj[columns[i]] = row[i];
            arr.push_back(obj);
        }
        return arr;
    }

    void write(std::ostream& os, const std::string& format) const {
        if (format == "json")
            os << to_json().dump(2) << "\n";
        else
            os << to_csv();
    }
};

// Geometrically spaced step indices 1 .. horizon (always includes both ends).
inline std::vector<long long> checkpoint_grid(long long horizon, double factor = 1.1) {
    std::vector<long long> out;
    long long n = 1;
    while (n < horizon) {
        out.push_back(n);
        n = std::max(n + 1, static_cast<long long>(std::llround(
                                static_cast<double>(n) * factor)));
    }
    out.push_back(horizon);
    return out;
}

namespace detail {

inline constexpr std::uint64_t kStreamCoverage = 1;
inline constexpr std::uint64_t kStreamStopping = 2;
inline constexpr std::uint64_t kStreamBestArm = 3;

inline double draw(const ExperimentConfig& cfg, SplitRng& rng) {
    if (cfg.distribution == "bernoulli") return rng.bernoulli(cfg.p) ? 1.0 : 0.0;
    double s = 0.0;
    for (int i = 0; i < cfg.m; ++i) s += rng.uniform();
    return s / static_cast<double>(cfg.m);
}

inline double true_mean(const ExperimentConfig& cfg) {
    return cfg.distribution == "bernoulli" ? cfg.p : 0.5;
}

inline ConfSeq make_confseq(const std::string& name, double delta,
                            const ExperimentConfig& cfg) {
    ConfSeqOptions opt;
    opt.stitch = cfg.stitch();
    return ConfSeq(method_from_name(name), 0.0, 1.0, delta, opt);
}

}  // namespace detail

// Coverage / width study: all methods see the identical stream per
// replication; rows land on the geometric checkpoint grid. Aggregate rows
// (rep = "agg") carry the mean width and the ever-miscovered rate.
inline Report run_coverage(const ExperimentConfig& cfg) {
    Report rep;
    rep.columns = {"kind", "method", "rep", "n", "lower", "upper", "width", "ever_miscovered"};
    const std::vector<std::string> methods = cfg.resolved_methods();
    const std::vector<long long> grid = checkpoint_grid(cfg.horizon);
    const double mu = detail::true_mean(cfg);
    const std::string kname = kind_name(cfg.kind);

    // per (method, grid index): per-replication width and miscoverage values
    std::map<std::pair<std::string, std::size_t>, std::pair<std::vector<double>, std::vector<int>>>
        agg;

    for (int r = 0; r < cfg.replications; ++r) {
        SplitRng rng = SplitRng(cfg.seed).split(detail::kStreamCoverage, static_cast<std::uint64_t>(r));
        std::vector<double> data(static_cast<std::size_t>(cfg.horizon));
        for (auto& y : data) y = detail::draw(cfg, rng);
        for (const std::string& name : methods) {
            ConfSeq cs = detail::make_confseq(name, cfg.delta, cfg);
            bool ever = false;
            std::size_t gi = 0;
            for (long long n = 1; n <= cfg.horizon; ++n) {
                cs.update(data[static_cast<std::size_t>(n - 1)]);
                ConfidenceInterval ci = cs.current();
                if (mu < ci.lower || mu > ci.upper) ever = true;
                if (gi < grid.size() && n == grid[gi]) {
                    double width = ci.upper - ci.lower;
                    rep.add_row({kname, name, std::to_string(r), std::to_string(n),
                                 format_double(ci.lower), format_double(ci.upper),
                                 format_double(width), ever ? "1" : "0"});
                    auto& cell = agg[{name, gi}];
                    cell.first.push_back(width);
                    cell.second.push_back(ever ? 1 : 0);
                    ++gi;
                }
            }
        }
    }
    for (const std::string& name : methods) {
        for (std::size_t gi = 0; gi < grid.size(); ++gi) {
            const auto& cell = agg[{name, gi}];
            double wsum = 0.0;
            int esum = 0;
            for (double w : cell.first) wsum += w;
            for (int e : cell.second) esum += e;
            double denom = static_cast<double>(cell.first.size());
            rep.add_row({kname, name, "agg", std::to_string(grid[gi]), "", "",
                         format_double(wsum / denom),
                         format_double(static_cast<double>(esum) / denom)});
        }
    }
    return rep;
}

// Adaptive stopping study: matched streams per replication across methods.
inline Report run_stopping(const ExperimentConfig& cfg) {
    Report rep;
    rep.columns = {"kind",      "method",    "rep",       "stopping_time", "estimate",
                   "true_mean", "truncated", "rel_err_ok"};
    const std::vector<std::string> methods = cfg.resolved_methods();
    const double mu = detail::true_mean(cfg);

    std::map<std::string, std::pair<double, int>> agg;  // sum of N, ok count
    for (int r = 0; r < cfg.replications; ++r) {
        for (const std::string& name : methods) {
            SplitRng rng =
                SplitRng(cfg.seed).split(detail::kStreamStopping, static_cast<std::uint64_t>(r));
            auto stream = [&cfg, &rng]() mutable { return detail::draw(cfg, rng); };
            auto factory = [&](double d) { return detail::make_confseq(name, d, cfg); };
            StoppingOptions opt;
            opt.max_n = cfg.horizon;
            StoppingResult res = adaptive_stop(stream, cfg.epsilon, cfg.delta, factory, opt);
            bool ok = mu != 0.0 && std::abs(res.estimate / mu - 1.0) <= cfg.epsilon;
            rep.add_row({"stopping", name, std::to_string(r), std::to_string(res.stopping_time),
                         format_double(res.estimate), format_double(mu),
                         res.truncated ? "1" : "0", ok ? "1" : "0"});
            auto& cell = agg[name];
            cell.first += static_cast<double>(res.stopping_time);
            cell.second += ok ? 1 : 0;
        }
    }
    for (const std::string& name : methods) {
        const auto& cell = agg[name];
        double denom = static_cast<double>(cfg.replications);
        rep.add_row({"stopping", name, "agg", format_double(cell.first / denom), "",
                     format_double(mu), "", format_double(cell.second / denom)});
    }
    return rep;
}

// Best-arm study on the polynomial reward family mu_a = 1 - (a/K)^0.6
// (arm 0 is best). Hardness H1 = sum over suboptimal arms of gap^-2.
inline Report run_bestarm(const ExperimentConfig& cfg) {
    Report rep;
    rep.columns = {"kind",   "method",  "trial",     "arms", "h1",
                   "pulls",  "winner",  "correct",   "truncated"};
    const std::vector<std::string> methods = cfg.resolved_methods();
    const int k = cfg.arms;
    std::vector<double> mus(static_cast<std::size_t>(k));
    for (int a = 0; a < k; ++a)
        mus[a] = 1.0 - std::pow(static_cast<double>(a) / static_cast<double>(k), 0.6);
    double h1 = 0.0;
    for (int a = 1; a < k; ++a) h1 += 1.0 / ((mus[a] - mus[0]) * (mus[a] - mus[0]));

    std::map<std::string, std::pair<double, int>> agg;  // sum of pulls, correct count
    for (int t = 0; t < cfg.replications; ++t) {
        for (const std::string& name : methods) {
            std::vector<SplitRng> arm_rngs;
            std::vector<std::function<double()>> arms;
            arm_rngs.reserve(static_cast<std::size_t>(k));
            for (int a = 0; a < k; ++a)
                arm_rngs.push_back(SplitRng(cfg.seed).split(
                    {detail::kStreamBestArm, static_cast<std::uint64_t>(t),
                     static_cast<std::uint64_t>(a)}));
            for (int a = 0; a < k; ++a) {
                double mu = mus[static_cast<std::size_t>(a)];
                SplitRng* r = &arm_rngs[static_cast<std::size_t>(a)];
                arms.push_back([mu, r]() { return r->bernoulli(mu) ? 1.0 : 0.0; });
            }
            auto factory = [&](double d) { return detail::make_confseq(name, d, cfg); };
            BestArmOptions opt;
            opt.max_total_pulls = cfg.horizon * std::max(1, k);
            opt.record_traces = cfg.record_traces;
            BanditResult res = best_arm(arms, cfg.delta, factory, opt);
            bool correct = res.winner == 0;
            rep.add_row({"bestarm", name, std::to_string(t), std::to_string(k),
                         format_double(h1), std::to_string(res.total_pulls),
                         std::to_string(res.winner), correct ? "1" : "0",
                         res.truncated ? "1" : "0"});
            if (cfg.record_traces) {
                for (const Elimination& e : res.eliminations)
                    rep.add_row({"elim", name, std::to_string(t), std::to_string(k),
                                 format_double(h1), std::to_string(e.at_pull),
                                 std::to_string(e.arm), "", ""});
            }
            auto& cell = agg[name];
            cell.first += static_cast<double>(res.total_pulls);
            cell.second += correct ? 1 : 0;
        }
    }
    for (const std::string& name : methods) {
        const auto& cell = agg[name];
        double denom = static_cast<double>(cfg.replications);
        rep.add_row({"bestarm", name, "agg", std::to_string(k), format_double(h1),
                     format_double(cell.first / denom), "",
                     format_double(cell.second / denom), ""});
    }
    return rep;
}

namespace detail {

// One-sided sum-scale boundary value for a bound-table method.
inline double table_bound(const std::string& name, long long n, double delta, double A,
                          double B, const StitchConfig& stitch) {
    if (name == "bentkus") return bentkus_quantile(delta, n, BentkusParams(A, B));
    if (name == "bernstein") return bernstein_bound(delta, n, A, B);
    if (name == "hoeffding") return hoeffding_bound(delta, n, A * A / B + B);
    if (name == "a-bentkus") return adaptive_bentkus_bound(n, delta, BentkusParams(A, B), stitch);
    if (name == "a-hoeffding") return adaptive_hoeffding_bound(delta, n, A * A / B + B);
    throw ConfigError("method not available in bound tables: " + name);
}

}  // namespace detail

// Boundary values over an n-grid (bound-table) or over hyperparameter grids
// (sweep). Values are one-sided on the sum scale; radius = bound / n.
inline Report emit_bound_table(const ExperimentConfig& cfg) {
    Report rep;
    rep.columns = {"kind", "method", "n", "eta", "power", "delta", "bound", "radius"};
    const std::vector<long long> grid = checkpoint_grid(cfg.horizon);
    const std::string kname = kind_name(cfg.kind);
    std::vector<double> etas = {cfg.eta}, powers = {cfg.power};
    if (cfg.kind == ExperimentKind::sweep) {
        etas = cfg.eta_grid;
        powers = cfg.power_grid;
    }
    for (const std::string& name : cfg.resolved_methods()) {
        bool stitched = name == "a-bentkus";
        std::vector<double> es = stitched ? etas : std::vector<double>{etas.front()};
        std::vector<double> ps = stitched ? powers : std::vector<double>{powers.front()};
        for (double eta : es) {
            for (double power : ps) {
                StitchConfig sc(eta, power, cfg.delta1_frac, cfg.delta2_frac);
                for (long long n : grid) {
                    double b = detail::table_bound(name, n, cfg.delta, cfg.A, cfg.B, sc);
                    rep.add_row({kname, name, std::to_string(n), format_double(eta),
                                 format_double(power), format_double(cfg.delta),
                                 format_double(b),
                                 format_double(b / static_cast<double>(n))});
                }
            }
        }
    }
    return rep;
}

inline Report run_experiment(const ExperimentConfig& cfg) {
    switch (cfg.kind) {
        case ExperimentKind::coverage:
        case ExperimentKind::width:
            return run_coverage(cfg);
        case ExperimentKind::stopping:
            return run_stopping(cfg);
        case ExperimentKind::bestarm:
            return run_bestarm(cfg);
        case ExperimentKind::bound_table:
        case ExperimentKind::sweep:
            return emit_bound_table(cfg);
    }
    throw ConfigError("unhandled experiment kind");
}

}  // namespace bentkus
