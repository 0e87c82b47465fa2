#include <catch2/catch_amalgamated.hpp>

#include "bentkus/confseq.hpp"
#include "bentkus/rng.hpp"

using namespace bentkus;

namespace {
const Method kAnytime[] = {Method::a_bentkus, Method::a_hoeffding, Method::e_bernstein};
const Method kAll[] = {Method::a_bentkus, Method::a_hoeffding, Method::e_bernstein,
                       Method::hoeffding_fixed, Method::bernstein_fixed};
}  // namespace

TEST_CASE("construction and trivial interval") {
    for (Method m : kAll) {
        ConfSeq cs(m, 0.0, 1.0, 0.05);
        ConfidenceInterval ci = cs.current();
        CHECK(ci.n == 0);
        CHECK(ci.lower == 0.0);
        CHECK(ci.upper == 1.0);
    }
    CHECK_THROWS_AS(ConfSeq(Method::a_bentkus, 1.0, 0.0, 0.05), std::domain_error);
    CHECK_THROWS_AS(ConfSeq(Method::a_bentkus, 0.0, 1.0, 1.5), std::domain_error);
}

TEST_CASE("update rejects out-of-support observations") {
    ConfSeq cs(Method::a_bentkus, 0.0, 1.0, 0.05);
    CHECK_THROWS_AS(cs.update(-0.1), std::domain_error);
    CHECK_THROWS_AS(cs.update(1.1), std::domain_error);
}

TEST_CASE("constant stream stays covered and shrinks") {
    for (Method m : kAll) {
        ConfSeq cs(m, 0.0, 1.0, 0.05);
        double width200 = 0.0, width1000 = 0.0;
        for (int n = 1; n <= 1000; ++n) {
            cs.update(0.7);
            ConfidenceInterval ci = cs.current();
            CHECK(ci.lower <= 0.7);
            CHECK(ci.upper >= 0.7);
            if (n == 200) width200 = ci.upper - ci.lower;
            if (n == 1000) width1000 = ci.upper - ci.lower;
        }
        CHECK(width1000 < width200);
    }
}

TEST_CASE("a-bentkus intervals are nested") {
    SplitRng rng(3);
    ConfSeq cs(Method::a_bentkus, 0.0, 1.0, 0.05);
    double lo = 0.0, hi = 1.0;
    for (int n = 1; n <= 2000; ++n) {
        cs.update(rng.bernoulli(0.3) ? 1.0 : 0.0);
        ConfidenceInterval ci = cs.current();
        CHECK(ci.lower >= lo - 1e-15);
        CHECK(ci.upper <= hi + 1e-15);
        CHECK(ci.lower <= ci.upper);
        lo = ci.lower;
        hi = ci.upper;
    }
}

TEST_CASE("hoeffding bound values") {
    CHECK(hoeffding_bound(std::exp(-2.0), 1, 1.0) == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(hoeffding_bound(0.05, 100, 1.0) ==
          Catch::Approx(std::sqrt(50.0 * std::log(20.0))).epsilon(1e-12));
    CHECK(hoeffding_bound(0.05, 100, 2.0) ==
          Catch::Approx(2.0 * hoeffding_bound(0.05, 100, 1.0)).epsilon(1e-12));
}

TEST_CASE("adaptive hoeffding bound values") {
    double expect = std::sqrt(0.6 * 100.0 * std::log(std::log(100.0) / std::log(1.1) + 1.0) +
                              100.0 * std::log(12.0 / 0.05) / 1.8);
    CHECK(adaptive_hoeffding_bound(0.05, 100, 1.0) == Catch::Approx(expect).epsilon(1e-12));
    CHECK(expect == Catch::Approx(23.2).margin(0.1));
    CHECK(adaptive_hoeffding_bound(0.05, 1, 1.0) == adaptive_hoeffding_bound(0.05, 2, 1.0));
    double prev = 0.0;
    for (long long n = 2; n <= 100000; n = n * 3 / 2 + 1) {
        double b = adaptive_hoeffding_bound(0.05, n, 1.0);
        CHECK(b >= prev);
        prev = b;
    }
}

TEST_CASE("bernstein bound values and dominance by bentkus quantile") {
    CHECK(bernstein_bound(1.0 - 1e-15, 10, 0.3, 1.0) == Catch::Approx(0.0).margin(1e-6));
    double L = std::log(1.0 / 0.05);
    CHECK(bernstein_bound(0.05, 100, 0.3, 1.0) ==
          Catch::Approx(std::sqrt(2.0 * 100.0 * 0.09 * L + L * L / 9.0) + L / 3.0)
              .epsilon(1e-12));
    for (long long n : {1LL, 10LL, 100LL, 1000LL}) {
        for (double d : {0.2, 0.05, 0.001}) {
            double q = bentkus_quantile(d, n, BentkusParams(0.3, 1.0));
            CHECK(q <= bernstein_bound(d, n, 0.3, 1.0));
        }
    }
}

TEST_CASE("empirical bernstein bound shape") {
    StitchConfig cfg;
    Epoch ep = epoch(100, cfg.eta);
    double h = cfg.zeta_c * std::pow(static_cast<double>(ep.k) + 1.0, cfg.power);
    double l = std::log(3.0 * h / (2.0 * 0.05));
    CHECK(empirical_bernstein_bound(0.05, 100, 0.0, 1.0, cfg) ==
          Catch::Approx(3.0 * cfg.eta * l).epsilon(1e-12));
    CHECK(empirical_bernstein_bound(0.05, 100, 0.09, 1.0, cfg) ==
          Catch::Approx(std::sqrt(2.0 * 100.0 * cfg.eta * 0.09 * l) + 3.0 * cfg.eta * l)
              .epsilon(1e-12));
}

TEST_CASE("anytime coverage at moderate scale") {
    for (double p : {0.1, 0.5}) {
        for (Method m : kAnytime) {
            int miss = 0;
            const int reps = 100;
            for (int r = 0; r < reps; ++r) {
                SplitRng rng = SplitRng(17).split(static_cast<std::uint64_t>(r),
                                                  static_cast<std::uint64_t>(p * 100));
                ConfSeq cs(m, 0.0, 1.0, 0.05);
                bool bad = false;
                for (int n = 0; n < 1500; ++n) {
                    cs.update(rng.bernoulli(p) ? 1.0 : 0.0);
                    ConfidenceInterval ci = cs.current();
                    if (p < ci.lower || p > ci.upper) {
                        bad = true;
                        break;
                    }
                }
                miss += bad ? 1 : 0;
            }
            CHECK(static_cast<double>(miss) / reps <= 0.05);
        }
    }
}

TEST_CASE("a-bentkus is scale equivariant") {
    const double a = 2.5, b = -1.0;
    SplitRng rng(23);
    std::vector<double> ys;
    for (int i = 0; i < 400; ++i) ys.push_back(rng.uniform());
    ConfSeq base(Method::a_bentkus, 0.0, 1.0, 0.05);
    ConfSeq mapped(Method::a_bentkus, b, a + b, 0.05);
    for (double y : ys) {
        base.update(y);
        mapped.update(a * y + b);
        ConfidenceInterval u = base.current(), v = mapped.current();
        CHECK(v.lower == Catch::Approx(a * u.lower + b).margin(1e-9));
        CHECK(v.upper == Catch::Approx(a * u.upper + b).margin(1e-9));
    }
}

TEST_CASE("seeded width comparison on a Bernoulli path") {
    SplitRng rng(1234);
    ConfSeq ab(Method::a_bentkus, 0.0, 1.0, 0.05);
    ConfSeq eb(Method::e_bernstein, 0.0, 1.0, 0.05);
    for (int n = 1; n <= 2000; ++n) {
        double y = rng.bernoulli(0.1) ? 1.0 : 0.0;
        ab.update(y);
        eb.update(y);
        if (n >= 20) {
            ConfidenceInterval a = ab.current(), e = eb.current();
            CHECK(a.upper - a.lower <= e.upper - e.lower + 1e-12);
        }
    }
}
