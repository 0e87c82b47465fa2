// Minimal usage demo: stream Bernoulli observations through three anytime
// confidence sequences and print the intervals at a few sample sizes.

#include <cstdio>

#include "bentkus/confseq.hpp"
#include "bentkus/rng.hpp"

int main() {
    using namespace bentkus;
    const double p = 0.3, delta = 0.05;
    SplitRng rng(42);
    ConfSeq ab(Method::a_bentkus, 0.0, 1.0, delta);
    ConfSeq ah(Method::a_hoeffding, 0.0, 1.0, delta);
    ConfSeq eb(Method::e_bernstein, 0.0, 1.0, delta);

    std::printf("%8s  %-22s  %-22s  %-22s\n", "n", "a-bentkus", "a-hoeffding",
                "e-bernstein");
    for (long long n = 1; n <= 10000; ++n) {
        double y = rng.bernoulli(p) ? 1.0 : 0.0;
        ab.update(y);
        ah.update(y);
        eb.update(y);
        if (n == 10 || n == 100 || n == 1000 || n == 10000) {
            auto a = ab.current(), h = ah.current(), e = eb.current();
            std::printf("%8lld  [%.4f, %.4f]      [%.4f, %.4f]      [%.4f, %.4f]\n", n,
                        a.lower, a.upper, h.lower, h.upper, e.lower, e.upper);
        }
    }
    std::printf("\ntrue mean: %.4f (all intervals should contain it)\n", p);
    return 0;
}
