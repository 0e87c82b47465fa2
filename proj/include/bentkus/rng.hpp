#pragma once

// Deterministic splittable random streams for reproducible experiments.
//
// Generator: SplitMix64. State advances by the golden-ratio increment
// 0x9E3779B97F4A7C15; each output passes through the mix64 finalizer
// (xor-shift 30 / multiply 0xBF58476D1CE4E5B9 / xor-shift 27 / multiply
// 0x94D049BB133111EB / xor-shift 31). Substreams are derived by folding ids
// into the seed with the same finalizer: child(seed, id) = mix64(mix64(seed)
// ^ mix64(id + increment)). Uniform doubles take the top 53 bits:
// (next() >> 11) * 2^-53. This is enough to reimplement the streams
// bit-for-bit in another language.

#include <cstdint>
#include <initializer_list>

namespace bentkus {

class SplitRng {
  public:
    explicit SplitRng(std::uint64_t seed) : state_(seed) {}

    static std::uint64_t mix64(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t next() {
        state_ += kIncrement;
        return mix64(state_);
    }

    // Independent child stream identified by one or more integer ids.
    SplitRng split(std::initializer_list<std::uint64_t> ids) const {
        std::uint64_t s = mix64(state_);
        for (std::uint64_t id : ids) s = mix64(s ^ mix64(id + kIncrement));
        return SplitRng(s);
    }

    SplitRng split(std::uint64_t id) const { return split({id}); }
    SplitRng split(std::uint64_t a, std::uint64_t b) const { return split({a, b}); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Mean of m independent Bernoulli(p) draws, scaled into [0, 1].
    double bernoulli_average(double p, int m) {
        int s = 0;
        for (int i = 0; i < m; ++i) s += bernoulli(p) ? 1 : 0;
        return static_cast<double>(s) / static_cast<double>(m);
    }

  private:
    static constexpr std::uint64_t kIncrement = 0x9E3779B97F4A7C15ULL;
    std::uint64_t state_;
};

}  // namespace bentkus
