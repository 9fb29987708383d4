// Deterministic random draws. The engine (mt19937_64) is fully specified by
// the standard and the variate transforms below are hand-written, so a seed
// pins the stream bit-for-bit across builds.
#pragma once

#include <cstdint>
#include <random>

namespace gergm {

class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : eng_(mix(seed, stream)) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on [0, 1).
    double uniform() { return (eng_() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1].
    double uniform_pos() { return ((eng_() >> 11) + 1) * 0x1.0p-53; }

    // Standard normal via Box-Muller (sine branch discarded; two uniforms
    // per draw keeps the stream stateless).
    double normal() {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }
    double normal(double mean, double sd) { return mean + sd * normal(); }

    bool bernoulli(double p) { return uniform() < p; }

    // Knuth product method; adequate for the modest rates used here.
    int poisson(double rate) {
        const double limit = std::exp(-rate);
        double prod = 1.0;
        int k = -1;
        do {
            prod *= uniform_pos();
            ++k;
        } while (prod > limit && k < 10000000);
        return k;
    }

    // Uniform integer on [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection to kill modulo bias.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }

  private:
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
        // splitmix64 finalizer over (seed, stream).
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 eng_;
};

}  // namespace gergm
