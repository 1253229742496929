#pragma once

#include <cmath>
#include <cstdint>

namespace lwi {

// splitmix64 generator. Chosen over <random> engines because every draw is a
// handful of integer ops with no implementation-defined distribution code, so
// streams are reproducible across standard libraries and platforms.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). Modulo bias is irrelevant at our draw counts.
    uint64_t uniform_u64(uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    // Box-Muller, one value per call (no cached spare, keeps state linear in draws).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double lognormal(double mu, double sigma) { return std::exp(mu + sigma * normal()); }

    // Sum of 12 uniforms minus 6: near-Gaussian using only + and *, so the
    // stream is bit-identical in any IEEE-754 environment.
    double gauss12() {
        double s = 0.0;
        for (int i = 0; i < 12; ++i) s += uniform();
        return s - 6.0;
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    uint64_t state_;
};

// Derive an independent stream for a labelled sub-task.
inline uint64_t derive_seed(uint64_t seed, uint64_t salt) {
    Rng r(seed ^ (0x9E3779B97F4A7C15ULL * (salt + 1)));
    return r.next_u64();
}

} // namespace lwi
