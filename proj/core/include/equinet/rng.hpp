#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace equinet {

/// Deterministic uniform generator. Sampling goes through explicit bit
/// arithmetic instead of std::uniform_real_distribution so that streams are
/// reproducible across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform on [0, 1).
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform on [-1, 1).
    double pm1() { return 2.0 * unit() - 1.0; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    /// Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    std::complex<double> complex_pm1() {
        double re = pm1();
        double im = pm1();
        return {re, im};
    }

private:
    std::mt19937_64 eng_;
};

} // namespace equinet
