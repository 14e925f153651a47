#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace fdtwrc {

/// Seeded random stream used everywhere randomness is needed.
///
/// Gaussian and QPSK draws are generated explicitly (Box-Muller over the
/// mt19937_64 integer stream) so that a given seed produces the same values
/// on every platform, independent of the standard library's distribution
/// implementations.
class RandomStream {
   public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed), seed_tag_(seed) {}

    /// Uniform double in (0, 1].
    double uniform() {
        const std::uint64_t r = engine_();
        return (static_cast<double>(r >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard real Gaussian.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * std::numbers::pi * u2;
        spare_ = mag * std::sin(ang);
        have_spare_ = true;
        return mag * std::cos(ang);
    }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = 1.
    std::complex<double> complex_gaussian() {
        constexpr double k = 0.7071067811865476;  // 1/sqrt(2)
        const double re = gaussian();
        const double im = gaussian();
        return {k * re, k * im};
    }

    /// Unit-power QPSK symbol, (±1 ± j)/sqrt(2).
    std::complex<double> qpsk() {
        constexpr double k = 0.7071067811865476;
        const std::uint64_t r = engine_();
        return {(r & 1u) ? k : -k, (r & 2u) ? k : -k};
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Derives an independent child stream; used to give each Monte-Carlo
    /// cell its own reproducible stream.
    RandomStream fork(std::uint64_t salt) const {
        return RandomStream(mix(seed_tag_, salt));
    }

    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        // splitmix64 finalizer over the combined words
        std::uint64_t x = a + 0x9e3779b97f4a7c15ULL * (b + 1);
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebULL;
        x ^= x >> 31;
        return x;
    }

   private:
    std::mt19937_64 engine_;
    std::uint64_t seed_tag_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace fdtwrc
