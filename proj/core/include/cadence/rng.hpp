#pragma once

#include <cmath>
#include <cstdint>

namespace cadence {

/// Portable xorshift64 generator (shift triple 13/7/17).
///
/// Produces the same sequence on every platform and language that follows the
/// same recipe, which keeps synthetic fixtures bit-reproducible. The seed is
/// scrambled once with the splitmix64 finalizer so low-entropy seeds (0, 1,
/// 2, ...) still start from a well-mixed state; an all-zero state would be a
/// fixed point of the recurrence and is remapped.
class Xorshift64 {
public:
    explicit Xorshift64(std::uint64_t seed) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        state_ = z ^ (z >> 31);
        if (state_ == 0) state_ = 0x9e3779b97f4a7c15ull;
    }

    std::uint64_t next_u64() {
        state_ ^= state_ << 13;
        state_ ^= state_ >> 7;
        state_ ^= state_ << 17;
        return state_;
    }

    /// Uniform double in [0, 1) using the top 53 bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal draw via Box-Muller, cosine branch only.
    /// Consumes exactly two uniforms per call.
    double next_gaussian() {
        double u1 = next_double();
        double u2 = next_double();
        if (u1 <= 0.0) u1 = 0x1.0p-53;  // log(0) guard
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    std::uint64_t state_;
};

}  // namespace cadence
