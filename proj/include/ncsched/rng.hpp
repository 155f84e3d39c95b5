#pragma once

#include <cstdint>
#include <random>

namespace ncsched {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Maps 64 random bits to [0, 1) with 53-bit resolution.
inline constexpr double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Independent random streams carved from one master seed, so that the
/// scheduler under test never perturbs the arrival or channel sample path.
enum class Stream : std::uint64_t { arrivals = 1, channel = 2, lps = 3, fading = 4 };

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    static Rng stream(std::uint64_t master_seed, Stream s) {
        return Rng(splitmix64(master_seed) ^ splitmix64(static_cast<std::uint64_t>(s) << 32));
    }

    double uniform() { return to_unit(engine_()); }
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace ncsched
