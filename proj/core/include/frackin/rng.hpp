#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace frackin {

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// SplitMix64 whose whole state is (key, counter): stream position is explicit,
// so a substream can be resumed or replayed from two integers.
struct CounterRng {
    using result_type = std::uint64_t;
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    std::uint64_t key = 0;
    std::uint64_t counter = 0;

    CounterRng() = default;
    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t pos = 0)
        : key(splitmix64_mix(seed ^ splitmix64_mix(stream + kGamma))), counter(pos) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type(0); }
    result_type operator()() { return splitmix64_mix(key + (++counter) * kGamma); }

    // (0,1), never 0 so logs are safe
    double uniform() { return ((*this)() >> 11) * 0x1.0p-53 + 0x1.0p-54; }
    double exponential(double rate) { return -std::log(uniform()) / rate; }
    double normal() {
        const double u1 = uniform(), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
};

}  // namespace frackin
