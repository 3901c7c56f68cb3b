#pragma once

#include <cstdint>

namespace minangle {

// splitmix64 finalizer; good avalanche, cheap, dependency-free.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Counter-based stream: the value sequence depends only on (seed, key),
// never on how many other streams were drawn from. Local resampling of a
// mesh patch therefore reproduces bit-identically regardless of the order
// in which other patches were resampled.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t key)
        : state_(mix64(seed ^ mix64(key ^ 0x6a09e667f3bcc908ull))) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

}  // namespace minangle
