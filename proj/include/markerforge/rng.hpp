#pragma once

#include <cstdint>

namespace markerforge {

// Deterministic 64-bit generator (splitmix64). Every seeded operation in the
// library draws from this so that outputs are reproducible across platforms;
// standard-library distributions are implementation-defined and unsuitable
// for golden tests.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi].
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform integer in [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    // Independent child stream; used to decouple sub-tasks from draw order.
    Rng fork(std::uint64_t stream) {
        return Rng(next_u64() ^ (0x9E3779B97F4A7C15ull * (stream + 1)));
    }

private:
    std::uint64_t state_;
};

} // namespace markerforge
