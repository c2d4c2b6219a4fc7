#pragma once

#include <cstdint>

namespace pressurelab {

/// Counter-based pseudo-random stream. Output t of stream (seed, stream_id)
/// is the SplitMix64 finalizer applied to key + t * GOLDEN, with
/// key = mix(mix(seed) ^ mix(stream_id ^ GOLDEN)). Streams are splittable by
/// construction: draws depend only on (seed, stream_id, counter), so orbit
/// substreams are order-independent and safe to generate concurrently.
/// The exact scheme is fixed so ports in other languages can reproduce
/// summary statistics.
class CounterRng {
public:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    CounterRng(std::uint64_t seed, std::uint64_t stream_id)
        : key_(mix(mix(seed + kGolden) ^ mix(stream_id ^ kGolden))) {}

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGolden); }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace pressurelab
