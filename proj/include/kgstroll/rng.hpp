#pragma once

#include <cstdint>

namespace kgstroll {

// Deterministic per-stream random source (xoshiro256** seeded via splitmix64).
// Identical (seed, stream_id) pairs yield identical draw sequences on every
// platform; std engines/distributions are avoided since libstdc++ and libc++
// disagree on their outputs.
class RandomSource {
public:
    explicit RandomSource(uint64_t seed, uint64_t stream_id = 0) {
        uint64_t x = seed ^ (0x9e3779b97f4a7c15ull * (stream_id + 1));
        for (auto& s : state_) s = splitmix64(x);
        // All-zero state is invalid for xoshiro.
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    uint64_t next_u64() {
        uint64_t result = rotl(state_[1] * 5, 7) * 9;
        uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1).
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [0, bound) without modulo bias worth worrying about at
    // desk-scale bounds (Lemire-style rejection kept simple).
    uint64_t next_below(uint64_t bound) {
        if (bound <= 1) return 0;
        uint64_t threshold = (~bound + 1) % bound;  // 2^64 mod bound
        while (true) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

private:
    uint64_t state_[4];

    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static uint64_t splitmix64(uint64_t& x) {
        uint64_t z = (x += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
};

}  // namespace kgstroll
