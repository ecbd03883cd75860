// Deterministic, host-independent random streams. Each trial (or purpose tag)
// owns a substream derived from (master_seed, stream_id) by a splitmix64 mix;
// the generator itself is xoshiro256++. No std:: distributions are used
// anywhere, so identical seeds reproduce identical draws on every platform.
#pragma once

#include <cstdint>

namespace usd {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Identifies one substream: identical (master_seed, stream_id, consumption
// order) yields identical draws regardless of host, thread count, or process.
struct StepRandomness {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
};

class Rng {
  public:
    explicit Rng(StepRandomness sr) {
        std::uint64_t z = sr.master_seed;
        (void)splitmix64(z);
        z ^= 0xD2B74407B1CE6E93ull * (sr.stream_id + 1);
        for (auto& word : state_) word = splitmix64(z);
    }
    Rng(std::uint64_t master_seed, std::uint64_t stream_id) : Rng(StepRandomness{master_seed, stream_id}) {}

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound); unbiased via rejection.
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int s) { return (x << s) | (x >> (64 - s)); }
    std::uint64_t state_[4];
};

}  // namespace usd
