#pragma once

#include <cmath>
#include <cstdint>

namespace aclab {

// Self-contained xoshiro256++ generator. The standard library distributions are
// implementation-defined, so everything that lands in an output file goes
// through this generator to keep runs bit-reproducible. Per-realization streams
// are derived as hash(seed, stream_index); that derivation is part of the file
// format contract and must not change.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& s : state_) s = splitmix64(x);
        have_normal_ = false;
        cached_normal_ = 0.0;
    }

    static std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ULL * (index + 1));
        return mix(mix(x) + 0x94D049BB133111EBULL);
    }

    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        return Rng(derive_stream_seed(seed, index));
    }

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

    // uniform in [0,1) with 53 random bits
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in (0,1], safe as a log() argument
    double uniform01_open() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

    double normal() {
        if (have_normal_) {
            have_normal_ = false;
            return cached_normal_;
        }
        const double u = uniform01_open();
        const double v = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double a = 6.283185307179586476925286766559 * v;
        cached_normal_ = r * std::sin(a);
        have_normal_ = true;
        return r * std::cos(a);
    }

    // unbiased integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0ULL - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9E3779B97F4A7C15ULL;
        return mix(x);
    }

    std::uint64_t state_[4];
    bool have_normal_;
    double cached_normal_;
};

}  // namespace aclab
