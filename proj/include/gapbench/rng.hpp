#pragma once

#include <array>
#include <cstdint>

namespace gapbench {

// Philox4x32-10 counter-based generator. Streams are cheap to derive from
// integer labels, so every (seed, N, trial) tuple gets an independent,
// order-free stream and parallel runs stay bit-reproducible.
struct Philox4x32 {
    static constexpr std::uint32_t M0 = 0xD2511F53u;
    static constexpr std::uint32_t M1 = 0xCD9E8D57u;
    static constexpr std::uint32_t W0 = 0x9E3779B9u;
    static constexpr std::uint32_t W1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += W0;
            key[1] += W1;
        }
        return ctr;
    }
};

// Stream of uniforms over a fixed (seed, stream-label) pair.
class Rng {
  public:
    Rng(std::uint64_t seed, std::uint64_t s0 = 0, std::uint64_t s1 = 0, std::uint64_t s2 = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          base_{static_cast<std::uint32_t>(s0),
                static_cast<std::uint32_t>((s0 >> 32) ^ s1),
                static_cast<std::uint32_t>(s1 ^ (s2 << 16)),
                0} {}

    std::uint32_t next_u32() {
        if (have_ == 0) refill();
        return buf_[--have_];
    }

    std::uint64_t next_u64() {
        const std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // Uniform on [0,1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * next_double(); }

    // Uniform over {0,...,n-1}, rejection sampled so there is no modulo bias.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = n * ((~0ull) / n);
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % n;
    }

    int sign() { return (next_u32() & 1u) ? 1 : -1; }

  private:
    void refill() {
        std::array<std::uint32_t, 4> ctr = base_;
        ctr[3] = static_cast<std::uint32_t>(counter_);
        ctr[2] ^= static_cast<std::uint32_t>(counter_ >> 32);
        buf_ = Philox4x32::block(ctr, key_);
        have_ = 4;
        ++counter_;
    }

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> base_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int have_ = 0;
};

}  // namespace gapbench
