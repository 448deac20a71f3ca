#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace superres {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// A stream is identified by a 64-bit key and three fixed counter words; the
/// remaining counter word indexes successive 128-bit blocks. Streams with
/// different (key, counter) never overlap, so trials can be generated in any
/// order on any thread. Satisfies UniformRandomBitGenerator.
class Philox4x32 {
public:
    using result_type = std::uint32_t;
    using counter_type = std::array<std::uint32_t, 4>;
    using key_type = std::array<std::uint32_t, 2>;

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    Philox4x32(std::uint64_t seed, std::uint32_t c1, std::uint32_t c2, std::uint32_t c3)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, ctr_{0, c1, c2, c3} {}

    result_type operator()() {
        if (pos_ == 4) {
            block_ = generate(ctr_, key_);
            ++ctr_[0];
            pos_ = 0;
        }
        return block_[pos_++];
    }

    /// One application of the bijection: 10 rounds with key schedule.
    static counter_type generate(counter_type ctr, key_type key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

    key_type key_;
    counter_type ctr_;
    counter_type block_{};
    int pos_ = 4;
};

}  // namespace superres
