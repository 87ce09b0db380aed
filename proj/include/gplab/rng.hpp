#pragma once

#include <array>
#include <cstdint>

namespace gplab {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Stateless: the output block is a pure function of (counter, key), so any
/// value in a Monte Carlo ensemble can be regenerated from its indices alone.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static constexpr Counter generate(Counter ctr, Key key)
    {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }
};

/// Addresses one random stream: (master seed, L index, sample index, purpose).
/// Draw `i` of the stream is a single Philox block keyed by the seed.
class CounterStream {
public:
    CounterStream(std::uint64_t seed, std::uint32_t l_index, std::uint32_t sample_index,
                  std::uint32_t purpose)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          l_index_(l_index), sample_index_(sample_index), purpose_(purpose)
    {
    }

    /// 64 random bits for draw i (i < 2^32).
    std::uint64_t bits(std::uint64_t i) const
    {
        auto out = Philox4x32::generate(
            {static_cast<std::uint32_t>(i), l_index_, sample_index_,
             purpose_ ^ (static_cast<std::uint32_t>(i >> 32) << 16)},
            key_);
        return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform(std::uint64_t i) const { return static_cast<double>(bits(i) >> 11) * 0x1.0p-53; }

private:
    Philox4x32::Key key_;
    std::uint32_t l_index_;
    std::uint32_t sample_index_;
    std::uint32_t purpose_;
};

/// Stream purposes, so potentials and solver start vectors never share draws.
enum StreamPurpose : std::uint32_t {
    kPotentialStream = 0,
    kStartVectorStream = 1,
    kInitialFieldStream = 2,
    kProbeStream = 3,
};

}  // namespace gplab
