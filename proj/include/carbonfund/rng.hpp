#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace carbonfund {

// Counter-based generator: Philox4x32 with 10 rounds. Each (key, counter)
// pair maps to an independent 128-bit block, so parallel workers can draw
// from disjoint, reproducible streams without sharing mutable state.
//
// Stream layout: the high counter words (c2, c3) carry a structured 64-bit
// stream id and the low words (c0, c1) count blocks within the stream.
// Stream ids are composed from bit fields (purpose | scenario | node), never
// hashed, so distinct sampling sites cannot collide.
class Philox {
  public:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    Philox(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_lo_(static_cast<std::uint32_t>(stream)),
          stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> c,
                                              std::array<std::uint32_t, 2> k) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
            c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0],
                 static_cast<std::uint32_t>(p1),
                 static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1],
                 static_cast<std::uint32_t>(p0)};
            k[0] += kWeyl0;
            k[1] += kWeyl1;
        }
        return c;
    }

    // Two doubles in (0,1) per 128-bit block: u64 -> 53-bit mantissa, offset
    // by half an ulp so 0 and 1 are never returned.
    double uniform() {
        if (have_spare_uniform_) {
            have_spare_uniform_ = false;
            return spare_uniform_;
        }
        const auto out = block({static_cast<std::uint32_t>(ctr_),
                                static_cast<std::uint32_t>(ctr_ >> 32), stream_lo_, stream_hi_},
                               key_);
        ++ctr_;
        const auto lo = static_cast<std::uint64_t>(out[0]) | (static_cast<std::uint64_t>(out[1]) << 32);
        const auto hi = static_cast<std::uint64_t>(out[2]) | (static_cast<std::uint64_t>(out[3]) << 32);
        spare_uniform_ = to_unit(hi);
        have_spare_uniform_ = true;
        return to_unit(lo);
    }

    // Standard normals via Box-Muller; the sine partner is cached.
    double normal() {
        if (have_spare_normal_) {
            have_spare_normal_ = false;
            return spare_normal_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * std::numbers::pi * u2;
        spare_normal_ = rad * std::sin(ang);
        have_spare_normal_ = true;
        return rad * std::cos(ang);
    }

  private:
    static double to_unit(std::uint64_t u) {
        return (static_cast<double>(u >> 11) + 0.5) * 0x1.0p-53;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_lo_;
    std::uint32_t stream_hi_;
    std::uint64_t ctr_ = 0;
    double spare_uniform_ = 0.0;
    double spare_normal_ = 0.0;
    bool have_spare_uniform_ = false;
    bool have_spare_normal_ = false;
};

// Sampling sites, placed in the top byte of the stream id.
enum class StreamPurpose : std::uint64_t {
    carbon = 1,        // exogenous carbon driver of the outer fund path
    fund = 2,          // conditional fund innovations on the outer path
    terminal = 3,      // fresh terminal innovation of the one-step scheme
    lifetime = 4,      // policyholder death times
    subpath = 5,       // inner carbon sub-paths of the hedge ratio
    premium = 6,       // dedicated premium valuation run
    chain = 7,         // chain jump clocks
    scratch = 8,       // test-local draws
};

// stream id = purpose | scenario | node. Scenario indexes the outer Monte
// Carlo replication (or hedge scenario), node the grid point or inner site.
inline std::uint64_t stream_id(StreamPurpose purpose, std::uint64_t scenario = 0,
                               std::uint64_t node = 0) {
    return (static_cast<std::uint64_t>(purpose) << 56) | ((scenario & 0xFFFFFFFFull) << 24) |
           (node & 0xFFFFFFull);
}

// Decorrelated child seed, used when a subsystem needs its own master seed
// (e.g. the premium valuation shared by every hedge scenario).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace carbonfund
