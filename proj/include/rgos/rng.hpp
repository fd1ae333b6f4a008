#pragma once

#include <cstdint>
#include "rgos/types.hpp"

namespace rgos {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

/// Seeded, jumpable random stream (PCG, 128-bit state, XSL-RR output).
/// Identical (seed, stream_id) reproduce identical sequences; distinct
/// stream_ids select distinct LCG increments and are independent.
class RngStream {
  public:
    RngStream() : RngStream(0, 0) {}

    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id) {
        std::uint64_t s = seed;
        u128 hi = detail::splitmix64(s);
        u128 lo = detail::splitmix64(s);
        std::uint64_t t = stream_id ^ 0xda3e39cb94b95bdbULL;
        u128 ihi = detail::splitmix64(t);
        u128 ilo = detail::splitmix64(t);
        inc_ = ((ihi << 64) | ilo) | 1;  // increment must be odd
        state_ = 0;
        next_u64();
        state_ += (hi << 64) | lo;
        next_u64();
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64() {
        state_ = state_ * mult() + inc_;
        std::uint64_t xored = static_cast<std::uint64_t>(state_ >> 64) ^
                              static_cast<std::uint64_t>(state_);
        unsigned rot = static_cast<unsigned>(state_ >> 122);
        return (xored >> rot) | (xored << ((64u - rot) & 63u));
    }

    /// Uniform draw in the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform draw in [0, 1); used for accept/reject thresholds.
    double uniform_halfopen() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Derived stream, independent of this one and of other indices.
    RngStream substream(std::uint64_t index) const {
        std::uint64_t t = stream_id_ ^ (0x9e3779b97f4a7c15ULL * (index + 1));
        return RngStream(seed_, detail::splitmix64(t));
    }

  private:
    using u128 = unsigned __int128;
    static constexpr u128 mult() {
        return (u128(0x2360ed051fc65da4ULL) << 64) | 0x4385df649fccf645ULL;
    }

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    u128 state_;
    u128 inc_;
};

}  // namespace rgos
