#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "regcop/stats.hpp"

namespace regcop {

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., Random123).
PhiloxBlock philox4x32_10(PhiloxBlock counter, PhiloxKey key) noexcept;

/// Immutable descriptor of one random substream. Draw k of a stream is a
/// pure function of (seed, substream, k), so substreams can be consumed in
/// any order and on any thread with identical results.
class RngStream {
public:
    constexpr RngStream(std::uint64_t seed, std::uint64_t substream) noexcept
        : seed_(seed), substream_(substream) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t substream() const noexcept { return substream_; }

    std::uint64_t bits(std::uint64_t index) const noexcept;
    /// Uniform on the open interval (0, 1) with 53 bits of resolution.
    double uniform(std::uint64_t index) const noexcept;
    double normal(std::uint64_t index) const;

private:
    std::uint64_t seed_;
    std::uint64_t substream_;
};

/// First n draws of the stream mapped to N(p.mean, p.std^2).
std::vector<double> draw_normal(const RngStream& stream, const NormalParams& p, std::size_t n);

} // namespace regcop
