#include "regcop/rng.hpp"

namespace regcop {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo)
{
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

} // namespace

PhiloxBlock philox4x32_10(PhiloxBlock ctr, PhiloxKey key) noexcept
{
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

std::uint64_t RngStream::bits(std::uint64_t index) const noexcept
{
    // Each Philox block yields two 64-bit outputs.
    const std::uint64_t block = index >> 1;
    const PhiloxBlock counter = {
        static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
        static_cast<std::uint32_t>(substream_), static_cast<std::uint32_t>(substream_ >> 32)};
    const PhiloxKey key = {static_cast<std::uint32_t>(seed_),
                           static_cast<std::uint32_t>(seed_ >> 32)};
    const PhiloxBlock out = philox4x32_10(counter, key);
    const std::size_t half = (index & 1u) * 2;
    return (static_cast<std::uint64_t>(out[half]) << 32) | out[half + 1];
}

double RngStream::uniform(std::uint64_t index) const noexcept
{
    constexpr double kScale = 1.0 / 9007199254740992.0; // 2^-53
    return (static_cast<double>(bits(index) >> 11) + 0.5) * kScale;
}

double RngStream::normal(std::uint64_t index) const
{
    return norm_inv_cdf(uniform(index));
}

std::vector<double> draw_normal(const RngStream& stream, const NormalParams& p, std::size_t n)
{
    if (n == 0) {
        throw DomainError("draw_normal needs n >= 1");
    }
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = p.mean() + p.std() * stream.normal(k);
    }
    return out;
}

} // namespace regcop
