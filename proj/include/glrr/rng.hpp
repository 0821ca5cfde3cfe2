#ifndef GLRR_RNG_HPP
#define GLRR_RNG_HPP

#include <cstdint>

namespace glrr
{

///
/// SplitMix64 (Steele, Lea, Flood). Small, seedable and identical on every
/// platform. Stream splitting: replication k of a run seeded with s uses
/// SplitMix64(SplitMix64(s ^ k).next()).
///
class SplitMix64
{
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : m_state(seed) {}

    std::uint64_t next() noexcept
    {
        std::uint64_t z = (m_state += 0x9E3779B97F4A7C15ULL);
        z               = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z               = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) noexcept
    {
        return SplitMix64(seed ^ stream).next();
    }

private:
    std::uint64_t m_state;
};

} // namespace glrr

#endif
