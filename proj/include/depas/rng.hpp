#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace depas {

/// Derives a well-mixed 64-bit value; used to turn (seed, stream id) into an engine seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Named streams that are not tied to a single entity.
enum class StreamTag : std::uint64_t
{
    workload = 1,
    churn = 2,
    capacity = 3,
    dns = 4,
    provider = 5,
    disruption = 6,
    router = 7,
};

/// A reproducible random stream identified by (seed, stream id).
///
/// Only the engine (std::mt19937_64) comes from the standard library; the
/// variate transforms are written out so that draw sequences are identical
/// across standard-library implementations.
class RngStream
{
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream_id + 0x5851f42d4c957f2dULL)))
    {
    }

    RngStream(std::uint64_t seed, StreamTag tag)
        : RngStream(seed, (std::uint64_t{1} << 63) | static_cast<std::uint64_t>(tag))
    {
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n)
    {
        const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Exponential variate with the given mean.
    double exponential(double mean) { return -mean * std::log1p(-uniform()); }

private:
    std::mt19937_64 engine_;
};

} // namespace depas
