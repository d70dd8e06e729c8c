#pragma once

// Counter-based random numbers. A draw is a pure function of
// (seed, stream, replicate, index), so results do not depend on the order
// in which replicates or sets are visited.

#include <array>
#include <cstdint>

namespace sigp {

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key) noexcept;

enum class Stream : std::uint32_t {
    Normals = 0,
    Design = 1,
    DemoCells = 2,
    Pairs = 3,
};

class CounterRng {
public:
    CounterRng(std::uint64_t seed, Stream stream) noexcept;

    /// Uniform on the open interval (0,1) with 53 random bits.
    double uniform(std::uint64_t replicate, std::uint64_t index) const noexcept;
    /// Standard normal by inverse CDF of uniform().
    double normal(std::uint64_t replicate, std::uint64_t index) const;
    std::uint64_t bits(std::uint64_t replicate, std::uint64_t index) const noexcept;

private:
    std::array<std::uint32_t, 2> key_;
};

/// Inverse of the standard normal CDF on (0,1).
double normal_quantile(double p);

} // namespace sigp
