#pragma once

#include <array>
#include <cstdint>

namespace featlab {

/// xoshiro256** seeded through splitmix64.
///
/// The generator and both samplers below are implemented here rather than
/// taken from <random>, whose distributions are implementation-defined. Every
/// run with the same seed draws the same stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Derive an independent stream, e.g. one for embeddings and one for init.
    static Rng derive(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();

    /// Uniform in [0, 1) with 53 random bits.
    double uniform();

    /// Standard normal via the Marsaglia polar method.
    double normal();

private:
    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace featlab
