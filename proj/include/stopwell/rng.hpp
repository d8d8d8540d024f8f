// Counter-based random numbers.
//
// Every Monte-Carlo sample owns an independent substream addressed by
// (seed, stream_id, sample index), so results do not depend on how samples are
// distributed over threads.
#pragma once

#include <array>
#include <cstdint>
#include <optional>

namespace stopwell {

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    /// A distinct stream for a sub-task (e.g. a grid node) of this stream.
    RngStream child(std::uint64_t index) const {
        return {seed, splitmix64(stream_id ^ splitmix64(index + 0x632be59bd9b4e019ULL))};
    }
};

/// Sequential draws for one sample of one stream.
class CounterRng {
public:
    CounterRng(const RngStream& stream, std::uint64_t sample_index);

    std::uint32_t next_u32();
    /// Uniform on the open interval (0,1) with 53-bit resolution.
    double uniform();
    double normal();
    double exponential(double rate);

private:
    void refill();

    std::array<std::uint32_t, 2> key_{};
    std::array<std::uint32_t, 4> counter_{};
    std::array<std::uint32_t, 4> block_{};
    int used_ = 4;
    std::optional<double> spare_normal_;
};

/// Seed precedence: explicit flag, then STOPWELL_SEED, then the built-in default.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag);

inline constexpr std::uint64_t kDefaultSeed = 20240917ULL;

}  // namespace stopwell
