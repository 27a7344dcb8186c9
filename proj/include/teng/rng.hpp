#pragma once

#include <cstdint>
#include <vector>

namespace teng {

// Counter-based pseudo-random generator: every output is a pure function of
// (key, counter), so streams are reproducible across platforms and can be
// serialized as two integers.
struct RngState {
    std::uint64_t key = 0;
    std::uint64_t counter = 0;

    std::uint64_t next_u64();

    // uniform in [0, 1), 53-bit resolution
    double next_double();

    // uniform in [lo, hi)
    double next_uniform(double lo, double hi);

    // standard normal (Box-Muller, two draws per call)
    double next_normal();

    // unbiased uniform integer in [0, n), n >= 1
    std::uint64_t next_below(std::uint64_t n);
};

// Creates a stream decorrelated from `base` by mixing in `stream_id`.
RngState fork_stream(const RngState& base, std::uint64_t stream_id);

} // namespace teng
