#include "teng/rng.hpp"

#include <cmath>

namespace teng {

namespace {

// splitmix64 finalizer; statistically solid for simulation use.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

std::uint64_t RngState::next_u64() {
    return mix64(key ^ mix64(counter++));
}

double RngState::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngState::next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
}

double RngState::next_normal() {
    // Box-Muller; u1 kept away from 0 so log() stays finite.
    double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

std::uint64_t RngState::next_below(std::uint64_t n) {
    // rejection sampling over the largest multiple of n below 2^64
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
    std::uint64_t v = next_u64();
    while (v > limit) v = next_u64();
    return v % n;
}

RngState fork_stream(const RngState& base, std::uint64_t stream_id) {
    return RngState{mix64(base.key ^ mix64(stream_id ^ 0xa5a5a5a5deadbeefULL)), 0};
}

} // namespace teng
