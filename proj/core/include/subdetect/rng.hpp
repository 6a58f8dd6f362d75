#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace subdetect {

/// Counter-splittable pseudo-random stream (xoshiro256++ seeded through
/// splitmix64). Streams derived from the same (seed, ids...) are identical
/// regardless of execution order, so Monte Carlo trials can run on any
/// number of threads and still reproduce bit-identical results.
class RngStream {
public:
    RngStream() : RngStream(0) {}
    explicit RngStream(std::uint64_t seed) { reseed(seed); }

    /// Stream keyed by a seed plus an arbitrary list of stream ids
    /// (experiment tag, grid index, trial index, ...).
    static RngStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> ids);

    /// Child stream keyed by this stream's current state and `id`.
    /// Does not advance this stream.
    RngStream split(std::uint64_t id) const;

    std::uint64_t next_u64();

    /// Uniform on [0,1) with 53 random bits.
    double uniform01();

    /// Uniform integer in [0, n), n >= 1. Rejection sampling, no modulo bias.
    std::uint64_t uniform_below(std::uint64_t n);

    /// Standard normal deviate (Box-Muller, second value cached).
    double normal();

    /// Uniform k-subset of {1,...,n}, returned sorted ascending (Floyd).
    std::vector<int> sample_subset(int n, int k);

private:
    void reseed(std::uint64_t seed);

    std::uint64_t state_[4];
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

/// splitmix64 finalizer; used for seeding and for hashing stream ids.
std::uint64_t mix64(std::uint64_t x);

} // namespace subdetect
