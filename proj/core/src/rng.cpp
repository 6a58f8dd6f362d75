#include "subdetect/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace subdetect {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void RngStream::reseed(std::uint64_t seed) {
    // splitmix64 sequence; guarantees a nonzero xoshiro state.
    std::uint64_t s = seed;
    for (auto& word : state_) {
        s += 0x9e3779b97f4a7c15ULL;
        word = mix64(s);
    }
    has_cached_normal_ = false;
}

RngStream RngStream::derive(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
    std::uint64_t h = mix64(seed);
    for (std::uint64_t id : ids) h = mix64(h ^ (id + 0x9e3779b97f4a7c15ULL));
    return RngStream(h);
}

RngStream RngStream::split(std::uint64_t id) const {
    std::uint64_t h = state_[0];
    for (int i = 1; i < 4; ++i) h = mix64(h ^ state_[i]);
    return RngStream(mix64(h ^ (id + 0x9e3779b97f4a7c15ULL)));
}

std::uint64_t RngStream::next_u64() {
    // xoshiro256++
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RngStream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x > limit);
    return x % n;
}

double RngStream::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    // u1 in (0,1] so the log is finite.
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    cached_normal_ = radius * std::sin(angle);
    has_cached_normal_ = true;
    return radius * std::cos(angle);
}

std::vector<int> RngStream::sample_subset(int n, int k) {
    if (k < 0 || n < 0 || k > n)
        throw std::invalid_argument("sample_subset: need 0 <= k <= n");
    std::vector<int> chosen;
    chosen.reserve(static_cast<std::size_t>(k));
    // Floyd's algorithm: uniform over k-subsets, O(k) memory.
    for (int j = n - k + 1; j <= n; ++j) {
        const int t = static_cast<int>(uniform_below(static_cast<std::uint64_t>(j))) + 1;
        bool seen = false;
        for (int c : chosen) {
            if (c == t) {
                seen = true;
                break;
            }
        }
        chosen.push_back(seen ? j : t);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

} // namespace subdetect
