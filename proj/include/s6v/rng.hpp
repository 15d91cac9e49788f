#pragma once

#include <cstdint>

namespace s6v {

inline constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Counter-based stream: the n-th output is a pure function of (key, n), and the
// key is derived from (seed, replica). Replicas never share state.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t replica) noexcept
        : key_(splitmix64(seed ^ splitmix64(replica + 0x632BE59BD9B4E019ull))) {}

    std::uint64_t next() noexcept { return splitmix64(key_ + 0xD1B54A32D192ED03ull * ++counter_); }
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    std::uint64_t counter() const noexcept { return counter_; }

    // Integer threshold t with P(next() < t) == p up to 2^-64.
    static std::uint64_t threshold(double p) noexcept {
        if (p <= 0.0) return 0;
        if (p >= 1.0) return ~0ull;
        return static_cast<std::uint64_t>(p * 0x1.0p64);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace s6v
