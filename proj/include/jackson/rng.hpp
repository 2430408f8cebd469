#pragma once

#include <cmath>
#include <cstdint>

namespace jackson {

/// splitmix64 step (Steele, Lea & Flood; Vigna's fixed-increment variant).
constexpr std::uint64_t splitmix64_scramble(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seedable 64-bit generator. Deterministic across platforms: every draw is
/// pure integer arithmetic plus an explicit 53-bit mantissa conversion.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return splitmix64_scramble(state_);
    }

    /// Uniform in [0, 1).
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Exponential with the given rate; next_double() == 0 maps to 0.
    double next_exponential(double rate) { return -std::log1p(-next_double()) / rate; }

private:
    std::uint64_t state_;
};

enum class StreamKind : std::uint64_t {
    arrival = 1,   // exogenous interarrival times for one queue
    service = 2,   // service times for one queue
    routing = 3,   // routing decisions for one queue
};

/// Independently derived substream. Keying each (replication, kind, queue)
/// separately means perturbing one queue's rates never shifts another
/// queue's sample path (common random numbers across scenarios).
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t replication, StreamKind kind,
                            std::uint64_t queue) {
    std::uint64_t h = splitmix64_scramble(seed + 0x9E3779B97F4A7C15ULL);
    h = splitmix64_scramble(h ^ (replication * 0xD1B54A32D192ED03ULL + 0x2545F4914F6CDD1DULL));
    h = splitmix64_scramble(h ^ (static_cast<std::uint64_t>(kind) * 0x9E6C63D0876A9A35ULL));
    h = splitmix64_scramble(h ^ (queue * 0xBF58476D1CE4E5B9ULL + 0x94D049BB133111EBULL));
    return SplitMix64(h);
}

}  // namespace jackson
