#pragma once

#include <cmath>
#include <cstdint>

namespace mfct {

// SplitMix64. All randomness in the simulator flows through this generator
// so that runs are bit-reproducible across compilers and platforms; the
// standard <random> distributions are implementation-defined and would
// break the determinism contract.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

// Stateless 64-bit mix for deriving independent stream seeds from
// (seed, tag) pairs. Streams keyed by node id, request id, epoch, etc.
// stay decoupled: consuming extra draws from one stream never perturbs
// another.
inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    SplitMix64 g(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
    g.next();
    return g.next();
}

class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_.next(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(gen_.next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    // Uniform integer in [0, n); n > 0. Modulo bias is negligible for the
    // small n used here (node counts).
    std::uint64_t below(std::uint64_t n) { return gen_.next() % n; }

    // Standard normal via Box-Muller (deterministic, portable).
    double gaussian() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.28318530717958647692 * u2);
    }

private:
    SplitMix64 gen_;
};

// Disjoint tag spaces keep the simulator's random streams independent.
namespace tags {
inline constexpr std::uint64_t kTopology = 0x544f504f00000000ULL;
inline constexpr std::uint64_t kNodeStream = 0x4e4f444500000000ULL;
inline constexpr std::uint64_t kPhit = 0x5048495400000000ULL;
inline constexpr std::uint64_t kAblation = 0xab1a7e0000000000ULL;
inline constexpr std::uint64_t kShadow = 0x5348444f00000000ULL;
}  // namespace tags

inline Rng derive_stream(std::uint64_t seed, std::uint64_t tag) {
    return Rng(mix64(seed, tag));
}

inline Rng derive_stream(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b) {
    return Rng(mix64(mix64(seed, tag_a), tag_b));
}

// One-shot uniform draw keyed by (seed, tag): used for per-request
// Bernoulli decisions so that the outcome for a request is independent of
// processing order.
inline double hash_u01(std::uint64_t seed, std::uint64_t tag) {
    return static_cast<double>(mix64(seed, tag) >> 11) * 0x1.0p-53;
}

}  // namespace mfct
