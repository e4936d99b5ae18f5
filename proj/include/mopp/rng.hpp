#pragma once

#include <cstdint>
#include <stdexcept>

namespace mopp {

// SplitMix64 finalizer (Steele/Lea/Flood). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d4a2c57f4dd03fULL;
    return z ^ (z >> 31);
}

/// Counter-based random stream. Streams are keyed by (seed, a, b, c) so that
/// replicate- and ring-level substreams are independent and reproducible
/// regardless of thread scheduling.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0,
                       std::uint64_t c = 0) noexcept {
        std::uint64_t h = mix64(seed ^ 0x5851f42d4c957f2dULL);
        h = mix64(h ^ a);
        h = mix64(h ^ b);
        h = mix64(h ^ c);
        state_ = h;
    }

    std::uint64_t next_u64() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    /// Uniform on [0, 1).
    double next_unit() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform on (0, 1]; safe as input to inverse-CDF tails.
    double next_unit_open() noexcept {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Uniform on [0, t].
    double next_range(double t) noexcept { return t * next_unit(); }

    /// Index in [0, n) proportional to the (unnormalized) weights.
    template <class Weights>
    std::size_t next_index(const Weights& w) {
        double total = 0.0;
        for (double x : w) total += x;
        if (!(total > 0.0)) throw std::invalid_argument("next_index: weights must have positive sum");
        double u = next_unit() * total;
        double acc = 0.0;
        std::size_t last = 0;
        for (std::size_t k = 0; k < w.size(); ++k) {
            acc += w[k];
            last = k;
            if (u < acc) return k;
        }
        return last;
    }

private:
    std::uint64_t state_;
};

/// Child seed for replicate / ring substreams; mixing keeps sibling streams
/// statistically independent of the parent and of each other.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                    std::uint64_t b = 0) noexcept {
    return mix64(mix64(seed ^ 0x9e3779b97f4a7c15ULL) ^ a) ^ mix64(b ^ 0xd1b54a32d192ed03ULL);
}

/// Poisson draw: sequential inversion below mean 30, Hormann's PTRS
/// transformed rejection above. Both consume the stream deterministically.
std::uint64_t poisson_draw(RngStream& rng, double mean);

}  // namespace mopp
