#include "mopp/rng.hpp"

#include <cmath>

namespace mopp {

namespace {

std::uint64_t poisson_inversion(RngStream& rng, double mean) {
    // Sequential search through the CDF; one uniform per draw.
    const double u = rng.next_unit();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    const std::uint64_t cap = 200 + static_cast<std::uint64_t>(20.0 * mean);
    while (u > cdf && k < cap) {
        ++k;
        p *= mean / static_cast<double>(k);
        cdf += p;
    }
    return k;
}

std::uint64_t poisson_ptrs(RngStream& rng, double mean) {
    // Transformed rejection with squeeze (Hormann 1993), valid for mean >= 10.
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = rng.next_unit() - 0.5;
        const double v = rng.next_unit_open();
        const double us = 0.5 - std::abs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r && kf >= 0.0) return static_cast<std::uint64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        const double k = kf;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            k * loglam - mean - std::lgamma(k + 1.0)) {
            return static_cast<std::uint64_t>(kf);
        }
    }
}

}  // namespace

std::uint64_t poisson_draw(RngStream& rng, double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson_draw: mean must be nonnegative");
    if (mean == 0.0) return 0;
    if (mean < 30.0) return poisson_inversion(rng, mean);
    return poisson_ptrs(rng, mean);
}

}  // namespace mopp
