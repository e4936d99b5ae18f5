#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mopp/measure.hpp"
#include "mopp/rng.hpp"

namespace mopp {

/// Sampling specification for a Poisson random measure with homogeneous
/// mean. Atoms below cone distance r_min are never generated; tail-set
/// queries must stay at or above r_min so the truncation is bias-free.
/// With a time horizon T the mean measure is dt x dmu on [0, T] x O and
/// samples live on the product-time space.
struct PrmSpec {
    HomogeneousMeasure mean;
    double r_min = 1.0;
    std::optional<double> time_horizon;
};

/// Expected number of generated atoms, (T or 1) * sum w_k * r_min^-alpha.
double expected_count(const PrmSpec& spec);

/// Draws one PRM realization: Poisson total count, radii by inverse CDF
/// P(R > s) = (s / r_min)^-alpha, directions proportional to the angular
/// weights, times uniform on [0, T]. Unit weights; deterministic per seed.
AtomicMeasure sample_prm(const PrmSpec& spec, std::uint64_t seed);

/// Same law, built ring by ring: geometric radii from r_min * 2^(rings-1)
/// down to r_min split O into bands with independent Poisson counts, plus
/// the unbounded outer region. rings = 1 degenerates to sample_prm.
AtomicMeasure sample_prm_annuli(const PrmSpec& spec, std::uint64_t seed, int rings);

struct ScaleBy {
    double lambda = 1.0;  // > 0
};
struct NormPower {
    double beta = 1.0;  // > 0: (r, w) -> (r^beta, w) on the S factor
};
using PointTransform = std::variant<ScaleBy, NormPower>;

/// Applies the transform atom-wise, preserving weights. Both supported
/// transforms pull sets bounded away from the cone back to sets bounded
/// away from the cone, so the image of a PRM is again a PRM.
AtomicMeasure map_prm(const AtomicMeasure& n, const PointTransform& transform);

/// Transition kernel G(x, .) over a finite label set.
class MarkKernel {
public:
    using ProbFn = std::function<std::vector<double>(const Point&)>;

    static MarkKernel bernoulli(double q);
    static MarkKernel bernoulli(std::function<double(const Point&)> q);
    static MarkKernel discrete(std::vector<std::string> labels, std::vector<double> probs);
    static MarkKernel discrete(std::vector<std::string> labels, ProbFn probs);

    const std::vector<std::string>& labels() const { return labels_; }
    /// Label probabilities at a location; throws unless they sum to 1.
    std::vector<double> probs_at(const Point& x) const;

private:
    std::vector<std::string> labels_;
    ProbFn probs_;
};

/// A point process on the product of the base space with a finite mark
/// space: each atom carries a label drawn from the kernel. Label views
/// recover the sub-processes used by the thinning results.
struct MarkedMeasure {
    AtomicMeasure base;       // locations; marks align with base.atoms()
    std::vector<int> marks;   // index into labels
    std::vector<std::string> labels;

    AtomicMeasure subprocess(const std::string& label) const;
    /// Bernoulli kernels: the atoms with mark 1.
    AtomicMeasure thinned() const { return subprocess("1"); }
};

/// Marks each atom independently given the locations, k_i ~ G(x_i, .).
MarkedMeasure mark_prm(const AtomicMeasure& n, const MarkKernel& kernel, std::uint64_t seed);

}  // namespace mopp
