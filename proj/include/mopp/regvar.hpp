#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "mopp/measure.hpp"
#include "mopp/rng.hpp"

namespace mopp {

enum class RadialLaw {
    pure_pareto,    // P(R > s) = s^-alpha, s >= 1
    log_perturbed,  // P(R > s) = s^-alpha (1 + log s)^gamma, gamma <= alpha
};

/// Heavy-tailed random vector X = R * w with a known tail index and a finite
/// discrete angular measure; the population underlying the regular-variation
/// and complete-convergence experiments.
class HeavyTailSampler {
public:
    HeavyTailSampler(SpaceDescriptor space, double alpha, std::vector<AngularAtom> angular,
                     RadialLaw law = RadialLaw::pure_pareto, double gamma = 0.0);

    const SpaceDescriptor& space() const { return space_; }
    double alpha() const { return alpha_; }
    RadialLaw law() const { return law_; }
    double gamma() const { return gamma_; }
    const std::vector<AngularAtom>& angular() const { return angular_; }

    /// P(R > s); equals 1 for s <= 1.
    double radial_tail(double s) const;
    /// Inverse of the radial tail: the s with P(R > s) = u, u in (0, 1].
    double radial_quantile(double u) const;

    Point draw(RngStream& rng) const;

    /// The limit measure of t P(X in b(t) . ): tail index alpha with the
    /// angular weights normalized to direction probabilities.
    HomogeneousMeasure limit_measure() const;

    /// Exact finite-t mass t * P(X / b_t in set); the finite-sample target
    /// that the limit tail_mass approximates.
    double finite_t_mass(double t, double b_t, const TailSet& set) const;

private:
    SpaceDescriptor space_;
    double alpha_;
    std::vector<AngularAtom> angular_;
    RadialLaw law_;
    double gamma_;
    std::vector<double> direction_weights_;
};

/// iid draws X_1..X_count; deterministic given the seed.
std::vector<Point> sample_vector(const HeavyTailSampler& s, std::uint64_t seed, std::size_t count);

/// Normalizing function b(t), nondecreasing with b(t) -> infinity.
class ScalingFunction {
public:
    /// b(t) = t^(1/alpha), the exact scaling for the pure Pareto radial law.
    static ScalingFunction analytic(double alpha);
    /// b(t) = radial_quantile(1/t) of the sampler's law; coincides with
    /// t^(1/alpha) for pure Pareto and carries the slowly varying correction
    /// for perturbed laws.
    static ScalingFunction analytic(const HeavyTailSampler& sampler);
    /// Sample tail quantile b(t) = inf{x : #{v_i > x}/m <= 1/t} over the
    /// cone distances of a calibration sample.
    static ScalingFunction empirical_quantile(std::vector<double> cone_distances);

    double operator()(double t) const;  // requires t >= 1

private:
    ScalingFunction() = default;

    enum class Mode { pareto, law, empirical } mode_ = Mode::pareto;
    double alpha_ = 1.0;
    std::shared_ptr<const HeavyTailSampler> sampler_;
    std::vector<double> sorted_values_;
};

/// Monte-Carlo tail measure (t/m) sum delta_{X_i / b(t)}; atoms that would
/// land on the cone are dropped (cannot happen for the supported samplers).
AtomicMeasure empirical_tail_measure(std::span<const Point> samples, double t,
                                     const ScalingFunction& b, const SpaceDescriptor& space);

struct RvCheckRow {
    double t = 0.0;
    std::size_t set_index = 0;
    double estimate = 0.0;
    double std_error = 0.0;
    double target_limit = 0.0;    // tail mass of the limit measure
    double target_finite_t = 0.0; // exact mass at this t and scaling
    double z_limit = 0.0;
    double z_finite_t = 0.0;
};

struct RvCheckReport {
    std::vector<RvCheckRow> rows;
    bool pass = true;  // all |z_limit| <= 4
    int reps = 0;
    std::size_t samples_per_rep = 0;
};

/// Empirical check of Definition 5-style regular variation: masses of the
/// scaled empirical tail measure on the given sets, against the limit
/// measure, across the t grid. Replicates run in parallel on independent
/// streams; the report is reduced deterministically.
RvCheckReport rv_check(const HeavyTailSampler& sampler, const HomogeneousMeasure& mean,
                       std::span<const double> t_grid, std::span<const TailSet> tail_sets,
                       int reps, std::uint64_t seed, std::size_t samples_per_rep = 20000,
                       const ScalingFunction* scaling = nullptr);

}  // namespace mopp
