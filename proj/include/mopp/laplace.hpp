#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mopp/measure.hpp"

namespace mopp {

struct StepPiece {
    TailSet set;
    double height = 0.0;  // >= 0
};

/// Bounded nonnegative test function vanishing within cone distance
/// vanish_radius of the cone. Two forms:
///   step: sum of c_i 1_{A_i} over pairwise disjoint tail sets,
///   ramp: x -> c * clamp((d(x,C) - r) / w, 0, 1), which is continuous.
class TestFunction {
public:
    static TestFunction step(std::vector<StepPiece> pieces);
    static TestFunction ramp(double height, double r, double width);

    bool is_step() const { return is_step_; }
    const std::vector<StepPiece>& pieces() const { return pieces_; }
    double ramp_height() const { return height_; }
    double ramp_start() const { return start_; }
    double ramp_width() const { return width_; }

    /// Largest r such that the function is identically 0 on {d(x,C) < r}.
    double vanish_radius() const;
    /// Upper bound of the function.
    double bound() const;

    double operator()(const SpaceDescriptor& space, const Point& x) const;

private:
    TestFunction() = default;

    bool is_step_ = true;
    std::vector<StepPiece> pieces_;
    double height_ = 0.0, start_ = 0.0, width_ = 0.0;
};

/// Integral of f against the atomic measure: sum of weight_i * f(x_i).
double integrate_against(const AtomicMeasure& n, const TestFunction& f);

/// Laplace functional of a Poisson random measure with the given
/// homogeneous mean (times dt on [0, T] when a horizon is supplied):
///   L[f] = exp(-integral (1 - e^-f) dmu).
/// Step functions evaluate exactly through tail-set masses; ramps use
/// adaptive radial quadrature to 1e-9 absolute error on the exponent.
double analytic_prm_laplace(const HomogeneousMeasure& mean, const TestFunction& f,
                            std::optional<double> time_horizon = {});

struct LaplaceEstimate {
    double estimate = 1.0;
    double std_error = 0.0;
};

/// Monte-Carlo Laplace functional: mean and standard error of
/// exp(-integral f dN_i) over the sample measures. Requires >= 2 samples;
/// the reduction is reorder-invariant.
LaplaceEstimate empirical_laplace(std::span<const AtomicMeasure> samples, const TestFunction& f);

struct ContinuityReport {
    bool vanish_radii_match = true;   // all f_n share the limit's vanish radius
    double common_vanish_radius = 0.0;
    std::vector<double> gaps;        // |L[f_n] - L[f_limit]| per n
    std::vector<double> std_errors;  // of the paired gap estimates
    bool gaps_monotone = true;       // nonincreasing within 3 SE slack
};

/// Checks that empirical Laplace values along f_sequence approach the value
/// at f_limit monotonically (within Monte-Carlo noise). A vanish-radius
/// mismatch is flagged in the report, not thrown.
ContinuityReport laplace_continuity_check(std::span<const AtomicMeasure> samples,
                                          std::span<const TestFunction> f_sequence,
                                          const TestFunction& f_limit);

}  // namespace mopp
