#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mopp/laplace.hpp"
#include "mopp/measure.hpp"
#include "mopp/regvar.hpp"
#include "mopp/stats.hpp"

namespace mopp {

/// The point process sum_i delta_{(i/n, X_i / b_n)} on the product-time
/// space over `base`. Unit weights; samples whose scaled S part would land
/// on the cone are dropped (the supported samplers never produce them).
AtomicMeasure build_empirical_pp(std::span<const Point> samples, double b_n,
                                 const SpaceDescriptor& base);

struct PoissonTestResult {
    double p_value = 1.0;
    double mean_z = 0.0;
    double var_z = 0.0;
    double statistic = 0.0;
    std::size_t bins = 0;
};

/// Chi-square goodness of fit of the counts against Poisson(mean), plus
/// z-scores for the sample mean and variance. Requires >= 100 counts.
PoissonTestResult poisson_count_test(std::span<const std::uint64_t> counts, double mean);

struct TightnessRow {
    double r = 0.0;
    double mass_bound = 0.0;      // M_i
    double frac_mass_exceeded = 0.0;  // share of members with shell mass > M_i
    double frac_escaped = 0.0;        // share with mass >= eps' outside the box
    bool violates = false;
};

/// Shell-mass and escape diagnostics for an ensemble of measures: for each
/// r_i, the fraction of members whose mass on {d(x,C) >= r_i} exceeds M_i,
/// and the fraction with at least eps_prime mass outside the compact
/// {r_i <= d(x,C), every |coordinate| <= box_bound}. Rows violating either
/// eps threshold are flagged.
std::vector<TightnessRow> tightness_diagnostic(std::span<const AtomicMeasure> ensemble,
                                               std::span<const double> r_grid,
                                               std::span<const double> mass_grid,
                                               double box_bound, double eps,
                                               double eps_prime = 0.5);

struct ExperimentConfig {
    HeavyTailSampler sampler;
    std::vector<std::size_t> n_grid;
    int reps = 200;
    std::vector<TestFunction> test_functions;  // time support within [0, 1]
    std::vector<TailSet> tail_sets;            // time windows within [0, 1]
    std::uint64_t seed = 0;
    bool use_empirical_b = false;              // estimate b from a calibration sample
    std::size_t empirical_b_samples = 100000;
};

struct LaplaceCell {
    std::size_t n = 0;
    std::size_t f_index = 0;
    double estimate = 1.0;
    double std_error = 0.0;
    double target = 1.0;
    double gap = 0.0;  // |estimate - target|
    double z = 0.0;
};

struct CountCell {
    std::size_t n = 0;
    std::size_t set_index = 0;
    std::vector<std::uint64_t> histogram;  // histogram[k] = #reps with count k
    double mean_count = 0.0;
    double target_mean = 0.0;
    PoissonTestResult gof;
    bool pass = true;
};

struct ConvergenceReport {
    std::vector<LaplaceCell> laplace;
    std::vector<CountCell> counts;
    bool laplace_gaps_nonincreasing = true;  // across n_grid, 2 SE slack
    bool pass_at_largest_n = true;
    bool pass = true;
};

/// The complete convergence experiment: for each n, `reps` realizations of
/// sum delta_{(i/n, X_i/b(n))} are compared against the Poisson random
/// measure with mean dt x dmu on [0,1] x O, through empirical Laplace
/// functionals and rectangle counts. Passes when every |z| <= 4 and every
/// chi-square p >= 0.001 at the largest n and the Laplace gaps are
/// nonincreasing in n up to 2 SE slack.
ConvergenceReport complete_convergence_experiment(const ExperimentConfig& cfg);

}  // namespace mopp
