#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mopp {

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

/// CDF of the chi-square distribution with dof degrees of freedom.
double chi_squared_cdf(double x, double dof);

double poisson_pmf(std::uint64_t k, double mean);
double poisson_cdf(std::uint64_t k, double mean);

/// Smallest k with P(Poisson(mean) <= k) >= prob.
std::uint64_t poisson_quantile(double mean, double prob);

struct GofResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t bins = 0;  // after merging
};

/// Chi-square goodness of fit of observed counts-per-value against the
/// Poisson(mean) pmf. Adjacent cells are merged until each expected count
/// is at least 5; with a known mean, dof = bins - 1.
GofResult poisson_chi_square(std::span<const std::uint64_t> counts, double mean);

struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;   // sample variance (n-1 denominator)
    double std_error = 0.0;  // of the mean
};

/// Two-pass mean/variance; values are summed in ascending order so the
/// result is invariant under reordering of the input.
Summary summarize(std::span<const double> values);

}  // namespace mopp
