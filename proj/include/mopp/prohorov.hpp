#pragma once

#include <vector>

#include "mopp/measure.hpp"

namespace mopp {

struct ProhorovResult {
    double value = 0.0;
    /// Candidate epsilon grid examined: 0 followed by the sorted distinct
    /// pairwise atom distances.
    std::vector<double> witness_epsilon_breakpoints;
};

/// Prohorov distance between finite atomic measures on the same space:
///   inf{eps : mu(A) <= nu(A^eps) + eps and nu(A) <= mu(A^eps) + eps, A closed}
/// with A^eps the closed eps-neighborhood. The worst-case deficiency
/// max_A [mu(A) - nu(A^eps)] is total mu-mass minus the max flow in the
/// bipartite network source -> mu-atoms -> (edges where distance <= eps)
/// -> nu-atoms -> sink; it is piecewise constant in eps with breakpoints
/// among the pairwise distances, so the infimum is found by scanning
/// breakpoint intervals for the first feasible max(d_k, F(d_k)).
ProhorovResult prohorov_distance(const AtomicMeasure& mu, const AtomicMeasure& nu);

/// Independent oracle: evaluates the defining infimum by enumerating all
/// subsets of each support as candidate closed sets over the same breakpoint
/// grid. Refuses instances with more than 16 atoms combined.
double prohorov_bruteforce(const AtomicMeasure& mu, const AtomicMeasure& nu);

/// d_MO(mu, nu) = integral_0^inf e^-r * p_r / (1 + p_r) dr, where p_r is the
/// Prohorov distance between the restrictions to {d(x,C) >= r}. Restrictions
/// are constant between consecutive atom cone distances, so each segment
/// contributes (c/(1+c)) * (e^-r_j - e^-r_{j+1}) exactly.
double mo_distance(const AtomicMeasure& mu, const AtomicMeasure& nu);

}  // namespace mopp
