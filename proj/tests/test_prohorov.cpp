#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mopp/prohorov.hpp"
#include "mopp/rng.hpp"
#include "support/quadrature.hpp"
#include "support/random_measures.hpp"

using namespace mopp;
using test_support::random_measure;

namespace {

const SpaceDescriptor line = SpaceDescriptor::euclidean_origin(1);

AtomicMeasure dirac(double x, double w = 1.0) { return AtomicMeasure(line, {{Point{{x}}, w}}); }

// Numerical route for d_MO: integrate e^-r p_r / (1 + p_r) directly, without
// the segment decomposition.
double mo_by_quadrature(const AtomicMeasure& mu, const AtomicMeasure& nu, double tol) {
    double r_max = 0.0;
    for (const Atom& a : mu.atoms()) r_max = std::max(r_max, line.cone_distance(a.location));
    for (const Atom& b : nu.atoms()) r_max = std::max(r_max, line.cone_distance(b.location));
    if (r_max == 0.0) return 0.0;
    const auto integrand = [&](double r) {
        if (r <= 0.0) r = 1e-12;
        const double p = prohorov_distance(mu.restricted(r), nu.restricted(r)).value;
        return std::exp(-r) * p / (1.0 + p);
    };
    return test_support::adaptive_simpson(integrand, 1e-12, r_max, tol, 44);
}

}  // namespace

TEST_CASE("prohorov: point-mass examples") {
    CHECK(prohorov_distance(dirac(1.0), dirac(1.0)).value == 0.0);
    CHECK(prohorov_distance(dirac(1.0), dirac(1.5)).value == 0.5);
    CHECK(prohorov_distance(dirac(1.0, 2.0), dirac(1.0, 1.0)).value == 1.0);
    CHECK(prohorov_distance(dirac(1.0), dirac(2.0)).value == 1.0);
    CHECK(prohorov_distance(AtomicMeasure::empty(line), AtomicMeasure::empty(line)).value == 0.0);
    CHECK(prohorov_distance(dirac(1.0), AtomicMeasure::empty(line)).value == 1.0);
}

TEST_CASE("prohorov: oracle agrees on the worked examples") {
    CHECK(prohorov_bruteforce(dirac(1.0), dirac(2.0)) == 1.0);
    CHECK(prohorov_bruteforce(AtomicMeasure::empty(line), AtomicMeasure::empty(line)) == 0.0);
    CHECK(prohorov_bruteforce(dirac(1.0), AtomicMeasure::empty(line)) == 1.0);

    std::vector<Atom> many;
    for (int i = 1; i <= 17; ++i) many.push_back(Atom{Point{{static_cast<double>(i)}}, 1.0});
    CHECK_THROWS_AS(prohorov_bruteforce(dirac(0.5), AtomicMeasure(line, many)),
                    std::invalid_argument);
}

TEST_CASE("prohorov == bruteforce exactly on 500 random instances") {
    const SpaceDescriptor spaces[] = {line, SpaceDescriptor::euclidean_origin(2),
                                      SpaceDescriptor::euclidean_axes(2)};
    RngStream rng(4242);
    int checked = 0;
    while (checked < 500) {
        const SpaceDescriptor& space = spaces[rng.next_u64() % 3];
        const bool integers = (rng.next_u64() & 1) != 0;
        const AtomicMeasure mu = random_measure(rng, space, 6, integers);
        const AtomicMeasure nu = random_measure(rng, space, 6, integers);
        const double fast = prohorov_distance(mu, nu).value;
        const double slow = prohorov_bruteforce(mu, nu);
        CHECK(fast == slow);  // bitwise: shared breakpoint grid, exact weights
        ++checked;
    }
}

TEST_CASE("prohorov: symmetry is exact and triangle inequality holds") {
    RngStream rng(777);
    for (int i = 0; i < 500; ++i) {
        const AtomicMeasure a = random_measure(rng, line, 5, false);
        const AtomicMeasure b = random_measure(rng, line, 5, false);
        const AtomicMeasure c = random_measure(rng, line, 5, false);
        const double ab = prohorov_distance(a, b).value;
        const double ba = prohorov_distance(b, a).value;
        CHECK(ab == ba);
        const double ac = prohorov_distance(a, c).value;
        const double cb = prohorov_distance(c, b).value;
        CHECK(ab <= ac + cb + 1e-9);
    }
}

TEST_CASE("prohorov: breakpoint witnesses bracket the value") {
    RngStream rng(31);
    for (int i = 0; i < 50; ++i) {
        const AtomicMeasure a = random_measure(rng, line, 4, false);
        const AtomicMeasure b = random_measure(rng, line, 4, false);
        const ProhorovResult res = prohorov_distance(a, b);
        CHECK(res.value >= 0.0);
        CHECK(res.value <= std::max(a.total_mass(), b.total_mass()) + 1e-12);
        REQUIRE(!res.witness_epsilon_breakpoints.empty());
        CHECK(res.witness_epsilon_breakpoints.front() == 0.0);
        CHECK(std::is_sorted(res.witness_epsilon_breakpoints.begin(),
                             res.witness_epsilon_breakpoints.end()));
    }
}

TEST_CASE("mo_distance: identity and the two closed-form examples") {
    RngStream rng(12);
    const AtomicMeasure m = random_measure(rng, line, 6, false);
    CHECK(mo_distance(m, m) == 0.0);

    // single atom at cone distance 2 against the zero measure:
    // p_r = 1 on (0, 2], so the integral is (1 - e^-2) / 2
    const double lone = mo_distance(dirac(2.0), AtomicMeasure::empty(line));
    CHECK(lone == doctest::Approx((1.0 - std::exp(-2.0)) / 2.0).epsilon(1e-12));
    CHECK(lone == doctest::Approx(0.43233235838169365).epsilon(1e-12));

    // two nearby point masses: one segment with p = 0.2, one with p = 1
    const double near = mo_distance(dirac(1.0), dirac(1.2));
    const double expected = (1.0 - std::exp(-1.0)) * (0.2 / 1.2) +
                            (std::exp(-1.0) - std::exp(-1.2)) * 0.5;
    CHECK(near == doctest::Approx(expected).epsilon(1e-12));
    CHECK(near == doctest::Approx(0.13869604110104639).epsilon(1e-12));

    // both values double-checked by direct quadrature of the integrand
    CHECK(mo_by_quadrature(dirac(2.0), AtomicMeasure::empty(line), 1e-9) ==
          doctest::Approx(lone).epsilon(1e-6));
    CHECK(mo_by_quadrature(dirac(1.0), dirac(1.2), 1e-9) ==
          doctest::Approx(near).epsilon(1e-6));
}

TEST_CASE("mo_distance: segment closed form matches quadrature on random pairs") {
    RngStream rng(2718);
    for (int i = 0; i < 100; ++i) {
        const AtomicMeasure a = random_measure(rng, line, 5, false);
        const AtomicMeasure b = random_measure(rng, line, 5, false);
        const double exact = mo_distance(a, b);
        const double numeric = mo_by_quadrature(a, b, 1e-9);
        CHECK(std::abs(exact - numeric) <= 1e-6);
    }
}

TEST_CASE("mo_distance: metric axioms and boundedness") {
    RngStream rng(3141);
    for (int i = 0; i < 300; ++i) {
        const AtomicMeasure a = random_measure(rng, line, 4, false);
        const AtomicMeasure b = random_measure(rng, line, 4, false);
        const AtomicMeasure c = random_measure(rng, line, 4, false);
        const double ab = mo_distance(a, b);
        CHECK(ab == mo_distance(b, a));
        CHECK(ab <= 1.0);
        CHECK(ab <= mo_distance(a, c) + mo_distance(c, b) + 1e-9);
    }
}

TEST_CASE("mo_distance metrizes convergence: delta_{x + 1/n} -> delta_x") {
    const double x = 1.0;
    double prev = mo_distance(dirac(x + 1.0), dirac(x));
    for (int n = 2; n <= 64; ++n) {
        const double cur = mo_distance(dirac(x + 1.0 / n), dirac(x));
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK(mo_distance(dirac(x + 1e-4), dirac(x)) < 1e-3);
}

TEST_CASE("distances reject measures on different spaces") {
    const AtomicMeasure a = dirac(1.0);
    const AtomicMeasure b(SpaceDescriptor::euclidean_origin(2), {{Point{{1.0, 1.0}}, 1.0}});
    CHECK_THROWS_AS(prohorov_distance(a, b), std::invalid_argument);
    CHECK_THROWS_AS(mo_distance(a, b), std::invalid_argument);
}
