#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mopp/laplace.hpp"
#include "mopp/prm.hpp"
#include "mopp/rng.hpp"
#include "support/quadrature.hpp"

using namespace mopp;

namespace {

const SpaceDescriptor line = SpaceDescriptor::euclidean_origin(1);
const HomogeneousMeasure toy(line, 1.0, {AngularAtom{Point{{1.0}}, 1.0}});

TestFunction step_above(double u, double height) {
    return TestFunction::step({StepPiece{tail_above(u), height}});
}

}  // namespace

TEST_CASE("integrate_against: weighted sums of function values") {
    const AtomicMeasure one(line, {{Point{{3.0}}, 1.0}});
    CHECK(integrate_against(one, step_above(1.0, 2.0)) == 2.0);
    CHECK(integrate_against(one, step_above(5.0, 2.0)) == 0.0);

    // two atoms, weights 1 and 2, ramp values 0.5 and 0.25
    const AtomicMeasure two(line, {{Point{{1.5}}, 1.0}, {Point{{1.25}}, 2.0}});
    const TestFunction f = TestFunction::ramp(1.0, 1.0, 1.0);
    CHECK(integrate_against(two, f) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("analytic laplace: exact step formula") {
    CHECK(analytic_prm_laplace(toy, TestFunction::step({})) == 1.0);

    const double val = analytic_prm_laplace(toy, step_above(1.0, std::log(2.0)));
    CHECK(val == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(val == doctest::Approx(0.6065306597126334).epsilon(1e-12));

    // large heights approach the void probability exp(-mass)
    const double void_prob = std::exp(-tail_mass(toy, tail_above(1.0)));
    CHECK(analytic_prm_laplace(toy, step_above(1.0, 50.0)) ==
          doctest::Approx(void_prob).epsilon(1e-12));
}

TEST_CASE("analytic laplace: step closed form agrees with direct quadrature") {
    // independent numerical route: integrate (1 - e^-f) against the radial
    // density alpha s^{-alpha-1} per unit angular weight
    const double c = 0.8;
    const double u = 1.5;
    const auto integrand = [&](double s) {
        const double fv = s > u ? c : 0.0;
        return (1.0 - std::exp(-fv)) * 1.0 * std::pow(s, -2.0);
    };
    const double numeric = test_support::adaptive_simpson(integrand, 1.0, 2000.0, 1e-12, 48);
    const double closed = -std::log(analytic_prm_laplace(toy, step_above(u, c)));
    // quadrature truncates the tail at 2000: error (1 - e^-c) / 2000
    CHECK(std::abs(numeric + (1.0 - std::exp(-c)) / 2000.0 - closed) < 1e-9);
}

TEST_CASE("analytic laplace: ramp quadrature is sandwiched by step bounds") {
    const TestFunction ramp = TestFunction::ramp(0.7, 1.0, 0.5);
    const double val = analytic_prm_laplace(toy, ramp);
    // pointwise: c 1_{cd > r+w} <= ramp <= c 1_{cd > r}
    CHECK(val <= analytic_prm_laplace(toy, step_above(1.5, 0.7)) + 1e-12);
    CHECK(val >= analytic_prm_laplace(toy, step_above(1.0, 0.7)) - 1e-12);

    // independent quadrature of the full ramp exponent
    const auto integrand = [&](double s) {
        const double fv = 0.7 * std::clamp((s - 1.0) / 0.5, 0.0, 1.0);
        return (1.0 - std::exp(-fv)) * std::pow(s, -2.0);
    };
    const double tail = (1.0 - std::exp(-0.7)) / 5000.0;
    const double numeric = test_support::adaptive_simpson(integrand, 1.0, 5000.0, 1e-12, 48) + tail;
    CHECK(-std::log(val) == doctest::Approx(numeric).epsilon(1e-8));
}

TEST_CASE("analytic laplace: monotone in the test function on random step pairs") {
    RngStream rng(88);
    for (int i = 0; i < 100; ++i) {
        const double u1 = 0.5 + rng.next_unit();
        const double u2 = u1 + 0.5 + rng.next_unit();
        const double c1 = rng.next_unit();
        const double c2 = rng.next_unit();
        const TestFunction f = TestFunction::step(
            {StepPiece{TailSet{u1, u2, {}, {}}, c1}, StepPiece{tail_above(u2), c2}});
        const TestFunction g = TestFunction::step(
            {StepPiece{TailSet{u1, u2, {}, {}}, c1 + rng.next_unit()},
             StepPiece{tail_above(u2), c2 + rng.next_unit()}});
        CHECK(analytic_prm_laplace(toy, f) >= analytic_prm_laplace(toy, g) - 1e-15);
    }
}

TEST_CASE("step pieces must be disjoint") {
    CHECK_THROWS_AS(TestFunction::step({StepPiece{tail_above(1.0), 1.0},
                                        StepPiece{tail_above(2.0), 0.5}}),
                    std::invalid_argument);
    // touching bands are fine
    CHECK_NOTHROW(TestFunction::step({StepPiece{TailSet{1.0, 2.0, {}, {}}, 1.0},
                                      StepPiece{tail_above(2.0), 0.5}}));
}

TEST_CASE("empirical laplace: degenerate inputs") {
    std::vector<AtomicMeasure> empties(10, AtomicMeasure::empty(line));
    const auto est = empirical_laplace(empties, step_above(1.0, 1.0));
    CHECK(est.estimate == 1.0);
    CHECK(est.std_error == 0.0);

    std::vector<AtomicMeasure> some{AtomicMeasure(line, {{Point{{2.0}}, 1.0}}),
                                    AtomicMeasure(line, {{Point{{3.0}}, 2.0}})};
    const auto zero_f = empirical_laplace(some, TestFunction::step({}));
    CHECK(zero_f.estimate == 1.0);
    CHECK(zero_f.std_error == 0.0);

    CHECK_THROWS_AS(empirical_laplace(std::span<const AtomicMeasure>(some.data(), 1),
                                      step_above(1.0, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("empirical laplace matches the analytic value for PRM draws") {
    const PrmSpec spec{toy, 0.5, {}};
    std::vector<AtomicMeasure> draws;
    draws.reserve(10000);
    for (int i = 0; i < 10000; ++i) draws.push_back(sample_prm(spec, derive_seed(61, 0, i)));
    const TestFunction f = step_above(1.0, std::log(2.0));
    const auto est = empirical_laplace(draws, f);
    const double target = analytic_prm_laplace(toy, f);
    CHECK(std::abs(est.estimate - target) <= 3.0 * est.std_error);
}

TEST_CASE("empirical laplace is reorder-invariant bit for bit") {
    const PrmSpec spec{toy, 0.5, {}};
    std::vector<AtomicMeasure> draws;
    for (int i = 0; i < 101; ++i) draws.push_back(sample_prm(spec, derive_seed(17, 0, i)));
    const TestFunction f = step_above(1.0, 0.9);
    const auto direct = empirical_laplace(draws, f);
    std::vector<AtomicMeasure> reversed(draws.rbegin(), draws.rend());
    const auto flipped = empirical_laplace(reversed, f);
    CHECK(direct.estimate == flipped.estimate);
    CHECK(direct.std_error == flipped.std_error);
}

TEST_CASE("laplace continuity along a monotone family") {
    const PrmSpec spec{toy, 0.5, {}};
    std::vector<AtomicMeasure> draws;
    for (int i = 0; i < 2000; ++i) draws.push_back(sample_prm(spec, derive_seed(23, 0, i)));

    SUBCASE("scalar family (1 - 1/n) f") {
        const double c = 1.2;
        std::vector<TestFunction> seq;
        for (int n = 1; n <= 6; ++n) seq.push_back(step_above(1.0, (1.0 - 1.0 / n) * c));
        const TestFunction limit = step_above(1.0, c);
        const auto report = laplace_continuity_check(draws, seq, limit);
        CHECK(report.vanish_radii_match);
        CHECK(report.gaps_monotone);
        for (std::size_t i = 0; i + 1 < report.gaps.size(); ++i)
            CHECK(report.gaps[i + 1] <= report.gaps[i] + 1e-15);  // literally monotone per sample
    }

    SUBCASE("ramps sharpening into a step") {
        std::vector<TestFunction> seq;
        for (int n = 1; n <= 8; ++n) seq.push_back(TestFunction::ramp(0.8, 1.0, 1.0 / n));
        const TestFunction limit = step_above(1.0, 0.8);
        const auto report = laplace_continuity_check(draws, seq, limit);
        CHECK(report.vanish_radii_match);
        CHECK(report.gaps_monotone);
        CHECK(report.gaps.back() < report.gaps.front() + 3.0 * report.std_errors.back());
    }

    SUBCASE("constant sequence has zero gaps") {
        const TestFunction f = step_above(1.0, 0.4);
        std::vector<TestFunction> seq(4, f);
        const auto report = laplace_continuity_check(draws, seq, f);
        for (double g : report.gaps) CHECK(g == 0.0);
        CHECK(report.gaps_monotone);
    }

    SUBCASE("mismatched vanish radii are flagged, not thrown") {
        std::vector<TestFunction> seq{step_above(2.0, 0.4)};
        const auto report = laplace_continuity_check(draws, seq, step_above(1.0, 0.4));
        CHECK(!report.vanish_radii_match);
    }
}
