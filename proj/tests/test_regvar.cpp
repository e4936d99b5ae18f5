#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mopp/regvar.hpp"
#include "mopp/stats.hpp"

using namespace mopp;

namespace {

const SpaceDescriptor line = SpaceDescriptor::euclidean_origin(1);
const SpaceDescriptor plane = SpaceDescriptor::euclidean_origin(2);

HeavyTailSampler pareto1() {
    return HeavyTailSampler(line, 1.0, {AngularAtom{Point{{1.0}}, 1.0}});
}

}  // namespace

TEST_CASE("sample_vector: radial law and support") {
    const HeavyTailSampler s = pareto1();
    const auto draws = sample_vector(s, 10, 100000);
    std::size_t above2 = 0;
    for (const Point& x : draws) {
        CHECK(line.cone_distance(x) >= 1.0);
        if (line.cone_distance(x) > 2.0) ++above2;
    }
    // P(X > 2) = 0.5 for the unit Pareto
    const double freq = static_cast<double>(above2) / static_cast<double>(draws.size());
    CHECK(std::abs(freq - 0.5) <= 3.0 * std::sqrt(0.25 / 100000.0));
}

TEST_CASE("sample_vector: degenerate angular measure hits one direction") {
    const HeavyTailSampler s(plane, 1.5,
                             {AngularAtom{Point{{1.0, 0.0}}, 1.0}});
    for (const Point& x : sample_vector(s, 4, 1000)) CHECK(x.coords[1] == 0.0);
}

TEST_CASE("log-perturbed radial law: tail and quantile are inverse") {
    const HeavyTailSampler s(line, 1.0, {AngularAtom{Point{{1.0}}, 1.0}},
                             RadialLaw::log_perturbed, 1.0);
    RngStream rng(12);
    for (int i = 0; i < 2000; ++i) {
        const double u = rng.next_unit_open();
        const double q = s.radial_quantile(u);
        CHECK(q >= 1.0);
        CHECK(s.radial_tail(q) == doctest::Approx(u).epsilon(1e-10));
    }
    CHECK(s.radial_quantile(1.0) == 1.0);
    // gamma above alpha is not a valid tail
    CHECK_THROWS_AS(HeavyTailSampler(line, 1.0, {AngularAtom{Point{{1.0}}, 1.0}},
                                     RadialLaw::log_perturbed, 1.5),
                    std::invalid_argument);
}

TEST_CASE("scaling_b: analytic examples and empirical consistency") {
    CHECK(ScalingFunction::analytic(1.0)(100.0) == 100.0);
    CHECK(ScalingFunction::analytic(2.0)(100.0) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK_THROWS_AS(ScalingFunction::analytic(1.0)(0.5), std::invalid_argument);

    // the law-aware scaling reduces to t^(1/alpha) for pure Pareto
    const ScalingFunction law_b = ScalingFunction::analytic(pareto1());
    CHECK(law_b(1000.0) == 1000.0);

    // empirical quantile within 10% of the exact Pareto quantile at t = 100:
    // 20 repetitions, at least 18 inside
    int hits = 0;
    for (int rep = 0; rep < 20; ++rep) {
        const auto draws = sample_vector(pareto1(), derive_seed(100, 0, rep), 100000);
        std::vector<double> radii;
        radii.reserve(draws.size());
        for (const Point& x : draws) radii.push_back(line.cone_distance(x));
        const ScalingFunction b = ScalingFunction::empirical_quantile(std::move(radii));
        if (std::abs(b(100.0) - 100.0) <= 10.0) ++hits;
    }
    CHECK(hits >= 18);
}

TEST_CASE("empirical_tail_measure: weights and masses") {
    const HeavyTailSampler s = pareto1();
    const ScalingFunction b = ScalingFunction::analytic(1.0);

    SUBCASE("t = m gives a counting measure") {
        const auto draws = sample_vector(s, 3, 50);
        const AtomicMeasure nu = empirical_tail_measure(draws, 50.0, b, line);
        CHECK(is_counting(nu));
        CHECK(nu.total_mass() == doctest::Approx(50.0).epsilon(1e-12));
    }

    SUBCASE("single sample becomes one weighted atom") {
        const std::vector<Point> one{Point{{6.0}}};
        const AtomicMeasure nu = empirical_tail_measure(one, 2.0, b, line);
        REQUIRE(nu.size() == 1);
        CHECK(nu.atoms()[0].weight == 2.0);
        CHECK(nu.atoms()[0].location == Point{{3.0}});
    }

    SUBCASE("total mass equals t") {
        const auto draws = sample_vector(s, 8, 3000);
        const AtomicMeasure nu = empirical_tail_measure(draws, 17.0, b, line);
        CHECK(nu.total_mass() == doctest::Approx(17.0).epsilon(1e-12));
    }

    SUBCASE("band masses have expectation u^-1 when t u >= 1") {
        const int reps = 200;
        const double t = 50.0;
        std::vector<double> masses;
        for (int rep = 0; rep < reps; ++rep) {
            const auto draws = sample_vector(s, derive_seed(200, 0, rep), 20000);
            masses.push_back(atomic_mass(empirical_tail_measure(draws, t, b, line),
                                         tail_above(2.0)));
        }
        const Summary sum = summarize(masses);
        CHECK(std::abs(sum.mean - 0.5) <= 4.0 * sum.std_error);
    }
}

TEST_CASE("rv_check: pure Pareto matches the limit at every t") {
    const HeavyTailSampler s = pareto1();
    const std::vector<double> t_grid{100.0, 1000.0};
    std::vector<TailSet> sets{tail_above(1.0), tail_above(2.0), tail_above(4.0),
                              TailSet{1.0, 3.0, {}, {}}};
    const RvCheckReport report = rv_check(s, s.limit_measure(), t_grid, sets, 40, 321, 20000);
    CHECK(report.pass);
    for (const RvCheckRow& row : report.rows) {
        CHECK(std::abs(row.z_limit) <= 4.0);
        // exact tail algebra: the finite-t target IS the limit target
        CHECK(row.target_finite_t == doctest::Approx(row.target_limit).epsilon(1e-12));
    }
}

TEST_CASE("rv_check: log-perturbed bias dies along the t grid") {
    const HeavyTailSampler s(line, 1.0, {AngularAtom{Point{{1.0}}, 1.0}},
                             RadialLaw::log_perturbed, 1.0);
    const std::vector<double> t_grid{100.0, 10000.0, 1000000.0};
    std::vector<TailSet> sets{tail_above(2.0)};
    const RvCheckReport report = rv_check(s, s.limit_measure(), t_grid, sets, 60, 5150, 40000);
    REQUIRE(report.rows.size() == 3);
    // unbiased against the numerically computed finite-t targets
    for (const RvCheckRow& row : report.rows) CHECK(std::abs(row.z_finite_t) <= 4.0);
    // the finite-t target drifts back toward the limit as t grows
    const double bias0 = std::abs(report.rows[0].target_finite_t - report.rows[0].target_limit);
    const double bias2 = std::abs(report.rows[2].target_finite_t - report.rows[2].target_limit);
    CHECK(bias0 > 0.03);
    CHECK(bias2 < bias0);
    // and the measured z against the limit shrinks
    CHECK(std::abs(report.rows[2].z_limit) < std::abs(report.rows[0].z_limit));
}

TEST_CASE("rv_check: homogeneity ratio between scaled sets") {
    const HeavyTailSampler s = pareto1();
    const double lambda = 2.0;
    const TailSet base = tail_above(1.5);
    const TailSet scaled_set = scaled(base, lambda);
    const int reps = 60;
    const double t = 200.0;
    const ScalingFunction b = ScalingFunction::analytic(1.0);
    std::vector<double> diffs;
    for (int rep = 0; rep < reps; ++rep) {
        const auto draws = sample_vector(s, derive_seed(300, 0, rep), 20000);
        const AtomicMeasure nu = empirical_tail_measure(draws, t, b, line);
        // paired difference: m(lambda A) - lambda^-alpha m(A) has mean 0
        diffs.push_back(atomic_mass(nu, scaled_set) -
                        std::pow(lambda, -1.0) * atomic_mass(nu, base));
    }
    const Summary sum = summarize(diffs);
    CHECK(std::abs(sum.mean) <= 4.0 * sum.std_error);
}
