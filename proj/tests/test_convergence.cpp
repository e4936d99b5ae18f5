#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mopp/convergence.hpp"
#include "mopp/prm.hpp"

using namespace mopp;

namespace {

const SpaceDescriptor line = SpaceDescriptor::euclidean_origin(1);
const HomogeneousMeasure toy(line, 1.0, {AngularAtom{Point{{1.0}}, 1.0}});

HeavyTailSampler pareto1() {
    return HeavyTailSampler(line, 1.0, {AngularAtom{Point{{1.0}}, 1.0}});
}

TestFunction rect_step(double u, double height) {
    TailSet set = tail_above(u);
    set.time_window = TimeWindow{0.0, 1.0};
    return TestFunction::step({StepPiece{set, height}});
}

TailSet rect(double u, double t1, double t2) {
    TailSet set = tail_above(u);
    set.time_window = TimeWindow{t1, t2};
    return set;
}

}  // namespace

TEST_CASE("build_empirical_pp: atom layout") {
    SUBCASE("single sample") {
        const std::vector<Point> xs{Point{{2.0}}};
        const AtomicMeasure pp = build_empirical_pp(xs, 1.0, line);
        REQUIRE(pp.size() == 1);
        CHECK(pp.atoms()[0].location == Point{{1.0, 2.0}});
        CHECK(pp.atoms()[0].weight == 1.0);
    }
    SUBCASE("time coordinates are exactly i/n") {
        const std::vector<Point> xs{Point{{2.0}}, Point{{3.0}}, Point{{4.0}}};
        const AtomicMeasure pp = build_empirical_pp(xs, 1.0, line);
        REQUIRE(pp.size() == 3);
        std::vector<double> times;
        for (const Atom& a : pp.atoms()) times.push_back(a.location.coords[0]);
        std::sort(times.begin(), times.end());
        CHECK(times[0] == 1.0 / 3.0);
        CHECK(times[1] == 2.0 / 3.0);
        CHECK(times[2] == 1.0);
    }
    SUBCASE("doubling b halves the S coordinates") {
        const std::vector<Point> xs{Point{{2.0}}, Point{{5.0}}};
        const AtomicMeasure a = build_empirical_pp(xs, 1.0, line);
        const AtomicMeasure b = build_empirical_pp(xs, 2.0, line);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(b.atoms()[i].location.coords[1] ==
                  doctest::Approx(a.atoms()[i].location.coords[1] / 2.0).epsilon(1e-15));
    }
}

TEST_CASE("poisson_count_test: degenerate, calibrated, and broken inputs") {
    SUBCASE("all-zero counts against a vanishing mean match perfectly") {
        std::vector<std::uint64_t> zeros(500, 0);
        const PoissonTestResult res = poisson_count_test(zeros, 1e-9);
        CHECK(res.p_value > 0.99);
    }
    SUBCASE("calibration against the library's own sampler") {
        int passes = 0;
        for (int trial = 0; trial < 100; ++trial) {
            RngStream rng(derive_seed(1000, 0, trial));
            std::vector<std::uint64_t> counts;
            counts.reserve(100000);
            for (int i = 0; i < 100000; ++i) counts.push_back(poisson_draw(rng, 1.0));
            if (poisson_count_test(counts, 1.0).p_value > 0.001) ++passes;
        }
        CHECK(passes >= 99);
    }
    SUBCASE("constant counts fail on the variance") {
        std::vector<std::uint64_t> constant(100000, 1);
        const PoissonTestResult res = poisson_count_test(constant, 1.0);
        CHECK(res.p_value < 1e-6);
        CHECK(std::abs(res.var_z) > 10.0);
    }
    SUBCASE("needs at least 100 counts") {
        std::vector<std::uint64_t> few(99, 1);
        CHECK_THROWS_AS(poisson_count_test(few, 1.0), std::invalid_argument);
    }
}

TEST_CASE("tightness diagnostics") {
    SUBCASE("PRM ensemble passes generous thresholds") {
        const PrmSpec spec{toy, 0.5, {}};
        std::vector<AtomicMeasure> ensemble;
        for (int i = 0; i < 2000; ++i)
            ensemble.push_back(sample_prm(spec, derive_seed(2000, 0, i)));
        const std::vector<double> r_grid{1.0, 0.5};
        const std::vector<double> m_grid{10.0, 12.0};
        const auto rows = tightness_diagnostic(ensemble, r_grid, m_grid, 1e6, 0.01);
        REQUIRE(rows.size() == 2);
        for (const auto& row : rows) {
            CHECK(!row.violates);
            CHECK(row.frac_mass_exceeded < 0.01);
            CHECK(row.frac_escaped == 0.0);
        }
    }
    SUBCASE("empty ensemble members have zero fractions") {
        std::vector<AtomicMeasure> ensemble(100, AtomicMeasure::empty(line));
        const std::vector<double> r_grid{1.0};
        const std::vector<double> m_grid{1.0};
        const auto rows = tightness_diagnostic(ensemble, r_grid, m_grid, 10.0, 0.01);
        CHECK(rows[0].frac_mass_exceeded == 0.0);
        CHECK(rows[0].frac_escaped == 0.0);
    }
    SUBCASE("growing box bound empties the escape fraction") {
        const PrmSpec spec{toy, 0.5, {}};
        std::vector<AtomicMeasure> ensemble;
        for (int i = 0; i < 500; ++i)
            ensemble.push_back(sample_prm(spec, derive_seed(2100, 0, i)));
        const std::vector<double> r_grid{0.5};
        const std::vector<double> m_grid{1e9};
        double prev = 1.0;
        for (const double box : {1.0, 10.0, 1e8}) {
            const auto rows = tightness_diagnostic(ensemble, r_grid, m_grid, box, 0.5);
            CHECK(rows[0].frac_escaped <= prev);
            prev = rows[0].frac_escaped;
        }
        CHECK(prev == 0.0);
    }
    SUBCASE("grid validation") {
        std::vector<AtomicMeasure> ensemble(1, AtomicMeasure::empty(line));
        const std::vector<double> r_grid{0.5, 1.0};  // increasing: invalid
        const std::vector<double> m_grid{1.0, 1.0};
        CHECK_THROWS_AS(tightness_diagnostic(ensemble, r_grid, m_grid, 1.0, 0.1),
                        std::invalid_argument);
        const std::vector<double> short_grid{1.0};
        CHECK_THROWS_AS(tightness_diagnostic(ensemble, short_grid, m_grid, 1.0, 0.1),
                        std::invalid_argument);
    }
}

TEST_CASE("exact finite-n mean of rectangle counts") {
    const HeavyTailSampler s = pareto1();
    const std::size_t n = 500;
    const int reps = 4000;
    const TailSet set = rect(2.0, 0.0, 1.0);
    std::vector<double> counts;
    for (int rep = 0; rep < reps; ++rep) {
        const auto xs = sample_vector(s, derive_seed(52, 0, rep), n);
        counts.push_back(atomic_mass(build_empirical_pp(xs, 500.0, line), set));
    }
    const Summary sum = summarize(counts);
    // n P(X > n u) = u^-1 exactly when n u >= 1
    CHECK(std::abs(sum.mean - 0.5) <= 3.0 * sum.std_error);
}

TEST_CASE("counts over disjoint time windows are uncorrelated") {
    const HeavyTailSampler s = pareto1();
    const std::size_t n = 400;
    const int reps = 20000;
    const TailSet early = rect(1.0, 0.0, 0.5);
    const TailSet late = rect(1.0, 0.5, 1.0);
    double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
    for (int rep = 0; rep < reps; ++rep) {
        const auto xs = sample_vector(s, derive_seed(53, 0, rep), n);
        const AtomicMeasure pp = build_empirical_pp(xs, 400.0, line);
        const double a = atomic_mass(pp, early);
        const double b = atomic_mass(pp, late);
        sa += a;
        sb += b;
        sab += a * b;
        saa += a * a;
        sbb += b * b;
    }
    const double m = reps;
    const double cov = sab / m - (sa / m) * (sb / m);
    const double se = std::sqrt((saa / m - (sa / m) * (sa / m)) *
                                (sbb / m - (sb / m) * (sb / m)) / m);
    CHECK(std::abs(cov) <= 4.0 * se);
}

TEST_CASE("complete convergence experiment at desk scale") {
    ExperimentConfig cfg{pareto1(),
                         {100, 1000},
                         400,
                         {rect_step(1.0, std::log(2.0)), rect_step(2.0, std::log(2.0))},
                         {rect(1.0, 0.0, 1.0), rect(2.0, 0.0, 0.5)},
                         12345,
                         false,
                         10000};
    const ConvergenceReport report = complete_convergence_experiment(cfg);
    CHECK(report.pass);
    CHECK(report.laplace_gaps_nonincreasing);
    CHECK(report.pass_at_largest_n);
    REQUIRE(report.laplace.size() == 4);
    for (const LaplaceCell& cell : report.laplace) {
        CHECK(std::abs(cell.z) <= 4.0);
        const double expected =
            cell.f_index == 0 ? std::exp(-0.5) : std::exp(-0.5 * 0.5);
        CHECK(cell.target == doctest::Approx(expected).epsilon(1e-12));
    }
    REQUIRE(report.counts.size() == 4);
    for (const CountCell& cell : report.counts) {
        const double expected = cell.set_index == 0 ? 1.0 : 0.25;
        CHECK(cell.target_mean == doctest::Approx(expected).epsilon(1e-12));
        CHECK(cell.pass);
    }
}

TEST_CASE("experiment with an empirical scaling function") {
    ExperimentConfig cfg{pareto1(),
                         {200, 1000},
                         300,
                         {rect_step(1.0, std::log(2.0))},
                         {rect(1.0, 0.0, 1.0)},
                         777,
                         true,
                         100000};
    const ConvergenceReport report = complete_convergence_experiment(cfg);
    CHECK(report.pass);
}

TEST_CASE("experiment config validation") {
    ExperimentConfig cfg{pareto1(), {100}, 400, {}, {tail_above(1.0)}, 1, false, 1000};
    // tail sets must carry time windows
    CHECK_THROWS_AS(complete_convergence_experiment(cfg), std::invalid_argument);
    cfg.tail_sets.clear();
    cfg.reps = 5;
    CHECK_THROWS_AS(complete_convergence_experiment(cfg), std::invalid_argument);
}
