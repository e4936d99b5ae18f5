#include "mopp/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mopp/parallel.hpp"

namespace mopp {

AtomicMeasure build_empirical_pp(std::span<const Point> samples, double b_n,
                                 const SpaceDescriptor& base) {
    if (samples.empty()) throw std::invalid_argument("build_empirical_pp: no samples");
    if (!(b_n > 0.0)) throw std::invalid_argument("build_empirical_pp: b_n must be positive");
    const SpaceDescriptor product = make_product_space(base);
    const double n = static_cast<double>(samples.size());
    std::vector<Atom> atoms;
    atoms.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        Point x = base.scale(1.0 / b_n, samples[i]);
        if (!(base.cone_distance(x) > 0.0)) continue;
        x.coords.insert(x.coords.begin(), static_cast<double>(i + 1) / n);
        atoms.push_back(Atom{std::move(x), 1.0});
    }
    return AtomicMeasure(product, std::move(atoms));
}

PoissonTestResult poisson_count_test(std::span<const std::uint64_t> counts, double mean) {
    if (counts.size() < 100)
        throw std::invalid_argument("poisson_count_test: need at least 100 counts");
    if (!(mean > 0.0)) throw std::invalid_argument("poisson_count_test: mean must be positive");

    const GofResult gof = poisson_chi_square(counts, mean);

    std::vector<double> values(counts.begin(), counts.end());
    const Summary s = summarize(values);
    const double n = static_cast<double>(counts.size());
    PoissonTestResult result;
    result.p_value = gof.p_value;
    result.statistic = gof.statistic;
    result.bins = gof.bins;
    result.mean_z = (s.mean - mean) / std::sqrt(mean / n);
    // Var(S^2) for Poisson counts is (lambda + 2 lambda^2) / n.
    result.var_z = (s.variance - mean) / std::sqrt((mean + 2.0 * mean * mean) / n);
    return result;
}

namespace {

bool in_box(const Point& x, double box_bound) {
    for (double c : x.coords)
        if (std::abs(c) > box_bound) return false;
    return true;
}

}  // namespace

std::vector<TightnessRow> tightness_diagnostic(std::span<const AtomicMeasure> ensemble,
                                               std::span<const double> r_grid,
                                               std::span<const double> mass_grid,
                                               double box_bound, double eps, double eps_prime) {
    if (r_grid.size() != mass_grid.size())
        throw std::invalid_argument("tightness_diagnostic: r_grid and mass_grid lengths differ");
    for (std::size_t i = 0; i + 1 < r_grid.size(); ++i)
        if (!(r_grid[i] > r_grid[i + 1]))
            throw std::invalid_argument("tightness_diagnostic: r_grid must be decreasing");

    std::vector<TightnessRow> rows;
    rows.reserve(r_grid.size());
    const double members = static_cast<double>(ensemble.size());
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        TightnessRow row;
        row.r = r_grid[i];
        row.mass_bound = mass_grid[i];
        std::size_t exceeded = 0;
        std::size_t escaped = 0;
        for (const AtomicMeasure& xi : ensemble) {
            double shell_mass = 0.0;
            double outside_mass = 0.0;
            for (const Atom& a : xi.atoms()) {
                if (xi.space().cone_distance(a.location) < row.r) continue;
                shell_mass += a.weight;
                if (!in_box(a.location, box_bound)) outside_mass += a.weight;
            }
            if (shell_mass > row.mass_bound) ++exceeded;
            if (outside_mass >= eps_prime) ++escaped;
        }
        row.frac_mass_exceeded = members > 0.0 ? exceeded / members : 0.0;
        row.frac_escaped = members > 0.0 ? escaped / members : 0.0;
        row.violates = row.frac_mass_exceeded >= eps || row.frac_escaped >= eps;
        rows.push_back(row);
    }
    return rows;
}

ConvergenceReport complete_convergence_experiment(const ExperimentConfig& cfg) {
    if (cfg.n_grid.empty()) throw std::invalid_argument("experiment: empty n grid");
    if (cfg.reps < 100) throw std::invalid_argument("experiment: need at least 100 replicates");
    for (const TestFunction& f : cfg.test_functions)
        if (!(f.vanish_radius() > 0.0))
            throw std::invalid_argument("experiment: test function must vanish near the cone");
    for (const TailSet& set : cfg.tail_sets) {
        validate(set);
        if (!set.time_window)
            throw std::invalid_argument("experiment: tail sets need time windows");
    }

    ScalingFunction b = ScalingFunction::analytic(cfg.sampler);
    if (cfg.use_empirical_b) {
        const auto calibration =
            sample_vector(cfg.sampler, derive_seed(cfg.seed, 0xb), cfg.empirical_b_samples);
        std::vector<double> radii;
        radii.reserve(calibration.size());
        for (const Point& x : calibration) radii.push_back(cfg.sampler.space().cone_distance(x));
        b = ScalingFunction::empirical_quantile(std::move(radii));
    }

    const HomogeneousMeasure limit = cfg.sampler.limit_measure();
    ConvergenceReport report;

    for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
        const std::size_t n = cfg.n_grid[ni];
        const double b_n = b(static_cast<double>(n));
        const std::size_t reps = static_cast<std::size_t>(cfg.reps);

        // laplace_values[f][rep], count_values[set][rep]
        std::vector<std::vector<double>> laplace_values(
            cfg.test_functions.size(), std::vector<double>(reps, 0.0));
        std::vector<std::vector<std::uint64_t>> count_values(
            cfg.tail_sets.size(), std::vector<std::uint64_t>(reps, 0));

        parallel_for(reps, [&](std::size_t rep) {
            const auto samples = sample_vector(cfg.sampler, derive_seed(cfg.seed, ni + 1, rep), n);
            const AtomicMeasure pp = build_empirical_pp(samples, b_n, cfg.sampler.space());
            for (std::size_t fi = 0; fi < cfg.test_functions.size(); ++fi)
                laplace_values[fi][rep] =
                    std::exp(-integrate_against(pp, cfg.test_functions[fi]));
            for (std::size_t si = 0; si < cfg.tail_sets.size(); ++si) {
                const double mass = atomic_mass(pp, cfg.tail_sets[si]);
                count_values[si][rep] = static_cast<std::uint64_t>(std::llround(mass));
            }
        });

        for (std::size_t fi = 0; fi < cfg.test_functions.size(); ++fi) {
            const Summary s = summarize(laplace_values[fi]);
            LaplaceCell cell;
            cell.n = n;
            cell.f_index = fi;
            cell.estimate = s.mean;
            cell.std_error = s.std_error;
            cell.target = analytic_prm_laplace(limit, cfg.test_functions[fi], 1.0);
            cell.gap = std::abs(s.mean - cell.target);
            cell.z = (s.mean - cell.target) / std::max(s.std_error, 1e-300);
            report.laplace.push_back(cell);
        }
        for (std::size_t si = 0; si < cfg.tail_sets.size(); ++si) {
            CountCell cell;
            cell.n = n;
            cell.set_index = si;
            std::uint64_t kmax = 0;
            for (std::uint64_t c : count_values[si]) kmax = std::max(kmax, c);
            cell.histogram.assign(kmax + 1, 0);
            for (std::uint64_t c : count_values[si]) ++cell.histogram[c];
            std::vector<double> as_double(count_values[si].begin(), count_values[si].end());
            cell.mean_count = summarize(as_double).mean;
            cell.target_mean = tail_mass(limit, cfg.tail_sets[si]);
            cell.gof = poisson_count_test(count_values[si], cell.target_mean);
            cell.pass = cell.gof.p_value >= 0.001 && std::abs(cell.gof.mean_z) <= 4.0 &&
                        std::abs(cell.gof.var_z) <= 4.0;
            report.counts.push_back(cell);
        }
    }

    // Laplace gaps must not grow along the n grid (2 SE slack).
    for (std::size_t fi = 0; fi < cfg.test_functions.size(); ++fi) {
        for (std::size_t ni = 0; ni + 1 < cfg.n_grid.size(); ++ni) {
            const LaplaceCell& a = report.laplace[ni * cfg.test_functions.size() + fi];
            const LaplaceCell& c = report.laplace[(ni + 1) * cfg.test_functions.size() + fi];
            if (c.gap > a.gap + 2.0 * (a.std_error + c.std_error))
                report.laplace_gaps_nonincreasing = false;
        }
    }
    const std::size_t last = cfg.n_grid.size() - 1;
    for (const CountCell& cell : report.counts)
        if (cell.n == cfg.n_grid[last] && !cell.pass) report.pass_at_largest_n = false;
    for (const LaplaceCell& cell : report.laplace)
        if (cell.n == cfg.n_grid[last] && std::abs(cell.z) > 4.0)
            report.pass_at_largest_n = false;
    report.pass = report.laplace_gaps_nonincreasing && report.pass_at_largest_n;
    return report;
}

}  // namespace mopp
