#include "mopp/regvar.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mopp/parallel.hpp"
#include "mopp/stats.hpp"

namespace mopp {

HeavyTailSampler::HeavyTailSampler(SpaceDescriptor space, double alpha,
                                   std::vector<AngularAtom> angular, RadialLaw law, double gamma)
    : space_(space), alpha_(alpha), angular_(std::move(angular)), law_(law), gamma_(gamma) {
    if (space_.has_time())
        throw std::invalid_argument("HeavyTailSampler: draws live on the S factor");
    if (!(alpha_ > 0.0)) throw std::invalid_argument("HeavyTailSampler: alpha must be positive");
    if (angular_.empty()) throw std::invalid_argument("HeavyTailSampler: empty angular measure");
    for (const AngularAtom& a : angular_) {
        if (!(a.weight > 0.0)) throw std::invalid_argument("angular weight must be positive");
        if (std::abs(space_.cone_distance(a.direction) - 1.0) > 1e-12)
            throw std::invalid_argument("angular direction must have cone distance 1");
        direction_weights_.push_back(a.weight);
    }
    if (law_ == RadialLaw::pure_pareto) {
        gamma_ = 0.0;
    } else if (!(gamma_ <= alpha_)) {
        // gamma <= alpha keeps s^-alpha (1 + log s)^gamma a valid
        // nonincreasing tail equal to 1 at s = 1.
        throw std::invalid_argument("log-perturbed law requires gamma <= alpha");
    }
}

double HeavyTailSampler::radial_tail(double s) const {
    if (s <= 1.0) return 1.0;
    if (law_ == RadialLaw::pure_pareto) return std::pow(s, -alpha_);
    return std::pow(s, -alpha_) * std::pow(1.0 + std::log(s), gamma_);
}

double HeavyTailSampler::radial_quantile(double u) const {
    if (!(u > 0.0 && u <= 1.0))
        throw std::invalid_argument("radial_quantile: u must be in (0, 1]");
    if (law_ == RadialLaw::pure_pareto) return std::pow(u, -1.0 / alpha_);
    // Solve -alpha y + gamma log(1 + y) = log u for y = log s. The left side
    // is nonincreasing for gamma <= alpha, so Newton steps clipped to a
    // shrinking bracket converge deterministically.
    const double target = std::log(u);
    if (target == 0.0) return 1.0;
    const auto g = [&](double y) { return -alpha_ * y + gamma_ * std::log1p(y) - target; };
    double lo = 0.0;
    double hi = std::max(1.0, -2.0 * target / alpha_);
    while (g(hi) > 0.0) hi *= 2.0;
    double y = -target / alpha_;  // pure Pareto guess
    for (int i = 0; i < 80; ++i) {
        const double value = g(y);
        if (value > 0.0)
            lo = y;
        else
            hi = y;
        const double slope = -alpha_ + gamma_ / (1.0 + y);
        double next = slope < 0.0 ? y - value / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == y || hi - lo < 1e-15 * (1.0 + hi)) break;
        y = next;
    }
    return std::exp(y);
}

Point HeavyTailSampler::draw(RngStream& rng) const {
    const std::size_t k = rng.next_index(direction_weights_);
    const double radius = radial_quantile(rng.next_unit_open());
    return space_.scale(radius, angular_[k].direction);
}

HomogeneousMeasure HeavyTailSampler::limit_measure() const {
    double total = 0.0;
    for (double w : direction_weights_) total += w;
    std::vector<AngularAtom> normalized = angular_;
    for (AngularAtom& a : normalized) a.weight /= total;
    return HomogeneousMeasure(space_, alpha_, std::move(normalized));
}

double HeavyTailSampler::finite_t_mass(double t, double b_t, const TailSet& set) const {
    validate(set);
    if (set.time_window)
        throw std::invalid_argument("finite_t_mass: sampler draws have no time coordinate");
    double total = 0.0;
    for (double w : direction_weights_) total += w;
    const double hi_tail = std::isinf(set.u_hi) ? 0.0 : radial_tail(b_t * set.u_hi);
    const double band = radial_tail(b_t * set.u_lo) - hi_tail;
    double prob = 0.0;
    for (std::size_t k = 0; k < angular_.size(); ++k) {
        bool matches = set.directions.empty();
        if (!matches) {
            TailSet probe = set;
            probe.u_lo = 0.5;
            probe.u_hi = 2.0;
            matches = tail_set_contains(probe, space_, angular_[k].direction);
        }
        if (matches) prob += direction_weights_[k] / total;
    }
    return t * prob * band;
}

std::vector<Point> sample_vector(const HeavyTailSampler& s, std::uint64_t seed,
                                 std::size_t count) {
    if (count < 1) throw std::invalid_argument("sample_vector: count must be >= 1");
    RngStream rng(seed, 3);
    std::vector<Point> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(s.draw(rng));
    return out;
}

ScalingFunction ScalingFunction::analytic(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("ScalingFunction: alpha must be positive");
    ScalingFunction b;
    b.mode_ = Mode::pareto;
    b.alpha_ = alpha;
    return b;
}

ScalingFunction ScalingFunction::analytic(const HeavyTailSampler& sampler) {
    ScalingFunction b;
    if (sampler.law() == RadialLaw::pure_pareto) {
        b.mode_ = Mode::pareto;
        b.alpha_ = sampler.alpha();
    } else {
        b.mode_ = Mode::law;
        b.sampler_ = std::make_shared<HeavyTailSampler>(sampler);
    }
    return b;
}

ScalingFunction ScalingFunction::empirical_quantile(std::vector<double> cone_distances) {
    if (cone_distances.empty())
        throw std::invalid_argument("ScalingFunction: empty calibration sample");
    ScalingFunction b;
    b.mode_ = Mode::empirical;
    b.sorted_values_ = std::move(cone_distances);
    std::sort(b.sorted_values_.begin(), b.sorted_values_.end());
    return b;
}

double ScalingFunction::operator()(double t) const {
    if (!(t >= 1.0)) throw std::invalid_argument("ScalingFunction: t must be >= 1");
    switch (mode_) {
        case Mode::pareto:
            return std::pow(t, 1.0 / alpha_);
        case Mode::law:
            return sampler_->radial_quantile(1.0 / t);
        case Mode::empirical: {
            const double m = static_cast<double>(sorted_values_.size());
            const double target = m / t;  // allowed count above the quantile
            // Smallest order statistic with at most target values above it.
            std::size_t lo = 0;
            std::size_t hi = sorted_values_.size() - 1;
            while (lo < hi) {
                const std::size_t mid = (lo + hi) / 2;
                const auto above = sorted_values_.end() -
                                   std::upper_bound(sorted_values_.begin(), sorted_values_.end(),
                                                    sorted_values_[mid]);
                if (static_cast<double>(above) <= target)
                    hi = mid;
                else
                    lo = mid + 1;
            }
            return sorted_values_[lo];
        }
    }
    throw std::logic_error("unreachable");
}

AtomicMeasure empirical_tail_measure(std::span<const Point> samples, double t,
                                     const ScalingFunction& b, const SpaceDescriptor& space) {
    if (samples.empty()) throw std::invalid_argument("empirical_tail_measure: no samples");
    const double b_t = b(t);
    const double weight = t / static_cast<double>(samples.size());
    std::vector<Atom> atoms;
    atoms.reserve(samples.size());
    for (const Point& x : samples) {
        Point y = space.scale(1.0 / b_t, x);
        if (space.cone_distance(y) > 0.0) atoms.push_back(Atom{std::move(y), weight});
    }
    return AtomicMeasure(space, std::move(atoms));
}

RvCheckReport rv_check(const HeavyTailSampler& sampler, const HomogeneousMeasure& mean,
                       std::span<const double> t_grid, std::span<const TailSet> tail_sets,
                       int reps, std::uint64_t seed, std::size_t samples_per_rep,
                       const ScalingFunction* scaling) {
    if (reps < 2) throw std::invalid_argument("rv_check: need at least 2 replicates");
    for (const TailSet& set : tail_sets) validate(set);
    const ScalingFunction b =
        scaling ? *scaling : ScalingFunction::analytic(sampler);

    RvCheckReport report;
    report.reps = reps;
    report.samples_per_rep = samples_per_rep;

    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        const double t = t_grid[ti];
        // estimates[set][rep]
        std::vector<std::vector<double>> estimates(tail_sets.size(),
                                                   std::vector<double>(reps, 0.0));
        parallel_for(static_cast<std::size_t>(reps), [&](std::size_t rep) {
            const auto samples =
                sample_vector(sampler, derive_seed(seed, ti, rep), samples_per_rep);
            const AtomicMeasure nu = empirical_tail_measure(samples, t, b, sampler.space());
            for (std::size_t si = 0; si < tail_sets.size(); ++si)
                estimates[si][rep] = atomic_mass(nu, tail_sets[si]);
        });
        for (std::size_t si = 0; si < tail_sets.size(); ++si) {
            const Summary s = summarize(estimates[si]);
            RvCheckRow row;
            row.t = t;
            row.set_index = si;
            row.estimate = s.mean;
            row.std_error = s.std_error;
            row.target_limit = tail_mass(mean, tail_sets[si]);
            row.target_finite_t = sampler.finite_t_mass(t, b(t), tail_sets[si]);
            const double se = std::max(s.std_error, 1e-300);
            row.z_limit = (s.mean - row.target_limit) / se;
            row.z_finite_t = (s.mean - row.target_finite_t) / se;
            if (std::abs(row.z_limit) > 4.0) report.pass = false;
            report.rows.push_back(row);
        }
    }
    return report;
}

}  // namespace mopp
