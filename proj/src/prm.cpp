#include "mopp/prm.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mopp {

namespace {

void validate_spec(const PrmSpec& spec) {
    if (!(spec.r_min > 0.0)) throw std::invalid_argument("PrmSpec: r_min must be positive");
    if (spec.time_horizon && !(*spec.time_horizon > 0.0))
        throw std::invalid_argument("PrmSpec: time horizon must be positive");
}

SpaceDescriptor sample_space(const PrmSpec& spec) {
    return spec.time_horizon ? make_product_space(spec.mean.space()) : spec.mean.space();
}

// Radius with P(R > s | a <= R < b) matching the alpha tail restricted to
// the band [a, b); b may be infinite.
double band_radius(RngStream& rng, double alpha, double a, double b) {
    const double lo = std::pow(a, -alpha);
    const double hi = std::isinf(b) ? 0.0 : std::pow(b, -alpha);
    const double u = rng.next_unit_open();
    return std::pow(lo - u * (lo - hi), -1.0 / alpha);
}

// Draws `count` atoms with radii in [a, b) and appends them.
void append_band_atoms(std::vector<Atom>& atoms, RngStream& rng, const PrmSpec& spec,
                       std::uint64_t count, double a, double b) {
    std::vector<double> weights;
    weights.reserve(spec.mean.angular().size());
    for (const AngularAtom& w : spec.mean.angular()) weights.push_back(w.weight);

    for (std::uint64_t i = 0; i < count; ++i) {
        const std::size_t k = rng.next_index(weights);
        const double radius = band_radius(rng, spec.mean.alpha(), a, b);
        Point x = spec.mean.space().scale(radius, spec.mean.angular()[k].direction);
        if (spec.time_horizon) x.coords.insert(x.coords.begin(), rng.next_range(*spec.time_horizon));
        atoms.push_back(Atom{std::move(x), 1.0});
    }
}

double band_mass(const PrmSpec& spec, double a, double b) {
    const double lo = std::pow(a, -spec.mean.alpha());
    const double hi = std::isinf(b) ? 0.0 : std::pow(b, -spec.mean.alpha());
    const double time_factor = spec.time_horizon ? *spec.time_horizon : 1.0;
    double w = 0.0;
    for (const AngularAtom& a_k : spec.mean.angular()) w += a_k.weight;
    return w * (lo - hi) * time_factor;
}

}  // namespace

double expected_count(const PrmSpec& spec) {
    validate_spec(spec);
    return band_mass(spec, spec.r_min, std::numeric_limits<double>::infinity());
}

AtomicMeasure sample_prm(const PrmSpec& spec, std::uint64_t seed) {
    validate_spec(spec);
    const SpaceDescriptor space = sample_space(spec);
    RngStream rng(seed, 0, 0);
    const std::uint64_t count = poisson_draw(rng, expected_count(spec));
    std::vector<Atom> atoms;
    atoms.reserve(count);
    append_band_atoms(atoms, rng, spec, count, spec.r_min,
                      std::numeric_limits<double>::infinity());
    return AtomicMeasure(space, std::move(atoms));
}

AtomicMeasure sample_prm_annuli(const PrmSpec& spec, std::uint64_t seed, int rings) {
    validate_spec(spec);
    if (rings < 1) throw std::invalid_argument("sample_prm_annuli: rings must be >= 1");
    const SpaceDescriptor space = sample_space(spec);

    // Geometric radii r_min * 2^(rings-1) down to r_min; ring j covers
    // [boundary_j, boundary_{j-1}) and ring 0 is the unbounded outer region.
    // Ring streams are keyed (seed, 0, ring); rings = 1 therefore replays
    // sample_prm exactly.
    std::vector<Atom> atoms;
    const double inf = std::numeric_limits<double>::infinity();
    for (int j = 0; j < rings; ++j) {
        const double hi = j == 0 ? inf : spec.r_min * std::ldexp(1.0, rings - j);
        const double lo = spec.r_min * std::ldexp(1.0, rings - 1 - j);
        RngStream rng(seed, 0, static_cast<std::uint64_t>(j));
        const std::uint64_t count = poisson_draw(rng, band_mass(spec, lo, hi));
        append_band_atoms(atoms, rng, spec, count, lo, hi);
    }
    return AtomicMeasure(space, std::move(atoms));
}

AtomicMeasure map_prm(const AtomicMeasure& n, const PointTransform& transform) {
    const SpaceDescriptor& space = n.space();
    std::vector<Atom> mapped;
    mapped.reserve(n.size());
    for (const Atom& a : n.atoms()) {
        Atom out = a;
        if (const auto* s = std::get_if<ScaleBy>(&transform)) {
            if (!(s->lambda > 0.0)) throw std::invalid_argument("map_prm: lambda must be positive");
            out.location = space.scale(s->lambda, a.location);
        } else {
            const auto& p = std::get<NormPower>(transform);
            if (!(p.beta > 0.0)) throw std::invalid_argument("map_prm: beta must be positive");
            const double r = space.cone_distance(a.location);
            // (r, w) -> (r^beta, w): rescale the S part by r^(beta-1).
            out.location = space.scale(std::pow(r, p.beta - 1.0), a.location);
        }
        mapped.push_back(std::move(out));
    }
    return AtomicMeasure(space, std::move(mapped));
}

MarkKernel MarkKernel::bernoulli(double q) {
    return bernoulli([q](const Point&) { return q; });
}

MarkKernel MarkKernel::bernoulli(std::function<double(const Point&)> q) {
    MarkKernel k;
    k.labels_ = {"0", "1"};
    k.probs_ = [q = std::move(q)](const Point& x) {
        const double p = q(x);
        return std::vector<double>{1.0 - p, p};
    };
    return k;
}

MarkKernel MarkKernel::discrete(std::vector<std::string> labels, std::vector<double> probs) {
    if (labels.size() != probs.size())
        throw std::invalid_argument("MarkKernel: labels/probs size mismatch");
    return discrete(std::move(labels), [probs = std::move(probs)](const Point&) { return probs; });
}

MarkKernel MarkKernel::discrete(std::vector<std::string> labels, ProbFn probs) {
    if (labels.empty()) throw std::invalid_argument("MarkKernel: empty label set");
    MarkKernel k;
    k.labels_ = std::move(labels);
    k.probs_ = std::move(probs);
    return k;
}

std::vector<double> MarkKernel::probs_at(const Point& x) const {
    std::vector<double> p = probs_(x);
    if (p.size() != labels_.size())
        throw std::invalid_argument("MarkKernel: probability vector size mismatch");
    double total = 0.0;
    for (double v : p) {
        if (!(v >= 0.0)) throw std::invalid_argument("MarkKernel: negative probability");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("MarkKernel: probabilities must sum to 1");
    return p;
}

AtomicMeasure MarkedMeasure::subprocess(const std::string& label) const {
    int id = -1;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) id = static_cast<int>(i);
    if (id < 0) throw std::invalid_argument("subprocess: unknown label " + label);
    std::vector<Atom> kept;
    for (std::size_t i = 0; i < base.atoms().size(); ++i)
        if (marks[i] == id) kept.push_back(base.atoms()[i]);
    return AtomicMeasure(base.space(), std::move(kept));
}

MarkedMeasure mark_prm(const AtomicMeasure& n, const MarkKernel& kernel, std::uint64_t seed) {
    MarkedMeasure out{AtomicMeasure(n.space(), n.atoms()), {}, kernel.labels()};
    out.marks.reserve(n.size());
    RngStream rng(seed, 2);
    for (const Atom& a : n.atoms()) {
        const std::vector<double> p = kernel.probs_at(a.location);
        out.marks.push_back(static_cast<int>(rng.next_index(p)));
    }
    return out;
}

}  // namespace mopp
