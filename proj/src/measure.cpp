#include "mopp/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mopp {

namespace {

constexpr double kDirectionTol = 1e-9;
constexpr double kIntegerTol = 1e-9;

bool lex_less(const Point& a, const Point& b) { return a.coords < b.coords; }

double sq_gap(const Point& a, const Point& b) {
    double ss = 0.0;
    for (std::size_t i = 0; i < a.coords.size(); ++i) {
        const double d = a.coords[i] - b.coords[i];
        ss += d * d;
    }
    return ss;
}

// Unit direction of the S part of x, given its cone distance.
Point unit_direction(const SpaceDescriptor& space, const Point& x, double cd) {
    Point s = x;
    if (space.has_time()) s.coords.erase(s.coords.begin());
    for (double& c : s.coords) c /= cd;
    return s;
}

bool direction_matches(const Point& dir, const std::vector<Point>& allowed) {
    for (const Point& d : allowed) {
        if (d.coords.size() != dir.coords.size()) continue;
        if (sq_gap(d, dir) <= kDirectionTol * kDirectionTol) return true;
    }
    return false;
}

}  // namespace

AtomicMeasure::AtomicMeasure(SpaceDescriptor space, std::vector<Atom> atoms)
    : space_(space), atoms_(std::move(atoms)) {
    for (const Atom& a : atoms_) {
        if (!(a.weight > 0.0)) throw std::invalid_argument("atom weight must be positive");
        if (!(space_.cone_distance(a.location) > 0.0))
            throw std::invalid_argument("atom location lies on the cone");
    }
    std::sort(atoms_.begin(), atoms_.end(),
              [](const Atom& a, const Atom& b) { return lex_less(a.location, b.location); });
    // Merge exactly equal locations.
    std::size_t out = 0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (out > 0 && atoms_[out - 1].location == atoms_[i].location) {
            atoms_[out - 1].weight += atoms_[i].weight;
        } else {
            atoms_[out++] = atoms_[i];
        }
    }
    atoms_.resize(out);
}

double AtomicMeasure::total_mass() const {
    double total = 0.0;
    for (const Atom& a : atoms_) total += a.weight;
    return total;
}

AtomicMeasure AtomicMeasure::restricted(double r) const {
    if (!(r > 0.0)) throw std::invalid_argument("restricted: r must be positive");
    std::vector<Atom> kept;
    for (const Atom& a : atoms_)
        if (space_.cone_distance(a.location) >= r) kept.push_back(a);
    return AtomicMeasure(space_, std::move(kept));
}

Decomposition decompose(const AtomicMeasure& m) {
    return Decomposition{AtomicMeasure(m.space(), m.atoms()), std::nullopt};
}

bool is_counting(const AtomicMeasure& m) {
    for (const Atom& a : m.atoms()) {
        const double nearest = std::round(a.weight);
        if (nearest < 1.0 || std::abs(a.weight - nearest) > kIntegerTol) return false;
    }
    return true;
}

HomogeneousMeasure::HomogeneousMeasure(SpaceDescriptor space, double alpha,
                                       std::vector<AngularAtom> angular)
    : space_(space), alpha_(alpha), angular_(std::move(angular)) {
    if (space_.has_time())
        throw std::invalid_argument("HomogeneousMeasure lives on the S factor, not product-time");
    if (!(alpha_ > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (angular_.empty()) throw std::invalid_argument("angular measure must be nonzero");
    for (const AngularAtom& a : angular_) {
        if (!(a.weight > 0.0)) throw std::invalid_argument("angular weight must be positive");
        if (std::abs(space_.cone_distance(a.direction) - 1.0) > 1e-12)
            throw std::invalid_argument("angular direction must have cone distance 1");
    }
}

double HomogeneousMeasure::total_angular_weight() const {
    double total = 0.0;
    for (const AngularAtom& a : angular_) total += a.weight;
    return total;
}

void validate(const TailSet& set) {
    if (!(set.u_lo > 0.0) || !(set.u_lo < set.u_hi))
        throw std::invalid_argument("tail set requires 0 < u_lo < u_hi");
    if (set.time_window && !(set.time_window->t1 < set.time_window->t2))
        throw std::invalid_argument("tail set time window requires t1 < t2");
}

TailSet scaled(const TailSet& set, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("scaled: lambda must be positive");
    TailSet out = set;
    out.u_lo *= lambda;
    out.u_hi *= lambda;
    return out;
}

bool tail_set_contains(const TailSet& set, const SpaceDescriptor& space, const Point& x) {
    validate(set);
    const double cd = space.cone_distance(x);
    if (!(cd > set.u_lo && cd <= set.u_hi)) return false;
    if (set.time_window) {
        if (!space.has_time())
            throw std::invalid_argument("tail set has a time window but the space has no time axis");
        const double t = x.coords[0];
        if (!(t > set.time_window->t1 && t <= set.time_window->t2)) return false;
    }
    if (!set.directions.empty()) {
        if (!direction_matches(unit_direction(space, x, cd), set.directions)) return false;
    }
    return true;
}

double tail_mass(const HomogeneousMeasure& h, const TailSet& set) {
    validate(set);
    const double hi_term =
        std::isinf(set.u_hi) ? 0.0 : std::pow(set.u_hi, -h.alpha());
    const double band = std::pow(set.u_lo, -h.alpha()) - hi_term;
    double weight = 0.0;
    for (const AngularAtom& a : h.angular()) {
        if (set.directions.empty() || direction_matches(a.direction, set.directions))
            weight += a.weight;
    }
    const double time_factor = set.time_window ? (set.time_window->t2 - set.time_window->t1) : 1.0;
    return weight * band * time_factor;
}

double atomic_mass(const AtomicMeasure& m, const TailSet& set) {
    validate(set);
    double mass = 0.0;
    for (const Atom& a : m.atoms())
        if (tail_set_contains(set, m.space(), a.location)) mass += a.weight;
    return mass;
}

}  // namespace mopp
