#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "mopp/space.hpp"

namespace mopp {

struct Atom {
    Point location;
    double weight = 1.0;
};

/// Finite purely-atomic measure with all atoms off the cone. Construction
/// canonicalizes: atoms are sorted lexicographically by coordinates and
/// equal locations are merged by summing weights.
class AtomicMeasure {
public:
    AtomicMeasure(SpaceDescriptor space, std::vector<Atom> atoms);

    static AtomicMeasure empty(const SpaceDescriptor& space) {
        return AtomicMeasure(space, {});
    }

    const SpaceDescriptor& space() const { return space_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool is_empty() const { return atoms_.empty(); }
    double total_mass() const;

    /// Restriction to the closed set {x : d(x, C) >= r}, r > 0.
    AtomicMeasure restricted(double r) const;

private:
    SpaceDescriptor space_;
    std::vector<Atom> atoms_;
};

struct Decomposition {
    AtomicMeasure atomic;
    // Diffuse component of the decomposition; identically null for this
    // representation, kept explicit so callers see both parts.
    std::optional<AtomicMeasure> diffuse;
};

/// Splits a measure into purely atomic + diffuse parts. The atomic part is
/// the canonicalized input; the diffuse part is always the null marker.
Decomposition decompose(const AtomicMeasure& m);

/// True iff every canonical atom weight is a positive integer (tolerance
/// 1e-9); the remaining counting-measure conditions hold by representation.
bool is_counting(const AtomicMeasure& m);

struct AngularAtom {
    Point direction;  // cone_distance(direction) == 1 within 1e-12
    double weight = 1.0;
};

/// Homogeneous limit measure: tail index alpha plus a finite discrete
/// angular measure. Mass of {r w : r > u, w = w_k} is weight_k * u^-alpha,
/// so masses of tail sets have exact closed forms.
class HomogeneousMeasure {
public:
    HomogeneousMeasure(SpaceDescriptor space, double alpha, std::vector<AngularAtom> angular);

    const SpaceDescriptor& space() const { return space_; }
    double alpha() const { return alpha_; }
    const std::vector<AngularAtom>& angular() const { return angular_; }
    double total_angular_weight() const;

private:
    SpaceDescriptor space_;
    double alpha_;
    std::vector<AngularAtom> angular_;
};

struct TimeWindow {
    double t1 = 0.0;
    double t2 = 1.0;  // membership: t1 < t <= t2
};

/// Cone-distance band u_lo < d(x, C) <= u_hi, optionally restricted to a
/// finite set of directions and (on product-time spaces) a time window.
/// Always bounded away from the cone since u_lo > 0.
struct TailSet {
    double u_lo = 1.0;
    double u_hi = std::numeric_limits<double>::infinity();
    std::vector<Point> directions;  // empty: all directions
    std::optional<TimeWindow> time_window;
};

inline TailSet tail_above(double u) { return TailSet{u, std::numeric_limits<double>::infinity(), {}, {}}; }

/// Throws std::invalid_argument when the band or window is degenerate.
void validate(const TailSet& set);

/// Scales the band by lambda (the set lambda * A).
TailSet scaled(const TailSet& set, double lambda);

/// Membership of a point of `space` in the tail set.
bool tail_set_contains(const TailSet& set, const SpaceDescriptor& space, const Point& x);

/// Exact mass the homogeneous measure assigns to the tail set; the time
/// factor (t2 - t1) applies when a window is present (mean measure dt x dmu).
double tail_mass(const HomogeneousMeasure& h, const TailSet& set);

/// Sum of weights of the atoms lying in the tail set.
double atomic_mass(const AtomicMeasure& m, const TailSet& set);

}  // namespace mopp
