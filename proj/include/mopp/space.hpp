#pragma once

#include <string>
#include <vector>

namespace mopp {

enum class SpaceKind {
    euclidean_origin,  // cone C = {0} in R^d
    euclidean_axes,    // cone C = union of coordinate hyperplanes, d >= 2
    product_time,      // [0, inf) x S with C = [0, inf) x C_S
};

struct Point {
    std::vector<double> coords;  // product-time: time value prepended

    bool operator==(const Point&) const = default;
};

/// A metric space (S, d, C) with scalar multiplication. Three kinds are
/// supported: R^d punctured at the origin, R^d minus the coordinate
/// hyperplanes, and the time product [0, inf) x S over either of those.
class SpaceDescriptor {
public:
    static SpaceDescriptor euclidean_origin(int dim);
    static SpaceDescriptor euclidean_axes(int dim);  // dim >= 2

    SpaceKind kind() const { return kind_; }
    /// Dimension of the S factor (excludes the time coordinate).
    int dim() const { return dim_; }
    bool has_time() const { return kind_ == SpaceKind::product_time; }
    /// Number of coordinates a Point in this space carries.
    int point_size() const { return dim_ + (has_time() ? 1 : 0); }
    /// The S factor of a product-time space.
    SpaceDescriptor base() const;

    /// Distance from x to the cone C. Exact for all supported kinds;
    /// positively homogeneous of degree 1 under scale().
    double cone_distance(const Point& x) const;

    /// Scalar multiplication; for product-time the time coordinate is fixed
    /// and only the S part is scaled.
    Point scale(double lambda, const Point& x) const;

    /// Metric on the space; product-time combines the time gap and the base
    /// distance as sqrt(dt^2 + ds^2).
    double distance(const Point& x, const Point& y) const;

    /// Validates coordinate count, finiteness, and time >= 0; throws
    /// std::invalid_argument otherwise.
    void check_point(const Point& x) const;

    std::string name() const;

    bool operator==(const SpaceDescriptor&) const = default;

private:
    SpaceDescriptor(SpaceKind kind, int dim, SpaceKind base_kind)
        : kind_(kind), dim_(dim), base_kind_(base_kind) {}

    friend SpaceDescriptor make_product_space(const SpaceDescriptor& base);

    SpaceKind kind_;
    int dim_;
    SpaceKind base_kind_;  // meaningful only for product_time
};

/// Builds [0, inf) x S over a non-product base space.
SpaceDescriptor make_product_space(const SpaceDescriptor& base);

}  // namespace mopp
