#include "mopp/space.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mopp {

namespace {

double euclidean_norm(const double* v, int n) {
    double ss = 0.0;
    for (int i = 0; i < n; ++i) ss += v[i] * v[i];
    return std::sqrt(ss);
}

double min_abs_coordinate(const double* v, int n) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) m = std::min(m, std::abs(v[i]));
    return m;
}

}  // namespace

SpaceDescriptor SpaceDescriptor::euclidean_origin(int dim) {
    if (dim < 1) throw std::invalid_argument("euclidean_origin: dim must be >= 1");
    return SpaceDescriptor(SpaceKind::euclidean_origin, dim, SpaceKind::euclidean_origin);
}

SpaceDescriptor SpaceDescriptor::euclidean_axes(int dim) {
    if (dim < 2) throw std::invalid_argument("euclidean_axes: dim must be >= 2");
    return SpaceDescriptor(SpaceKind::euclidean_axes, dim, SpaceKind::euclidean_axes);
}

SpaceDescriptor make_product_space(const SpaceDescriptor& base) {
    if (base.has_time())
        throw std::invalid_argument("make_product_space: nesting product-time is unsupported");
    return SpaceDescriptor(SpaceKind::product_time, base.dim(), base.kind());
}

SpaceDescriptor SpaceDescriptor::base() const {
    if (!has_time()) throw std::logic_error("base(): space has no time factor");
    return SpaceDescriptor(base_kind_, dim_, base_kind_);
}

void SpaceDescriptor::check_point(const Point& x) const {
    if (static_cast<int>(x.coords.size()) != point_size())
        throw std::invalid_argument("point has " + std::to_string(x.coords.size()) +
                                    " coordinates, space expects " + std::to_string(point_size()));
    for (double c : x.coords)
        if (!std::isfinite(c)) throw std::invalid_argument("point has a non-finite coordinate");
    if (has_time() && x.coords[0] < 0.0)
        throw std::invalid_argument("product-time point has negative time");
}

double SpaceDescriptor::cone_distance(const Point& x) const {
    check_point(x);
    const double* s = x.coords.data();
    switch (kind_) {
        case SpaceKind::euclidean_origin:
            return euclidean_norm(s, dim_);
        case SpaceKind::euclidean_axes:
            return min_abs_coordinate(s, dim_);
        case SpaceKind::product_time:
            return base_kind_ == SpaceKind::euclidean_origin ? euclidean_norm(s + 1, dim_)
                                                             : min_abs_coordinate(s + 1, dim_);
    }
    throw std::logic_error("unreachable");
}

Point SpaceDescriptor::scale(double lambda, const Point& x) const {
    if (!(lambda >= 0.0)) throw std::invalid_argument("scale: lambda must be >= 0");
    check_point(x);
    Point y = x;
    const std::size_t start = has_time() ? 1 : 0;
    for (std::size_t i = start; i < y.coords.size(); ++i) y.coords[i] *= lambda;
    return y;
}

double SpaceDescriptor::distance(const Point& x, const Point& y) const {
    check_point(x);
    check_point(y);
    double ss = 0.0;
    for (std::size_t i = 0; i < x.coords.size(); ++i) {
        const double d = x.coords[i] - y.coords[i];
        ss += d * d;
    }
    return std::sqrt(ss);
}

std::string SpaceDescriptor::name() const {
    switch (kind_) {
        case SpaceKind::euclidean_origin:
            return "euclidean-origin(" + std::to_string(dim_) + ")";
        case SpaceKind::euclidean_axes:
            return "euclidean-axes(" + std::to_string(dim_) + ")";
        case SpaceKind::product_time:
            return "time x " + base().name();
    }
    return "?";
}

}  // namespace mopp
