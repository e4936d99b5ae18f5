#include "mopp/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "mopp/stats.hpp"

namespace mopp {

namespace {

bool bands_overlap(const TailSet& a, const TailSet& b) {
    return std::max(a.u_lo, b.u_lo) < std::min(a.u_hi, b.u_hi);
}

bool windows_overlap(const std::optional<TimeWindow>& a, const std::optional<TimeWindow>& b) {
    if (!a || !b) return true;  // missing window = whole time axis
    return std::max(a->t1, b->t1) < std::min(a->t2, b->t2);
}

bool directions_overlap(const std::vector<Point>& a, const std::vector<Point>& b) {
    if (a.empty() || b.empty()) return true;  // empty = all directions
    for (const Point& p : a)
        for (const Point& q : b) {
            if (p.coords.size() != q.coords.size()) continue;
            double ss = 0.0;
            for (std::size_t i = 0; i < p.coords.size(); ++i) {
                const double d = p.coords[i] - q.coords[i];
                ss += d * d;
            }
            if (ss <= 1e-18) return true;
        }
    return false;
}

bool tail_sets_overlap(const TailSet& a, const TailSet& b) {
    return bands_overlap(a, b) && windows_overlap(a.time_window, b.time_window) &&
           directions_overlap(a.directions, b.directions);
}

// Adaptive Simpson with absolute tolerance.
double simpson(double a, double fa, double fm, double b, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double fa, double b,
                        double fb, double whole, double fm, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(a, fa, flm, m, fm);
    const double right = simpson(m, fm, frm, b, fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, fa, m, fm, left, flm, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, fm, b, fb, right, frm, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    return adaptive_simpson(f, a, fa, b, fb, simpson(a, fa, fm, b, fb), fm, tol, 48);
}

}  // namespace

TestFunction TestFunction::step(std::vector<StepPiece> pieces) {
    for (const StepPiece& p : pieces) {
        validate(p.set);
        if (!(p.height >= 0.0)) throw std::invalid_argument("step height must be >= 0");
    }
    for (std::size_t i = 0; i < pieces.size(); ++i)
        for (std::size_t j = i + 1; j < pieces.size(); ++j)
            if (tail_sets_overlap(pieces[i].set, pieces[j].set))
                throw std::invalid_argument("step pieces must use disjoint tail sets");
    TestFunction f;
    f.is_step_ = true;
    f.pieces_ = std::move(pieces);
    return f;
}

TestFunction TestFunction::ramp(double height, double r, double width) {
    if (!(height >= 0.0)) throw std::invalid_argument("ramp height must be >= 0");
    if (!(r > 0.0)) throw std::invalid_argument("ramp start must be positive");
    if (!(width > 0.0)) throw std::invalid_argument("ramp width must be positive");
    TestFunction f;
    f.is_step_ = false;
    f.height_ = height;
    f.start_ = r;
    f.width_ = width;
    return f;
}

double TestFunction::vanish_radius() const {
    if (!is_step_) return start_;
    double r = std::numeric_limits<double>::infinity();
    for (const StepPiece& p : pieces_) r = std::min(r, p.set.u_lo);
    return std::isinf(r) ? 1.0 : r;  // empty step function vanishes everywhere
}

double TestFunction::bound() const {
    if (!is_step_) return height_;
    double b = 0.0;
    for (const StepPiece& p : pieces_) b = std::max(b, p.height);
    return b;
}

double TestFunction::operator()(const SpaceDescriptor& space, const Point& x) const {
    if (!is_step_) {
        const double cd = space.cone_distance(x);
        const double t = (cd - start_) / width_;
        return height_ * std::clamp(t, 0.0, 1.0);
    }
    for (const StepPiece& p : pieces_)
        if (tail_set_contains(p.set, space, x)) return p.height;  // pieces disjoint
    return 0.0;
}

double integrate_against(const AtomicMeasure& n, const TestFunction& f) {
    double total = 0.0;
    for (const Atom& a : n.atoms()) total += a.weight * f(n.space(), a.location);
    return total;
}

double analytic_prm_laplace(const HomogeneousMeasure& mean, const TestFunction& f,
                            std::optional<double> time_horizon) {
    if (time_horizon && !(*time_horizon > 0.0))
        throw std::invalid_argument("time horizon must be positive");
    double exponent = 0.0;
    if (f.is_step()) {
        for (const StepPiece& p : f.pieces()) {
            if (p.set.time_window && !time_horizon)
                throw std::invalid_argument("time-windowed piece without a time horizon");
            double mass = tail_mass(mean, p.set);
            // tail_mass already multiplies by the window length; a piece
            // without a window covers the whole horizon.
            if (time_horizon && !p.set.time_window) mass *= *time_horizon;
            exponent += (1.0 - std::exp(-p.height)) * mass;
        }
    } else {
        const double c = f.ramp_height();
        const double r = f.ramp_start();
        const double w = f.ramp_width();
        const double alpha = mean.alpha();
        // Radial density per unit angular weight: alpha s^{-alpha-1} ds.
        const auto integrand = [&](double s) {
            const double fv = c * std::clamp((s - r) / w, 0.0, 1.0);
            return (1.0 - std::exp(-fv)) * alpha * std::pow(s, -alpha - 1.0);
        };
        double per_weight = integrate(integrand, r, r + w, 1e-10);
        per_weight += (1.0 - std::exp(-c)) * std::pow(r + w, -alpha);
        double mass = per_weight * mean.total_angular_weight();
        if (time_horizon) mass *= *time_horizon;
        exponent = mass;
    }
    return std::exp(-exponent);
}

LaplaceEstimate empirical_laplace(std::span<const AtomicMeasure> samples, const TestFunction& f) {
    if (samples.size() < 2)
        throw std::invalid_argument("empirical_laplace: need at least 2 samples");
    std::vector<double> values;
    values.reserve(samples.size());
    for (const AtomicMeasure& n : samples) values.push_back(std::exp(-integrate_against(n, f)));
    const Summary s = summarize(values);
    return LaplaceEstimate{s.mean, s.std_error};
}

ContinuityReport laplace_continuity_check(std::span<const AtomicMeasure> samples,
                                          std::span<const TestFunction> f_sequence,
                                          const TestFunction& f_limit) {
    ContinuityReport report;
    const double r_limit = f_limit.vanish_radius();
    report.common_vanish_radius = r_limit;
    for (const TestFunction& f : f_sequence) {
        report.common_vanish_radius = std::min(report.common_vanish_radius, f.vanish_radius());
        if (std::abs(f.vanish_radius() - r_limit) > 1e-12) report.vanish_radii_match = false;
    }

    std::vector<double> limit_values;
    limit_values.reserve(samples.size());
    for (const AtomicMeasure& n : samples)
        limit_values.push_back(std::exp(-integrate_against(n, f_limit)));

    for (const TestFunction& f : f_sequence) {
        std::vector<double> diffs;
        diffs.reserve(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i)
            diffs.push_back(std::exp(-integrate_against(samples[i], f)) - limit_values[i]);
        const Summary s = summarize(diffs);
        report.gaps.push_back(std::abs(s.mean));
        report.std_errors.push_back(s.std_error);
    }
    for (std::size_t i = 0; i + 1 < report.gaps.size(); ++i) {
        const double slack = 3.0 * (report.std_errors[i] + report.std_errors[i + 1]);
        if (report.gaps[i + 1] > report.gaps[i] + slack) report.gaps_monotone = false;
    }
    return report;
}

}  // namespace mopp
