#include "mopp/json_io.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mopp {

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr const char* kReportSchema = "mo-pointproc/report-v1";

double number_or(const json& j, const char* key, double fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    return j.at(key).get<double>();
}

std::vector<double> coords_from(const json& j) { return j.get<std::vector<double>>(); }

}  // namespace

json to_json(const SpaceDescriptor& space) {
    const SpaceDescriptor s = space.has_time() ? space.base() : space;
    json j{{"kind", s.kind() == SpaceKind::euclidean_origin ? "euclidean-origin"
                                                            : "euclidean-axes"},
           {"dim", s.dim()}};
    if (space.has_time()) j["time"] = true;
    return j;
}

SpaceDescriptor space_from_json(const json& j) {
    const std::string kind = j.value("kind", "euclidean-origin");
    const int dim = j.value("dim", 1);
    SpaceDescriptor base = kind == "euclidean-origin" ? SpaceDescriptor::euclidean_origin(dim)
                           : kind == "euclidean-axes"
                               ? SpaceDescriptor::euclidean_axes(dim)
                               : throw std::invalid_argument("unknown space kind: " + kind);
    if (j.value("time", false)) return make_product_space(base);
    return base;
}

json to_json(const AtomicMeasure& m) {
    json atoms = json::array();
    for (const Atom& a : m.atoms()) atoms.push_back({{"x", a.location.coords}, {"w", a.weight}});
    return json{{"space", to_json(m.space())}, {"atoms", std::move(atoms)}};
}

AtomicMeasure measure_from_json(const json& j) {
    const SpaceDescriptor space = space_from_json(j.at("space"));
    std::vector<Atom> atoms;
    for (const json& a : j.at("atoms"))
        atoms.push_back(Atom{Point{coords_from(a.at("x"))}, a.value("w", 1.0)});
    return AtomicMeasure(space, std::move(atoms));
}

json to_json(const MarkedMeasure& m) {
    json atoms = json::array();
    for (std::size_t i = 0; i < m.base.atoms().size(); ++i) {
        const Atom& a = m.base.atoms()[i];
        atoms.push_back({{"x", a.location.coords},
                         {"w", a.weight},
                         {"mark", m.labels[static_cast<std::size_t>(m.marks[i])]}});
    }
    return json{{"space", to_json(m.base.space())},
                {"labels", m.labels},
                {"atoms", std::move(atoms)}};
}

json to_json(const HomogeneousMeasure& h) {
    json angular = json::array();
    for (const AngularAtom& a : h.angular())
        angular.push_back({{"omega", a.direction.coords}, {"w", a.weight}});
    return json{{"alpha", h.alpha()}, {"angular", std::move(angular)},
                {"space", to_json(h.space())}};
}

HomogeneousMeasure homogeneous_from_json(const json& j) {
    std::vector<AngularAtom> angular;
    for (const json& a : j.at("angular"))
        angular.push_back(AngularAtom{Point{coords_from(a.at("omega"))}, a.value("w", 1.0)});
    SpaceDescriptor space =
        j.contains("space")
            ? space_from_json(j.at("space"))
            : SpaceDescriptor::euclidean_origin(
                  angular.empty() ? 1 : static_cast<int>(angular.front().direction.coords.size()));
    return HomogeneousMeasure(space, j.at("alpha").get<double>(), std::move(angular));
}

json to_json(const TailSet& set) {
    json j{{"u_lo", set.u_lo}};
    j["u_hi"] = std::isinf(set.u_hi) ? json(nullptr) : json(set.u_hi);
    if (set.time_window) j["time"] = {set.time_window->t1, set.time_window->t2};
    if (set.directions.empty()) {
        j["directions"] = "all";
    } else {
        json dirs = json::array();
        for (const Point& d : set.directions) dirs.push_back(d.coords);
        j["directions"] = std::move(dirs);
    }
    return j;
}

TailSet tail_set_from_json(const json& j) {
    TailSet set;
    set.u_lo = j.at("u_lo").get<double>();
    set.u_hi = number_or(j, "u_hi", std::numeric_limits<double>::infinity());
    if (j.contains("time") && !j.at("time").is_null()) {
        const auto t = j.at("time").get<std::vector<double>>();
        if (t.size() != 2) throw std::invalid_argument("tail set time window needs [t1, t2]");
        set.time_window = TimeWindow{t[0], t[1]};
    }
    if (j.contains("directions") && j.at("directions").is_array())
        for (const json& d : j.at("directions")) set.directions.push_back(Point{coords_from(d)});
    validate(set);
    return set;
}

json to_json(const TestFunction& f) {
    if (!f.is_step())
        return json{{"form", "ramp"},
                    {"c", f.ramp_height()},
                    {"r", f.ramp_start()},
                    {"w", f.ramp_width()}};
    json pieces = json::array();
    for (const StepPiece& p : f.pieces()) {
        json piece = to_json(p.set);
        piece["c"] = p.height;
        pieces.push_back(std::move(piece));
    }
    return json{{"form", "step"}, {"pieces", std::move(pieces)}};
}

TestFunction test_function_from_json(const json& j) {
    const std::string form = j.value("form", "step");
    if (form == "ramp")
        return TestFunction::ramp(j.at("c").get<double>(), j.at("r").get<double>(),
                                  j.at("w").get<double>());
    if (form != "step") throw std::invalid_argument("unknown test function form: " + form);
    std::optional<TimeWindow> shared;
    if (j.contains("time") && !j.at("time").is_null()) {
        const auto t = j.at("time").get<std::vector<double>>();
        if (t.size() != 2) throw std::invalid_argument("test function time window needs [t1, t2]");
        shared = TimeWindow{t[0], t[1]};
    }
    std::vector<StepPiece> pieces;
    for (const json& p : j.at("pieces")) {
        StepPiece piece;
        piece.set = tail_set_from_json(p);
        if (!piece.set.time_window && shared) piece.set.time_window = shared;
        piece.height = p.at("c").get<double>();
        pieces.push_back(std::move(piece));
    }
    return TestFunction::step(std::move(pieces));
}

json to_json(const HeavyTailSampler& sampler) {
    json angular = json::array();
    for (const AngularAtom& a : sampler.angular())
        angular.push_back({{"omega", a.direction.coords}, {"w", a.weight}});
    json j{{"alpha", sampler.alpha()},
           {"radial", sampler.law() == RadialLaw::pure_pareto ? "pure-pareto" : "log-perturbed"},
           {"angular", std::move(angular)},
           {"space", to_json(sampler.space())}};
    if (sampler.law() == RadialLaw::log_perturbed) j["gamma"] = sampler.gamma();
    return j;
}

HeavyTailSampler sampler_from_json(const json& j) {
    std::vector<AngularAtom> angular;
    for (const json& a : j.at("angular"))
        angular.push_back(AngularAtom{Point{coords_from(a.at("omega"))}, a.value("w", 1.0)});
    SpaceDescriptor space =
        j.contains("space")
            ? space_from_json(j.at("space"))
            : SpaceDescriptor::euclidean_origin(
                  angular.empty() ? 1 : static_cast<int>(angular.front().direction.coords.size()));
    const std::string radial = j.value("radial", "pure-pareto");
    if (radial == "pure-pareto")
        return HeavyTailSampler(space, j.at("alpha").get<double>(), std::move(angular));
    if (radial != "log-perturbed")
        throw std::invalid_argument("unknown radial law: " + radial);
    return HeavyTailSampler(space, j.at("alpha").get<double>(), std::move(angular),
                            RadialLaw::log_perturbed, j.value("gamma", 0.0));
}

ExperimentConfig experiment_config_from_json(const json& j) {
    ExperimentConfig cfg{sampler_from_json(j.at("sampler")),
                         j.at("n_grid").get<std::vector<std::size_t>>(),
                         j.value("reps", 200),
                         {},
                         {},
                         j.value("seed", std::uint64_t{0}),
                         j.value("b_mode", std::string("analytic")) == "empirical",
                         j.value("empirical_b_samples", std::size_t{100000})};
    for (const json& f : j.value("test_functions", json::array()))
        cfg.test_functions.push_back(test_function_from_json(f));
    for (const json& s : j.value("tail_sets", json::array()))
        cfg.tail_sets.push_back(tail_set_from_json(s));
    return cfg;
}

json to_json(const RvCheckReport& report) {
    json rows = json::array();
    for (const RvCheckRow& r : report.rows)
        rows.push_back({{"t", r.t},
                        {"set", r.set_index},
                        {"estimate", r.estimate},
                        {"std_error", r.std_error},
                        {"target", r.target_limit},
                        {"target_finite_t", r.target_finite_t},
                        {"z", r.z_limit},
                        {"z_finite_t", r.z_finite_t}});
    return json{{"rows", std::move(rows)},
                {"reps", report.reps},
                {"samples_per_rep", report.samples_per_rep},
                {"pass", report.pass}};
}

json to_json(const ConvergenceReport& report) {
    json laplace = json::array();
    for (const LaplaceCell& c : report.laplace)
        laplace.push_back({{"n", c.n},
                           {"f", c.f_index},
                           {"estimate", c.estimate},
                           {"std_error", c.std_error},
                           {"target", c.target},
                           {"gap", c.gap},
                           {"z", c.z}});
    json counts = json::array();
    for (const CountCell& c : report.counts)
        counts.push_back({{"n", c.n},
                          {"set", c.set_index},
                          {"histogram", c.histogram},
                          {"mean", c.mean_count},
                          {"target_mean", c.target_mean},
                          {"p_value", c.gof.p_value},
                          {"mean_z", c.gof.mean_z},
                          {"var_z", c.gof.var_z},
                          {"pass", c.pass}});
    return json{{"laplace", std::move(laplace)},
                {"counts", std::move(counts)},
                {"laplace_gaps_nonincreasing", report.laplace_gaps_nonincreasing},
                {"pass_at_largest_n", report.pass_at_largest_n},
                {"pass", report.pass}};
}

json to_json(std::span<const TightnessRow> rows) {
    json out = json::array();
    for (const TightnessRow& r : rows)
        out.push_back({{"r", r.r},
                       {"M", r.mass_bound},
                       {"frac_mass_exceeded", r.frac_mass_exceeded},
                       {"frac_escaped", r.frac_escaped},
                       {"violates", r.violates}});
    return out;
}

json report_envelope(const json& body, const json& resolved_config, std::uint64_t seed) {
    json out = body;
    out["schema"] = kReportSchema;
    out["version"] = kToolVersion;
    out["seed"] = seed;
    out["config"] = resolved_config;
    return out;
}

json parse_json(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw std::invalid_argument("malformed JSON in " + what);
    return j;
}

}  // namespace mopp
