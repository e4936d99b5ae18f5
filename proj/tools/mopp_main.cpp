// mopp: reproducible experiments with Poisson random measures and tail
// metrics on cone-punctured spaces. Subcommands: prm sample|map|mark,
// distance, rv check, converge complete, tightness.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "mopp/convergence.hpp"
#include "mopp/json_io.hpp"
#include "mopp/prohorov.hpp"
#include "mopp/stats.hpp"

namespace {

using mopp::json;

constexpr const char* kVersion = "0.1.0";

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::invalid_argument("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json load_json(const std::string& path) { return mopp::parse_json(read_file(path), path); }

std::string measure_to_csv(const mopp::AtomicMeasure& m, const std::vector<int>* marks,
                           const std::vector<std::string>* labels) {
    std::ostringstream out;
    const bool has_time = m.space().has_time();
    if (has_time) out << "t,";
    for (int i = 1; i <= m.space().dim(); ++i) out << "x" << i << ",";
    out << "w";
    if (marks) out << ",mark";
    out << "\n";
    for (std::size_t i = 0; i < m.atoms().size(); ++i) {
        const mopp::Atom& a = m.atoms()[i];
        for (double c : a.location.coords) out << format_double(c) << ",";
        out << format_double(a.weight);
        if (marks) out << "," << (*labels)[static_cast<std::size_t>((*marks)[i])];
        out << "\n";
    }
    return out.str();
}

mopp::AtomicMeasure measure_from_csv(const std::string& text, const mopp::SpaceDescriptor& space) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty CSV input");
    std::vector<mopp::Atom> atoms;
    const std::size_t coord_count = static_cast<std::size_t>(space.point_size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::istringstream row(line);
        std::string field;
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (fields.size() < coord_count + 1)
            throw std::invalid_argument("CSV row has too few fields: " + line);
        mopp::Atom a;
        for (std::size_t i = 0; i < coord_count; ++i)
            a.location.coords.push_back(std::stod(fields[i]));
        a.weight = std::stod(fields[coord_count]);
        atoms.push_back(std::move(a));
    }
    return mopp::AtomicMeasure(space, std::move(atoms));
}

bool wants_csv(const std::string& out_path, const std::string& format) {
    if (format == "csv") return true;
    if (format == "json") return false;
    return out_path.size() >= 4 && out_path.substr(out_path.size() - 4) == ".csv";
}

mopp::AtomicMeasure load_measure(const std::string& path, const std::string& kind, int dim,
                                 bool time_axis) {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
        mopp::SpaceDescriptor base = kind == "euclidean-axes"
                                         ? mopp::SpaceDescriptor::euclidean_axes(dim)
                                         : mopp::SpaceDescriptor::euclidean_origin(dim);
        return measure_from_csv(read_file(path),
                                time_axis ? mopp::make_product_space(base) : base);
    }
    return mopp::measure_from_json(load_json(path));
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string field;
    while (std::getline(in, field, ',')) out.push_back(std::stod(field));
    return out;
}

std::vector<mopp::Point> parse_point_list(const std::string& text) {
    std::vector<mopp::Point> out;
    std::istringstream in(text);
    std::string group;
    while (std::getline(in, group, ';')) out.push_back(mopp::Point{parse_number_list(group)});
    return out;
}

struct PrmSampleOptions {
    double alpha = 1.0;
    double rmin = 1.0;
    std::string weights = "1";
    std::string dirs;
    std::string kind = "euclidean-origin";
    int dim = 1;
    double time_horizon = 0.0;  // 0 = no time axis
    int rings = 0;              // 0 = direct sampler
};

mopp::PrmSpec build_prm_spec(const PrmSampleOptions& opt) {
    mopp::SpaceDescriptor space = opt.kind == "euclidean-axes"
                                      ? mopp::SpaceDescriptor::euclidean_axes(opt.dim)
                                      : mopp::SpaceDescriptor::euclidean_origin(opt.dim);
    const std::vector<double> weights = parse_number_list(opt.weights);
    std::vector<mopp::Point> dirs;
    if (!opt.dirs.empty()) {
        dirs = parse_point_list(opt.dirs);
    } else if (weights.size() == 1) {
        mopp::Point d{std::vector<double>(static_cast<std::size_t>(opt.dim),
                                          opt.kind == "euclidean-axes" ? 1.0 : 0.0)};
        d.coords[0] = 1.0;
        dirs.push_back(std::move(d));
    } else {
        throw std::invalid_argument("--dirs required when more than one weight is given");
    }
    if (dirs.size() != weights.size())
        throw std::invalid_argument("--dirs and --weights must have matching lengths");
    std::vector<mopp::AngularAtom> angular;
    for (std::size_t i = 0; i < dirs.size(); ++i)
        angular.push_back(mopp::AngularAtom{dirs[i], weights[i]});
    mopp::PrmSpec spec{mopp::HomogeneousMeasure(space, opt.alpha, std::move(angular)), opt.rmin,
                       {}};
    if (opt.time_horizon > 0.0) spec.time_horizon = opt.time_horizon;
    return spec;
}

json resolved_config_json(const CLI::App& cmd) {
    json cfg = json::object();
    for (const CLI::Option* opt : cmd.get_options()) {
        const std::string name = opt->get_name();
        if (name.rfind("--", 0) != 0) continue;
        const auto& results = opt->results();
        if (results.empty()) continue;
        cfg[name.substr(2)] = results.size() == 1 ? json(results.front()) : json(results);
    }
    return cfg;
}

int emit_measure_outputs(const mopp::AtomicMeasure& m, const std::vector<int>* marks,
                         const std::vector<std::string>* labels, const std::string& out_path,
                         const std::string& format, const json& config, std::uint64_t seed) {
    if (wants_csv(out_path, format)) {
        write_atomic(out_path, measure_to_csv(m, marks, labels));
    } else {
        json j = marks ? mopp::to_json(mopp::MarkedMeasure{m, *marks, *labels}) : mopp::to_json(m);
        j["config"] = config;
        j["seed"] = seed;
        j["version"] = kVersion;
        write_atomic(out_path, j.dump(2) + "\n");
    }
    json summary{{"atoms", m.size()},
                 {"total_mass", m.total_mass()},
                 {"out", out_path},
                 {"config", config},
                 {"seed", seed},
                 {"version", kVersion}};
    std::cout << summary.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Point processes and tail metrics on cone-punctured spaces"};
    app.require_subcommand(1);
    app.fallthrough(true);

    std::uint64_t seed = 0;
    std::string out_path;
    std::string format = "auto";
    app.add_option("--seed", seed, "Root RNG seed")->capture_default_str();
    app.add_option("--out", out_path, "Output file");
    app.add_option("--format", format, "Output format: json|csv (default: by extension)");

    // prm sample | map | mark
    CLI::App* prm = app.add_subcommand("prm", "Poisson random measures");
    prm->fallthrough(true);
    prm->require_subcommand(1);

    PrmSampleOptions sopt;
    CLI::App* sample = prm->add_subcommand("sample", "Draw one PRM realization");
    sample->fallthrough(true);
    sample->add_option("--alpha", sopt.alpha, "Tail index")->required();
    sample->add_option("--rmin", sopt.rmin, "Truncation radius")->required();
    sample->add_option("--weights", sopt.weights, "Angular weights, comma separated");
    sample->add_option("--dirs", sopt.dirs, "Directions: coords comma separated, ; between");
    sample->add_option("--kind", sopt.kind, "Space kind: euclidean-origin|euclidean-axes");
    sample->add_option("--dim", sopt.dim, "Space dimension");
    sample->add_option("--time", sopt.time_horizon, "Time horizon T (mean dt x dmu on [0,T])");
    sample->add_option("--rings", sopt.rings, "Use the annulus construction with this many rings");

    std::string in_path, transform = "scale", kernel = "bernoulli", labels_opt, probs_opt;
    std::string in_kind = "euclidean-origin";
    int in_dim = 1;
    bool in_time = false;
    double lambda = 1.0, beta = 1.0, q = 0.5;
    CLI::App* map_cmd = prm->add_subcommand("map", "Transform atoms of a measure");
    map_cmd->fallthrough(true);
    map_cmd->add_option("--in", in_path, "Input measure (.json or .csv)")->required();
    map_cmd->add_option("--transform", transform, "scale|norm-power");
    map_cmd->add_option("--lambda", lambda, "Scale factor");
    map_cmd->add_option("--beta", beta, "Radial power");
    map_cmd->add_option("--kind", in_kind, "Space kind for CSV input");
    map_cmd->add_option("--dim", in_dim, "Space dimension for CSV input");
    map_cmd->add_flag("--time-axis", in_time, "CSV input has a leading time column");

    CLI::App* mark_cmd = prm->add_subcommand("mark", "Mark atoms through a kernel");
    mark_cmd->fallthrough(true);
    mark_cmd->add_option("--in", in_path, "Input measure (.json or .csv)")->required();
    mark_cmd->add_option("--kernel", kernel, "bernoulli|discrete");
    mark_cmd->add_option("--q", q, "Bernoulli retention probability");
    mark_cmd->add_option("--labels", labels_opt, "Discrete labels, comma separated");
    mark_cmd->add_option("--probs", probs_opt, "Discrete probabilities, comma separated");
    mark_cmd->add_option("--kind", in_kind, "Space kind for CSV input");
    mark_cmd->add_option("--dim", in_dim, "Space dimension for CSV input");
    mark_cmd->add_flag("--time-axis", in_time, "CSV input has a leading time column");

    std::string path_a, path_b;
    CLI::App* dist_cmd = app.add_subcommand("distance", "Prohorov and d_MO distances");
    dist_cmd->fallthrough(true);
    dist_cmd->add_option("--a", path_a, "First measure JSON")->required();
    dist_cmd->add_option("--b", path_b, "Second measure JSON")->required();

    double rv_alpha = 1.0, rv_gamma = 0.0;
    std::string rv_radial = "pure-pareto", rv_tgrid = "100,1000", rv_sets;
    int rv_reps = 50;
    std::size_t rv_samples = 20000;
    CLI::App* rv = app.add_subcommand("rv", "Regular variation checks");
    rv->fallthrough(true);
    CLI::App* rv_check_cmd = rv->add_subcommand("check", "Empirical tail-measure convergence");
    rv_check_cmd->fallthrough(true);
    rv_check_cmd->add_option("--alpha", rv_alpha, "Tail index")->required();
    rv_check_cmd->add_option("--radial", rv_radial, "pure-pareto|log-perturbed");
    rv_check_cmd->add_option("--gamma", rv_gamma, "Log perturbation exponent");
    rv_check_cmd->add_option("--t-grid", rv_tgrid, "Scales t, comma separated");
    rv_check_cmd->add_option("--sets", rv_sets, "Tail sets: JSON array or path to .json");
    rv_check_cmd->add_option("--reps", rv_reps, "Replicates per t");
    rv_check_cmd->add_option("--samples", rv_samples, "Samples per replicate");

    std::string config_path;
    CLI::App* converge = app.add_subcommand("converge", "Complete convergence experiments");
    converge->fallthrough(true);
    CLI::App* complete = converge->add_subcommand("complete", "Run the experiment in a config");
    complete->fallthrough(true);
    complete->add_option("--config", config_path, "Experiment config JSON")->required();

    CLI::App* tight_cmd = app.add_subcommand("tightness", "Ensemble tightness diagnostics");
    tight_cmd->fallthrough(true);
    tight_cmd->add_option("--config", config_path, "Diagnostic config JSON")->required();

    try {
        app.parse(argc, argv);

        if (sample->parsed()) {
            if (out_path.empty()) throw std::invalid_argument("--out is required");
            const mopp::PrmSpec spec = build_prm_spec(sopt);
            const mopp::AtomicMeasure m = sopt.rings > 0
                                              ? mopp::sample_prm_annuli(spec, seed, sopt.rings)
                                              : mopp::sample_prm(spec, seed);
            json cfg = resolved_config_json(*sample);
            cfg["seed"] = seed;
            return emit_measure_outputs(m, nullptr, nullptr, out_path, format, cfg, seed);
        }

        if (map_cmd->parsed()) {
            if (out_path.empty()) throw std::invalid_argument("--out is required");
            const mopp::AtomicMeasure m = load_measure(in_path, in_kind, in_dim, in_time);
            mopp::PointTransform t;
            if (transform == "scale")
                t = mopp::ScaleBy{lambda};
            else if (transform == "norm-power")
                t = mopp::NormPower{beta};
            else
                throw std::invalid_argument("unknown transform: " + transform);
            const mopp::AtomicMeasure mapped = mopp::map_prm(m, t);
            return emit_measure_outputs(mapped, nullptr, nullptr, out_path, format,
                                        resolved_config_json(*map_cmd), seed);
        }

        if (mark_cmd->parsed()) {
            if (out_path.empty()) throw std::invalid_argument("--out is required");
            const mopp::AtomicMeasure m = load_measure(in_path, in_kind, in_dim, in_time);
            mopp::MarkKernel k = [&] {
                if (kernel == "bernoulli") return mopp::MarkKernel::bernoulli(q);
                if (kernel != "discrete") throw std::invalid_argument("unknown kernel: " + kernel);
                std::vector<std::string> labels;
                std::istringstream in(labels_opt);
                std::string field;
                while (std::getline(in, field, ',')) labels.push_back(field);
                return mopp::MarkKernel::discrete(std::move(labels),
                                                  parse_number_list(probs_opt));
            }();
            const mopp::MarkedMeasure marked = mopp::mark_prm(m, k, seed);
            return emit_measure_outputs(marked.base, &marked.marks, &marked.labels, out_path,
                                        format, resolved_config_json(*mark_cmd), seed);
        }

        if (dist_cmd->parsed()) {
            if (out_path.empty()) throw std::invalid_argument("--out is required");
            const mopp::AtomicMeasure a = mopp::measure_from_json(load_json(path_a));
            const mopp::AtomicMeasure b = mopp::measure_from_json(load_json(path_b));
            json result{{"prohorov", mopp::prohorov_distance(a, b).value},
                        {"mo", mopp::mo_distance(a, b)},
                        {"config", resolved_config_json(*dist_cmd)},
                        {"seed", seed},
                        {"version", kVersion}};
            write_atomic(out_path, result.dump(2) + "\n");
            std::cout << result.dump(2) << "\n";
            return 0;
        }

        if (rv_check_cmd->parsed()) {
            if (out_path.empty()) throw std::invalid_argument("--out is required");
            const mopp::SpaceDescriptor space = mopp::SpaceDescriptor::euclidean_origin(1);
            std::vector<mopp::AngularAtom> angular{
                mopp::AngularAtom{mopp::Point{{1.0}}, 1.0}};
            const mopp::RadialLaw law = rv_radial == "log-perturbed"
                                            ? mopp::RadialLaw::log_perturbed
                                            : mopp::RadialLaw::pure_pareto;
            const mopp::HeavyTailSampler sampler(space, rv_alpha, angular, law, rv_gamma);
            std::vector<mopp::TailSet> sets;
            if (rv_sets.empty()) {
                sets.push_back(mopp::tail_above(1.0));
                sets.push_back(mopp::tail_above(2.0));
            } else {
                const json sets_json = rv_sets.size() > 5 &&
                                               rv_sets.substr(rv_sets.size() - 5) == ".json"
                                           ? load_json(rv_sets)
                                           : mopp::parse_json(rv_sets, "--sets");
                for (const json& s : sets_json) sets.push_back(mopp::tail_set_from_json(s));
            }
            const std::vector<double> t_grid = parse_number_list(rv_tgrid);
            const mopp::RvCheckReport report = mopp::rv_check(
                sampler, sampler.limit_measure(), t_grid, sets, rv_reps, seed, rv_samples);
            json cfg = resolved_config_json(*rv_check_cmd);
            cfg["seed"] = seed;
            write_atomic(out_path,
                         mopp::report_envelope(mopp::to_json(report), cfg, seed).dump(2) + "\n");
            std::cout << (report.pass ? "rv check: pass" : "rv check: FAIL") << "\n";
            return report.pass ? 0 : 1;
        }

        if (complete->parsed()) {
            if (out_path.empty()) throw std::invalid_argument("--out is required");
            const json cfg = load_json(config_path);
            mopp::ExperimentConfig experiment = mopp::experiment_config_from_json(cfg);
            if (!cfg.contains("seed")) experiment.seed = seed;
            const mopp::ConvergenceReport report =
                mopp::complete_convergence_experiment(experiment);
            write_atomic(out_path, mopp::report_envelope(mopp::to_json(report), cfg,
                                                         experiment.seed)
                                           .dump(2) +
                                       "\n");
            std::cout << (report.pass ? "converge complete: pass" : "converge complete: FAIL")
                      << "\n";
            return report.pass ? 0 : 1;
        }

        if (tight_cmd->parsed()) {
            if (out_path.empty()) throw std::invalid_argument("--out is required");
            const json cfg = load_json(config_path);
            mopp::PrmSpec spec{mopp::homogeneous_from_json(cfg.at("prm")),
                               cfg.at("prm").value("r_min", 1.0), {}};
            if (cfg.at("prm").contains("time") && !cfg.at("prm").at("time").is_null())
                spec.time_horizon = cfg.at("prm").at("time").get<double>();
            const std::uint64_t run_seed = cfg.value("seed", seed);
            const std::size_t members = cfg.value("ensemble", std::size_t{1000});
            std::vector<mopp::AtomicMeasure> ensemble;
            ensemble.reserve(members);
            for (std::size_t i = 0; i < members; ++i)
                ensemble.push_back(mopp::sample_prm(spec, mopp::derive_seed(run_seed, 7, i)));
            const auto r_grid = cfg.at("r_grid").get<std::vector<double>>();
            std::vector<double> mass_grid;
            if (cfg.contains("M") && cfg.at("M").is_array()) {
                mass_grid = cfg.at("M").get<std::vector<double>>();
            } else {
                // Auto: the Poisson 1 - 1e-6 quantile of each shell mean.
                for (double r : r_grid) {
                    mopp::TailSet shell = mopp::tail_above(std::max(r, spec.r_min) * (1.0 - 1e-12));
                    double mean = mopp::tail_mass(spec.mean, shell);
                    if (spec.time_horizon) mean *= *spec.time_horizon;
                    mass_grid.push_back(
                        static_cast<double>(mopp::poisson_quantile(mean, 1.0 - 1e-6)));
                }
            }
            const double eps = cfg.value("eps", 0.01);
            const double eps_prime = cfg.value("eps_prime", 0.5);
            const double box = cfg.value("box_bound", 1e6);
            const auto rows = mopp::tightness_diagnostic(ensemble, r_grid, mass_grid, box, eps,
                                                         eps_prime);
            bool any_violation = false;
            for (const auto& row : rows) any_violation = any_violation || row.violates;
            json body{{"rows", mopp::to_json(std::span<const mopp::TightnessRow>(rows))},
                      {"pass", !any_violation}};
            write_atomic(out_path, mopp::report_envelope(body, cfg, run_seed).dump(2) + "\n");
            std::cout << (any_violation ? "tightness: FAIL" : "tightness: pass") << "\n";
            return 0;
        }

        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
            return app.exit(e);
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
