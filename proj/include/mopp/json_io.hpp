#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "mopp/convergence.hpp"
#include "mopp/laplace.hpp"
#include "mopp/measure.hpp"
#include "mopp/prm.hpp"
#include "mopp/regvar.hpp"

namespace mopp {

using json = nlohmann::json;

// Space: {"kind": "euclidean-origin" | "euclidean-axes", "dim": n}
//        with optional {"time": true} for the product-time wrapper.
json to_json(const SpaceDescriptor& space);
SpaceDescriptor space_from_json(const json& j);

// Measure: {"space": {...}, "atoms": [{"x": [...], "w": 1.0}]}
json to_json(const AtomicMeasure& m);
AtomicMeasure measure_from_json(const json& j);

// Marked measure: atoms carry an extra "mark" label.
json to_json(const MarkedMeasure& m);

// Homogeneous measure: {"alpha": 1.0, "angular": [{"omega": [...], "w": 1.0}],
//                       "space": {...} (optional, origin cone by default)}
json to_json(const HomogeneousMeasure& h);
HomogeneousMeasure homogeneous_from_json(const json& j);

// Tail set: {"u_lo": 1.0, "u_hi": null, "time": [t1, t2],
//            "directions": "all" | [[...], ...]}
json to_json(const TailSet& set);
TailSet tail_set_from_json(const json& j);

// Test function: {"form": "step", "pieces": [{"u_lo":, "u_hi":, "c":, "time":}],
//                 "time": [t1, t2]}  (top-level window applies to pieces
//                 without one), or {"form": "ramp", "c":, "r":, "w":}.
json to_json(const TestFunction& f);
TestFunction test_function_from_json(const json& j);

json to_json(const HeavyTailSampler& sampler);
HeavyTailSampler sampler_from_json(const json& j);

ExperimentConfig experiment_config_from_json(const json& j);

json to_json(const RvCheckReport& report);
json to_json(const ConvergenceReport& report);
json to_json(std::span<const TightnessRow> rows);

/// Report wrapper: {"schema": "mo-pointproc/report-v1", "version": ...,
/// "seed": ..., "config": ..., ...body}.
json report_envelope(const json& body, const json& resolved_config, std::uint64_t seed);

/// Parses a JSON document, mapping parse errors to std::invalid_argument.
json parse_json(const std::string& text, const std::string& what);

}  // namespace mopp
