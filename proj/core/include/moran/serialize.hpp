#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "moran/construction.hpp"
#include "moran/dimension.hpp"
#include "moran/entropy.hpp"
#include "moran/estimation.hpp"
#include "moran/filtration.hpp"
#include "moran/lq_spectrum.hpp"
#include "moran/measure.hpp"
#include "moran/realization.hpp"

namespace moran {

using Json = nlohmann::json;

// Spec documents:
//   {"kind": "homogeneous" | "spatially_symmetric",
//    "root_diameter": 1.0,
//    "levels": [{"N": 2, "ratios": [0.333, 0.333]}, ...],
//    "tail": {"rule": "periodic", "cycle": [level, ...]}
//          | {"rule": "doubling_blocks", "first": level, "second": level}
//          | {"rule": "log_linear", "offsets": [...], "slopes": [...]},
//    "perturbation": {"amplitude": 0.1, "seed": 7}}
// "tail" may be omitted: the explicit levels then repeat periodically.
// Unknown keys are rejected. Doubles round-trip bit for bit.

/// Throws InvalidArgument for specs with a custom tail rule.
Json spec_to_json(const ConstructionSpec& spec);
ConstructionSpec spec_from_json(const Json& doc);

// Weight rules:
//   {"name": "uniform"}
//   {"name": "bernoulli", "weights": [0.3, 0.7]}
//   {"name": "level_weights", "levels": [[...], ...], "cycle": true}
Json weight_rule_to_json(const WeightRule& rule);
WeightRule weight_rule_from_json(const Json& doc);

/// {"spec": ..., "weight_rule": ..., "root_mass": 1.0}
Json measure_to_json(const MoranMeasure& measure);
MoranMeasure measure_from_json(const Json& doc);

Json to_json(const DimensionReport& report);
Json to_json(const HomogeneousDimension& result);
Json to_json(const EntropyAverageTrace& trace);
Json to_json(const ConditionReport& report);
Json to_json(const LqSpectrumEstimate& estimate);
Json to_json(const LqDimension& dimension);
Json to_json(const SandwichReport& report);
Json to_json(const FiltrationAxiomReport& report);
Json to_json(const LocalDimensionEstimate& estimate);
Json to_json(const MoranAxiomReport& report);
Json to_json(const BoxCountResult& result);
Json to_json(const LocalSlopeEstimate& result);
Json to_json(const SqPackingResult& result);
Json to_json(const ScaleRange& scales);

/// Columns n, s_n, residual.
std::string dimension_report_csv(const DimensionReport& report);
/// Columns n, numerator, denominator, ratio (partial sums per level).
std::string entropy_trace_csv(const EntropyAverageTrace& trace);
/// Columns n, tau_n.
std::string tau_sequence_csv(const LqSpectrumEstimate& estimate);

}  // namespace moran
