#pragma once

#include <string>

#include <json.hpp>

#include "fuzzyalign/aligner.hpp"
#include "fuzzyalign/diagnostics.hpp"

namespace fuzzyalign {

/// Numbers in every emitted report are rounded to 9 significant digits and
/// object keys are sorted, so reruns are byte-identical.
nlohmann::json moves_to_json(const ProcessModel& model, const Trace& trace, const Alignment& a);

/// Per-trace result: {case_id, cost_<mode>, fitness, moves, optima_count, truncated}.
nlohmann::json trace_result_to_json(const ProcessModel& model, const Trace& trace,
                                    const AlignmentResult& result, CostMode mode,
                                    bool include_all_optima);

nlohmann::json comparison_to_json(const ComparisonReport& report);
nlohmann::json movestats_to_json(const ComparisonReport& report);

/// case_id,fitness_crisp,fitness_fuzzy
std::string scatter_csv(const ComparisonReport& report);
/// constraint,case_id,move_index,severity
std::string severity_csv(const ComparisonReport& report);

}  // namespace fuzzyalign
