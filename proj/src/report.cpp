#include "fuzzyalign/report.hpp"

#include <sstream>

namespace fuzzyalign {

using nlohmann::json;

namespace {

json number(double v) { return round_sig9(v); }

json value_json(const Value& v) {
  if (is_number(v)) return number(std::get<double>(v));
  return std::get<std::string>(v);
}

json violation_json(const Violation& v) {
  json j;
  j["variable"] = v.variable;
  j["predicate"] = v.predicate.empty() ? json(nullptr) : json(v.predicate);
  j["value"] = v.value ? value_json(*v.value) : json(nullptr);
  j["severity"] = number(v.severity);
  if (v.crisp_fallback) j["crisp_fallback"] = true;
  return j;
}

}  // namespace

json moves_to_json(const ProcessModel& model, const Trace& trace, const Alignment& a) {
  json moves = json::array();
  for (const auto& m : a.moves) {
    json j;
    j["kind"] = to_string(m.kind);
    if (m.log_index) {
      j["log"] = trace.events.at(*m.log_index).activity;
      j["log_index"] = *m.log_index;
    } else {
      j["log"] = ">>";
    }
    j["model"] = m.model_activity ? model.activity(*m.model_activity).name : std::string(">>");
    j["cost"] = number(m.cost);
    if (!m.violations.empty()) {
      j["violations"] = json::array();
      for (const auto& v : m.violations) j["violations"].push_back(violation_json(v));
    }
    moves.push_back(std::move(j));
  }
  return moves;
}

json trace_result_to_json(const ProcessModel& model, const Trace& trace, const AlignmentResult& result,
                          CostMode mode, bool include_all_optima) {
  json j;
  j["case_id"] = trace.case_id;
  j[std::string("cost_") + to_string(mode)] = number(result.optimal_cost);
  j["fitness"] = number(result.fitness);
  j["moves"] = result.alignments.empty() ? json::array() : moves_to_json(model, trace, result.alignments.front());
  j["optima_count"] = result.alignments.size();
  j["truncated"] = result.truncated;
  if (result.epsilon_warning) j["epsilon_warning"] = true;
  if (include_all_optima) {
    j["optima"] = json::array();
    for (const auto& a : result.alignments) j["optima"].push_back(moves_to_json(model, trace, a));
  }
  return j;
}

namespace {

json summary_json(const QuantileSummary& q) {
  return {{"min", number(q.min)},       {"q1", number(q.q1)},   {"median", number(q.median)},
          {"q3", number(q.q3)},         {"max", number(q.max)}, {"count", q.count}};
}

json stats_json(const MoveStats& s) {
  json j = json::object();
  for (const auto& [act, c] : s) j[act] = {{"move_in_log", c.move_in_log}, {"move_in_data", c.move_in_data}};
  return j;
}

}  // namespace

json comparison_to_json(const ComparisonReport& report) {
  json traces = json::array();
  for (const auto& t : report.traces) {
    json j;
    j["case_id"] = t.case_id;
    if (t.failed) {
      j["failed"] = true;
      j["error"] = t.error;
    } else {
      j["cost_crisp"] = number(t.cost_crisp);
      j["cost_fuzzy"] = number(t.cost_fuzzy);
      j["fitness_crisp"] = number(t.fitness_crisp);
      j["fitness_fuzzy"] = number(t.fitness_fuzzy);
      if (t.truncated_crisp) j["truncated_crisp"] = true;
      if (t.truncated_fuzzy) j["truncated_fuzzy"] = true;
    }
    traces.push_back(std::move(j));
  }
  json severity = json::object();
  for (const auto& [c, q] : report.severity) severity[c] = summary_json(q);
  return {{"traces", std::move(traces)},
          {"failed_count", report.failed_count},
          {"movestats_excluded", report.movestats_excluded},
          {"above_diagonal_fraction", number(report.above_diagonal_fraction)},
          {"severity", std::move(severity)}};
}

json movestats_to_json(const ComparisonReport& report) {
  return {{"crisp", stats_json(report.crisp_stats)},
          {"fuzzy", stats_json(report.fuzzy_stats)},
          {"excluded_traces", report.movestats_excluded}};
}

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string scatter_csv(const ComparisonReport& report) {
  std::ostringstream out;
  out << "case_id,fitness_crisp,fitness_fuzzy\n";
  for (const auto& t : report.traces) {
    if (t.failed) continue;
    out << csv_cell(t.case_id) << ',' << format_sig9(t.fitness_crisp) << ',' << format_sig9(t.fitness_fuzzy) << '\n';
  }
  return out.str();
}

std::string severity_csv(const ComparisonReport& report) {
  std::ostringstream out;
  out << "constraint,case_id,move_index,severity\n";
  for (const auto& t : report.traces)
    for (const auto& s : t.severities)
      out << csv_cell(s.constraint) << ',' << csv_cell(t.case_id) << ',' << s.move_index << ','
          << format_sig9(s.severity) << '\n';
  return out.str();
}

}  // namespace fuzzyalign
