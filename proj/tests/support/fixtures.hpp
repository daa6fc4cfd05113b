#pragma once

#include <string>

#include "fuzzyalign/event_log.hpp"
#include "fuzzyalign/model.hpp"
#include "support/random_instances.hpp"

namespace testsupport {

inline std::string data_path(const std::string& rel) { return std::string(FUZZYALIGN_DATA_DIR) + "/" + rel; }

inline fuzzyalign::ProcessModel loan_model() { return fuzzyalign::load_model(data_path("loan_model.json")); }
inline fuzzyalign::ProcessModel fig2_model() { return fuzzyalign::load_model(data_path("fig2_model.json")); }

inline fuzzyalign::Trace first_trace(const std::string& rel, const fuzzyalign::ProcessModel& m) {
  return fuzzyalign::load_log(data_path(rel), &m).traces.at(0);
}

inline fuzzyalign::Trace to_trace(const RTrace& t, const std::string& id = "r") {
  fuzzyalign::Trace out;
  out.case_id = id;
  for (const auto& e : t) {
    fuzzyalign::Event ev;
    ev.activity = e.activity;
    for (const auto& [k, v] : e.writes) ev.writes[k] = v;
    out.events.push_back(std::move(ev));
  }
  return out;
}

}  // namespace testsupport
