#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fuzzyalign/value.hpp"

namespace fuzzyalign {

class ProcessModel;

struct Event {
  std::string activity;
  std::map<std::string, Value> writes;  // empty = (act, ⊥)

  friend bool operator==(const Event&, const Event&) = default;
};

struct Trace {
  std::string case_id;
  std::vector<Event> events;

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// Multiset of traces; duplicates are kept, in file order.
struct EventLog {
  std::vector<Trace> traces;

  friend bool operator==(const EventLog&, const EventLog&) = default;
};

/// Number of traces in the log whose event sequence equals `events`.
std::size_t multiplicity(const EventLog& log, const std::vector<Event>& events);

EventLog parse_xes(std::string_view document);
std::string write_xes(const EventLog& log);

/// Header `case_id,activity,<vars...>`; an empty cell is ⊥. When `model` is
/// given, cells of numeric model variables must parse as numbers.
EventLog parse_csv(std::string_view document, const ProcessModel* model = nullptr);
std::string write_csv(const EventLog& log);

/// Dispatches on the extension (.xes or .csv).
EventLog load_log(const std::string& path, const ProcessModel* model = nullptr);
void save_log(const EventLog& log, const std::string& path);

}  // namespace fuzzyalign
