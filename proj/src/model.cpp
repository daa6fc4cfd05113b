#include "fuzzyalign/model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fuzzyalign/error.hpp"

namespace fuzzyalign {

using nlohmann::json;

bool VariableDecl::admits(const Value& v) const {
  if (kind == VarKind::String) {
    if (!std::holds_alternative<std::string>(v)) return false;
    return enumeration.empty() ||
           std::find(enumeration.begin(), enumeration.end(), std::get<std::string>(v)) != enumeration.end();
  }
  const auto* d = std::get_if<double>(&v);
  if (d == nullptr || !std::isfinite(*d)) return false;
  if (kind == VarKind::Integer && std::floor(*d) != *d) return false;
  return !interval || (*d >= interval->first && *d <= interval->second);
}

bool ActivitySpec::writes_variable(std::string_view var) const {
  return std::binary_search(writes.begin(), writes.end(), var);
}

const DeviationMF* ActivitySpec::mf_for(std::string_view predicate_text) const {
  for (const auto& b : mfs)
    if (b.predicate.text() == predicate_text) return &b.mf;
  return nullptr;
}

namespace {

[[noreturn]] void semantic(const std::string& msg) { throw Error(ErrorKind::Semantic, msg); }

}  // namespace

ProcessModel::ProcessModel(std::vector<VariableDecl> variables, std::vector<std::string> states,
                           std::vector<std::string> initial, std::vector<std::string> final_states,
                           std::vector<ActivitySpec> activities,
                           std::vector<std::tuple<std::string, std::string, std::string>> transitions)
    : variables_(std::move(variables)), state_names_(std::move(states)), activities_(std::move(activities)) {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    const auto& v = variables_[i];
    if (v.name.empty()) semantic("variable with empty name");
    if (!variable_index_.emplace(v.name, i).second) semantic("duplicate variable '" + v.name + "'");
    if (v.interval && v.interval->first > v.interval->second)
      semantic("domain of '" + v.name + "' has lower bound above upper bound");
  }
  for (std::uint32_t i = 0; i < state_names_.size(); ++i)
    if (!state_index_.emplace(state_names_[i], i).second) semantic("duplicate state '" + state_names_[i] + "'");
  for (std::uint32_t i = 0; i < activities_.size(); ++i)
    if (!activity_index_.emplace(activities_[i].name, i).second)
      semantic("duplicate activity '" + activities_[i].name + "'");

  auto state_of = [&](const std::string& name, const char* role) {
    auto s = find_state(name);
    if (!s) semantic(std::string(role) + " references undeclared state '" + name + "'");
    return *s;
  };
  if (initial.empty()) semantic("model has no initial state");
  if (final_states.empty()) semantic("model has no final state");
  final_.assign(state_names_.size(), false);
  for (const auto& name : initial) initial_.push_back(state_of(name, "initial"));
  std::sort(initial_.begin(), initial_.end());
  initial_.erase(std::unique(initial_.begin(), initial_.end()), initial_.end());
  for (const auto& name : final_states) final_[state_of(name, "final").value] = true;

  for (const auto& [from, act, to] : transitions) {
    auto a = find_activity(act);
    if (!a) semantic("transition references undeclared activity '" + act + "'");
    transitions_.push_back({state_of(from, "transition"), *a, state_of(to, "transition")});
  }
  validate_and_index();
}

void ProcessModel::validate_and_index() {
  for (auto& a : activities_) {
    if (a.name.empty()) semantic("activity with empty name");
    std::sort(a.writes.begin(), a.writes.end());
    if (std::adjacent_find(a.writes.begin(), a.writes.end()) != a.writes.end())
      semantic("activity '" + a.name + "' lists a written variable twice");
    for (const auto& w : a.writes)
      if (!find_variable(w)) semantic("activity '" + a.name + "' writes undeclared variable '" + w + "'");

    std::vector<std::string> atom_texts;
    a.guard_nnf.reset();
    if (a.guard) {
      a.guard_nnf = to_nnf(*a.guard);
      std::set<std::string> plain, primed;
      for (const auto& p : a.guard->atoms()) {
        if (!find_variable(p.variable)) semantic("unknown variable '" + p.variable + "' in guard of '" + a.name + "'");
        (p.primed ? primed : plain).insert(p.variable);
        if (p.primed && !a.writes_variable(p.variable))
          semantic("guard of '" + a.name + "' uses " + p.variable + "' but the activity does not write it");
        atom_texts.push_back(p.text());
      }
      for (const auto& v : primed)
        if (plain.count(v))
          semantic("guard of '" + a.name + "' mixes pre- and post-values of '" + v + "'");
    }
    for (const auto& b : a.mfs) {
      if (std::find(atom_texts.begin(), atom_texts.end(), b.predicate.text()) == atom_texts.end())
        semantic("MF predicate '" + b.predicate.text() + "' does not occur in the guard of '" + a.name + "'");
      try {
        b.mf.validate();
      } catch (const Error& e) {
        semantic("malformed MF on '" + b.predicate.text() + "': " + e.what());
      }
    }
  }

  std::stable_sort(transitions_.begin(), transitions_.end(), [&](const Transition& x, const Transition& y) {
    if (x.from != y.from) return x.from < y.from;
    return activities_[x.activity.value].name < activities_[y.activity.value].name;
  });
  for (std::size_t i = 1; i < transitions_.size(); ++i) {
    const auto& x = transitions_[i - 1];
    const auto& y = transitions_[i];
    if (x.from == y.from && x.activity == y.activity) {
      if (x.to == y.to) semantic("duplicate transition " + state_name(x.from) + " -" + activity(x.activity).name + "->");
      semantic("nondeterministic transitions on '" + activity(x.activity).name + "' from state '" +
               state_name(x.from) + "'");
    }
  }
  out_begin_.assign(state_names_.size() + 1, 0);
  for (const auto& t : transitions_) ++out_begin_[t.from.value + 1];
  for (std::size_t i = 1; i < out_begin_.size(); ++i) out_begin_[i] += out_begin_[i - 1];

  // Reverse BFS from the final states.
  std::vector<std::vector<StateId>> incoming(state_names_.size());
  for (const auto& t : transitions_) incoming[t.to.value].push_back(t.from);
  distance_.assign(state_names_.size(), std::nullopt);
  std::deque<StateId> queue;
  for (std::uint32_t s = 0; s < state_names_.size(); ++s)
    if (final_[s]) {
      distance_[s] = 0;
      queue.push_back(StateId{s});
    }
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    for (StateId p : incoming[s.value])
      if (!distance_[p.value]) {
        distance_[p.value] = *distance_[s.value] + 1;
        queue.push_back(p);
      }
  }

  // Forward reachability from the initial states.
  std::vector<bool> seen(state_names_.size(), false);
  for (StateId s : initial_) {
    seen[s.value] = true;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    for (const auto& t : outgoing(s))
      if (!seen[t.to.value]) {
        seen[t.to.value] = true;
        queue.push_back(t.to);
      }
  }
  for (std::uint32_t s = 0; s < state_names_.size(); ++s)
    if (final_[s] && !seen[s]) semantic("final state '" + state_names_[s] + "' is unreachable from every initial state");
}

std::optional<StateId> ProcessModel::find_state(std::string_view name) const {
  auto it = state_index_.find(name);
  if (it == state_index_.end()) return std::nullopt;
  return StateId{it->second};
}

std::optional<ActivityId> ProcessModel::find_activity(std::string_view name) const {
  auto it = activity_index_.find(name);
  if (it == activity_index_.end()) return std::nullopt;
  return ActivityId{it->second};
}

std::optional<std::size_t> ProcessModel::variable_index(std::string_view name) const {
  auto it = variable_index_.find(name);
  if (it == variable_index_.end()) return std::nullopt;
  return it->second;
}

const VariableDecl* ProcessModel::find_variable(std::string_view name) const {
  auto i = variable_index(name);
  return i ? &variables_[*i] : nullptr;
}

bool ProcessModel::is_initial(StateId s) const {
  return std::binary_search(initial_.begin(), initial_.end(), s);
}

std::span<const Transition> ProcessModel::outgoing(StateId s) const {
  return std::span<const Transition>(transitions_).subspan(out_begin_[s.value],
                                                           out_begin_[s.value + 1] - out_begin_[s.value]);
}

std::optional<StateId> ProcessModel::successor(StateId s, ActivityId a) const {
  for (const auto& t : outgoing(s))
    if (t.activity == a) return t.to;
  return std::nullopt;
}

std::size_t ProcessModel::guarded_activity_count() const {
  return static_cast<std::size_t>(
      std::count_if(activities_.begin(), activities_.end(), [](const ActivitySpec& a) { return a.guard.has_value(); }));
}

std::size_t ProcessModel::mf_count() const {
  std::size_t n = 0;
  for (const auto& a : activities_) n += a.mfs.size();
  return n;
}

std::vector<std::string> ProcessModel::crisp_fallback_predicates() const {
  std::vector<std::string> out;
  for (const auto& a : activities_) {
    if (!a.guard) continue;
    for (const auto& p : a.guard->atoms())
      if (a.mf_for(p.text()) == nullptr) out.push_back(a.name + ": " + p.text());
  }
  return out;
}

ProcessModel ProcessModel::with_crisp_mfs() const {
  ProcessModel copy = *this;
  for (auto& a : copy.activities_)
    for (auto& b : a.mfs) b.mf = DeviationMF::crisp(b.predicate);
  return copy;
}

// ---------------------------------------------------------------------------
// JSON model document

namespace {

VarKind parse_kind(const std::string& s) {
  if (s == "real") return VarKind::Real;
  if (s == "integer") return VarKind::Integer;
  if (s == "string") return VarKind::String;
  semantic("unknown variable kind '" + s + "'");
}

DeviationMF parse_mf(const json& j, const Predicate& predicate) {
  const json& params = j.contains("params") ? j.at("params") : j;
  std::string type = j.at("type").get<std::string>();
  try {
    if (type == "crisp") return DeviationMF::crisp(predicate);
    if (type == "ramp") return DeviationMF::ramp(params.at("ideal").get<double>(), params.at("tolerance").get<double>());
    if (type == "piecewise") {
      std::vector<std::pair<double, double>> pts;
      for (const auto& p : params.at("points")) {
        if (!p.is_array() || p.size() != 2) semantic("piecewise point must be [value, severity]");
        pts.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
      return DeviationMF::piecewise(std::move(pts));
    }
  } catch (const Error& e) {
    semantic("malformed MF parameters for '" + predicate.text() + "': " + e.what());
  }
  semantic("unknown MF type '" + type + "'");
}

std::vector<std::string> string_list(const json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  for (const auto& s : j.at(key)) out.push_back(s.get<std::string>());
  return out;
}

}  // namespace

ProcessModel parse_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Syntax, "model syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  try {
    if (!doc.is_object()) semantic("model document must be a JSON object");
    std::vector<VariableDecl> vars;
    for (const auto& v : doc.value("variables", json::array())) {
      VariableDecl d;
      d.name = v.at("name").get<std::string>();
      d.kind = parse_kind(v.value("kind", std::string("real")));
      if (v.contains("domain")) {
        const auto& dom = v.at("domain");
        if (!dom.is_array()) semantic("domain of '" + d.name + "' must be an array");
        if (d.kind == VarKind::String) {
          for (const auto& s : dom) d.enumeration.push_back(s.get<std::string>());
        } else {
          if (dom.size() != 2) semantic("numeric domain of '" + d.name + "' must be [lo, hi]");
          d.interval = std::make_pair(dom[0].get<double>(), dom[1].get<double>());
        }
      }
      vars.push_back(std::move(d));
    }

    std::vector<ActivitySpec> activities;
    for (const auto& a : doc.value("activities", json::array())) {
      ActivitySpec spec;
      spec.name = a.at("name").get<std::string>();
      spec.writes = string_list(a, "writes");
      spec.invisible = a.value("invisible", false);
      for (const auto& w : spec.writes)
        if (std::none_of(vars.begin(), vars.end(), [&](const VariableDecl& d) { return d.name == w; }))
          semantic("activity '" + spec.name + "' writes undeclared variable '" + w + "'");
      if (a.contains("guard")) spec.guard = parse_guard(a.at("guard").get<std::string>(), vars);
      for (const auto& m : a.value("mfs", json::array())) {
        Predicate p = parse_predicate(m.at("predicate").get<std::string>(), vars);
        spec.mfs.push_back({p, parse_mf(m, p)});
      }
      activities.push_back(std::move(spec));
    }

    std::vector<std::tuple<std::string, std::string, std::string>> transitions;
    for (const auto& t : doc.value("transitions", json::array())) {
      if (!t.is_array() || t.size() != 3) semantic("transition must be a [from, activity, to] triple");
      transitions.emplace_back(t[0].get<std::string>(), t[1].get<std::string>(), t[2].get<std::string>());
    }
    return ProcessModel(std::move(vars), string_list(doc, "states"), string_list(doc, "initial"),
                        string_list(doc, "final"), std::move(activities), std::move(transitions));
  } catch (const json::exception& e) {
    semantic(std::string("malformed model document: ") + e.what());
  }
}

ProcessModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

// ---------------------------------------------------------------------------
// Firing semantics

std::vector<ModelState> initial_model_states(const ProcessModel& m) {
  std::vector<ModelState> out;
  for (StateId s : m.initial_states()) out.push_back({s, std::vector<std::optional<Value>>(m.variables().size())});
  return out;
}

ModelState fire(const ProcessModel& m, const ModelState& s, std::string_view activity,
                const std::map<std::string, Value>& writes) {
  auto a = m.find_activity(activity);
  if (!a) throw Error(ErrorKind::NotEnabled, "unknown activity '" + std::string(activity) + "'");
  auto next = m.successor(s.position, *a);
  if (!next)
    throw Error(ErrorKind::NotEnabled,
                "'" + std::string(activity) + "' is not enabled in state '" + m.state_name(s.position) + "'");
  const ActivitySpec& spec = m.activity(*a);

  std::vector<std::string> missing, extra;
  for (const auto& w : spec.writes)
    if (!writes.count(w)) missing.push_back(w);
  for (const auto& [k, v] : writes)
    if (!spec.writes_variable(k)) extra.push_back(k);
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "'" + spec.name + "' must write exactly {";
    for (std::size_t i = 0; i < spec.writes.size(); ++i) msg += (i ? ", " : "") + spec.writes[i];
    msg += "}";
    for (const auto& v : missing) msg += "; missing " + v;
    for (const auto& v : extra) msg += "; extra " + v;
    throw Error(ErrorKind::WrongWriteSet, msg);
  }
  for (const auto& [k, v] : writes)
    if (!m.find_variable(k)->admits(v))
      throw Error(ErrorKind::WrongWriteSet, "value " + format_value(v) + " is outside the domain of '" + k + "'");

  if (spec.guard) {
    ValueLookup lookup = [&](const Predicate& p) -> const Value* {
      if (p.primed) {
        auto it = writes.find(p.variable);
        return it == writes.end() ? nullptr : &it->second;
      }
      const auto& slot = s.values.at(*m.variable_index(p.variable));
      return slot ? &*slot : nullptr;
    };
    if (!eval_guard(*spec.guard, lookup)) {
      std::string msg = "guard of '" + spec.name + "' is false:";
      for (const auto& p : spec.guard->atoms()) {
        const Value* v = lookup(p);
        if (v && !p.holds(*v)) msg += " [" + p.text() + " with " + p.variable + "=" + format_value(*v) + "]";
      }
      throw Error(ErrorKind::GuardViolated, msg);
    }
  }

  ModelState out{*next, s.values};
  for (const auto& [k, v] : writes) out.values[*m.variable_index(k)] = v;
  return out;
}

std::size_t min_moves_to_final(const ProcessModel& m, StateId position) {
  auto d = m.distance_to_final(position);
  if (!d) throw Error(ErrorKind::UnreachableFinal, "no final state is reachable from '" + m.state_name(position) + "'");
  return *d;
}

}  // namespace fuzzyalign
