#include "fuzzyalign/cost.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "fuzzyalign/error.hpp"

namespace fuzzyalign {

const char* to_string(MoveKind kind) {
  switch (kind) {
    case MoveKind::LogMove: return "log-move";
    case MoveKind::ModelMove: return "model-move";
    case MoveKind::SyncCorrect: return "sync-correct";
    case MoveKind::SyncIncorrect: return "sync-incorrect";
  }
  return "?";
}

const char* to_string(CostMode mode) { return mode == CostMode::Crisp ? "crisp" : "fuzzy"; }

CostWeights parse_cost_weights(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Syntax, std::string("cost override: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::Semantic, "cost override must be a JSON object");
  CostWeights w;
  auto read = [&](const char* key, double& field) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number()) throw Error(ErrorKind::Semantic, std::string("cost override '") + key + "' must be a number");
    field = j.at(key).get<double>();
    if (!(field >= 0.0)) throw Error(ErrorKind::Semantic, std::string("cost override '") + key + "' must be non-negative");
  };
  read("log_move", w.log_move);
  read("model_move_base", w.model_move_base);
  read("per_write", w.per_write);
  for (const auto& [k, v] : j.items())
    if (k != "log_move" && k != "model_move_base" && k != "per_write")
      throw Error(ErrorKind::Semantic, "unknown cost override key '" + k + "'");
  return w;
}

namespace {

double severity_of(const ActivitySpec& spec, const std::string& source, const Value& value, bool& fallback) {
  const DeviationMF* mf = spec.mf_for(source);
  if (mf == nullptr) {
    fallback = true;
    return 1.0;
  }
  fallback = false;
  try {
    return eval_mf(*mf, value);
  } catch (const Error&) {
    fallback = true;
    return 1.0;
  }
}

// Per variable: 1 (crisp) or the largest severity (fuzzy).
double price(const std::vector<Violation>& vs, CostMode mode) {
  std::map<std::string_view, double> per_var;
  for (const auto& v : vs) {
    double s = mode == CostMode::Crisp ? 1.0 : v.severity;
    auto [it, inserted] = per_var.emplace(v.variable, s);
    if (!inserted) it->second = std::max(it->second, s);
  }
  double total = 0.0;
  for (const auto& [k, s] : per_var) total += s;
  return total;
}

struct GuardCharger {
  const ActivitySpec& spec;
  const ProcessModel& model;
  const Event& log;
  std::span<const DataSlot> slots;
  CostMode mode;

  // Violations that make `g` false; empty when `g` holds (or cannot be judged).
  std::vector<Violation> charge(const GuardExpr& g) const {
    switch (g.kind) {
      case GuardExpr::Kind::Atom: return charge_atom(g);
      case GuardExpr::Kind::Not: return charge(to_nnf(g));
      case GuardExpr::Kind::And: {
        auto lhs = charge(g.operands[0]);
        auto rhs = charge(g.operands[1]);
        lhs.insert(lhs.end(), rhs.begin(), rhs.end());
        return lhs;
      }
      case GuardExpr::Kind::Or: {
        auto lhs = charge(g.operands[0]);
        if (lhs.empty()) return lhs;
        auto rhs = charge(g.operands[1]);
        if (rhs.empty()) return rhs;
        return price(rhs, mode) < price(lhs, mode) ? rhs : lhs;
      }
    }
    return {};
  }

  std::vector<Violation> charge_atom(const GuardExpr& leaf) const {
    const Predicate& p = leaf.atom;
    const Value* value = nullptr;
    if (p.primed) {
      auto it = log.writes.find(p.variable);
      if (it != log.writes.end()) value = &it->second;
    } else {
      const DataSlot& slot = slots[*model.variable_index(p.variable)];
      if (slot.tag == DataSlot::Tag::Observed) value = &slot.value;
    }
    if (value == nullptr || p.holds(*value)) return {};
    Violation v;
    v.variable = p.variable;
    v.predicate = leaf.source;
    v.value = *value;
    v.severity = severity_of(spec, leaf.source, *value, v.crisp_fallback);
    if (mode == CostMode::Crisp) v.severity = 1.0;
    return {v};
  }
};

}  // namespace

MoveClass classify_move(const ProcessModel& model, const Event* log, std::optional<ActivityId> activity,
                        std::span<const DataSlot> slots, CostMode mode) {
  if (log == nullptr && !activity) throw Error(ErrorKind::IllegalMove, "illegal move (>>, >>)");
  if (!activity) return {MoveKind::LogMove, {}};
  if (log == nullptr) return {MoveKind::ModelMove, {}};

  const ActivitySpec& spec = model.activity(*activity);
  if (spec.invisible || log->activity != spec.name)
    throw Error(ErrorKind::ActivityMismatch,
                "cannot synchronize log activity '" + log->activity + "' with model activity '" + spec.name + "'");

  MoveClass out;
  for (const auto& w : spec.writes) {
    auto it = log->writes.find(w);
    if (it == log->writes.end()) {
      out.violations.push_back({w, "", std::nullopt, 1.0, false});
    } else if (!model.find_variable(w)->admits(it->second)) {
      out.violations.push_back({w, "", it->second, 1.0, false});
    }
  }
  if (spec.guard_nnf) {
    GuardCharger charger{spec, model, *log, slots, mode};
    auto vs = charger.charge(*spec.guard_nnf);
    out.violations.insert(out.violations.end(), vs.begin(), vs.end());
  }
  out.kind = out.violations.empty() ? MoveKind::SyncCorrect : MoveKind::SyncIncorrect;
  return out;
}

double model_move_cost(const ProcessModel& model, ActivityId a, const CostWeights& w) {
  const ActivitySpec& spec = model.activity(a);
  if (spec.invisible) return 0.0;
  return w.model_move_base + w.per_write * static_cast<double>(spec.writes.size());
}

namespace {

double control_flow_cost(const MoveClass& k, const ProcessModel& model, std::optional<ActivityId> activity,
                         const CostWeights& w) {
  if (k.kind == MoveKind::LogMove) return w.log_move;
  if (!activity) throw Error(ErrorKind::IllegalMove, "model move without an activity");
  return model_move_cost(model, *activity, w);
}

}  // namespace

double crisp_cost(const MoveClass& k, const ProcessModel& model, std::optional<ActivityId> activity,
                  const CostWeights& w) {
  switch (k.kind) {
    case MoveKind::LogMove:
    case MoveKind::ModelMove: return control_flow_cost(k, model, activity, w);
    case MoveKind::SyncIncorrect: return price(k.violations, CostMode::Crisp);
    case MoveKind::SyncCorrect: return 0.0;
  }
  return 0.0;
}

double fuzzy_cost(const MoveClass& k, const ProcessModel& model, std::optional<ActivityId> activity,
                  const CostWeights& w) {
  switch (k.kind) {
    case MoveKind::LogMove:
    case MoveKind::ModelMove: return control_flow_cost(k, model, activity, w);
    case MoveKind::SyncIncorrect: return price(k.violations, CostMode::Fuzzy);
    case MoveKind::SyncCorrect: return 0.0;
  }
  return 0.0;
}

double move_cost(const MoveClass& k, const ProcessModel& model, std::optional<ActivityId> activity,
                 const CostProfile& profile) {
  return profile.mode == CostMode::Crisp ? crisp_cost(k, model, activity, profile.weights)
                                         : fuzzy_cost(k, model, activity, profile.weights);
}

}  // namespace fuzzyalign
