#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fuzzyalign/guard.hpp"
#include "fuzzyalign/membership.hpp"
#include "fuzzyalign/value.hpp"

namespace fuzzyalign {

struct StateId {
  std::uint32_t value = 0;
  friend auto operator<=>(const StateId&, const StateId&) = default;
};

struct ActivityId {
  std::uint32_t value = 0;
  friend auto operator<=>(const ActivityId&, const ActivityId&) = default;
};

enum class VarKind { Real, Integer, String };

struct VariableDecl {
  std::string name;
  VarKind kind = VarKind::Real;
  /// Closed numeric interval, for Real/Integer.
  std::optional<std::pair<double, double>> interval;
  /// Admissible strings, for String; empty means unrestricted.
  std::vector<std::string> enumeration;

  bool admits(const Value& v) const;
};

struct MfBinding {
  Predicate predicate;
  DeviationMF mf;
};

struct ActivitySpec {
  std::string name;
  std::vector<std::string> writes;  // sorted
  std::optional<GuardExpr> guard;
  /// Negation-normal form of `guard`, filled in by ProcessModel.
  std::optional<GuardExpr> guard_nnf;
  std::vector<MfBinding> mfs;
  bool invisible = false;

  bool writes_variable(std::string_view var) const;
  /// MF attached to the predicate with this canonical text, if any.
  const DeviationMF* mf_for(std::string_view predicate_text) const;
};

struct Transition {
  StateId from;
  ActivityId activity;
  StateId to;
};

/// Data-aware transition system. Immutable once built; the constructor
/// validates every structural invariant and throws Error{Semantic}.
class ProcessModel {
 public:
  ProcessModel(std::vector<VariableDecl> variables, std::vector<std::string> states,
               std::vector<std::string> initial, std::vector<std::string> final_states,
               std::vector<ActivitySpec> activities,
               std::vector<std::tuple<std::string, std::string, std::string>> transitions);

  std::span<const VariableDecl> variables() const { return variables_; }
  std::span<const ActivitySpec> activities() const { return activities_; }
  std::span<const Transition> transitions() const { return transitions_; }
  std::span<const StateId> initial_states() const { return initial_; }
  std::size_t state_count() const { return state_names_.size(); }

  const std::string& state_name(StateId s) const { return state_names_.at(s.value); }
  const ActivitySpec& activity(ActivityId a) const { return activities_.at(a.value); }

  std::optional<StateId> find_state(std::string_view name) const;
  std::optional<ActivityId> find_activity(std::string_view name) const;
  std::optional<std::size_t> variable_index(std::string_view name) const;
  const VariableDecl* find_variable(std::string_view name) const;

  bool is_initial(StateId s) const;
  bool is_final(StateId s) const { return final_.at(s.value); }

  /// Outgoing transitions sorted by activity name.
  std::span<const Transition> outgoing(StateId s) const;
  std::optional<StateId> successor(StateId s, ActivityId a) const;

  /// Shortest control-flow distance to a final state; nullopt if none is reachable.
  std::optional<std::size_t> distance_to_final(StateId s) const { return distance_.at(s.value); }

  std::size_t guarded_activity_count() const;
  std::size_t mf_count() const;
  /// Atomic predicates of guards that carry no MF (priced crisp in fuzzy mode).
  std::vector<std::string> crisp_fallback_predicates() const;
  bool has_mfs() const { return mf_count() > 0; }

  /// Same model with every MF replaced by the crisp shape of its predicate.
  ProcessModel with_crisp_mfs() const;

 private:
  void validate_and_index();

  std::vector<VariableDecl> variables_;
  std::vector<std::string> state_names_;
  std::vector<StateId> initial_;
  std::vector<bool> final_;
  std::vector<ActivitySpec> activities_;
  std::vector<Transition> transitions_;
  std::vector<std::size_t> out_begin_;  // CSR offsets into transitions_
  std::vector<std::optional<std::size_t>> distance_;
  std::map<std::string, std::uint32_t, std::less<>> state_index_;
  std::map<std::string, std::uint32_t, std::less<>> activity_index_;
  std::map<std::string, std::size_t, std::less<>> variable_index_;
};

/// Parses the JSON model document. Syntax errors carry the byte offset.
ProcessModel parse_model(std::string_view text);
ProcessModel load_model(const std::string& path);

/// A position plus the variable valuation (nullopt = unwritten).
struct ModelState {
  StateId position;
  std::vector<std::optional<Value>> values;  // indexed like ProcessModel::variables()

  friend bool operator==(const ModelState&, const ModelState&) = default;
};

std::vector<ModelState> initial_model_states(const ProcessModel& m);

/// Valid firing: enabled, writes exactly W(a), guard true with primed
/// variables reading `writes`. Throws Error{NotEnabled|WrongWriteSet|GuardViolated|
/// UndefinedVariable} with a message listing the offending items.
ModelState fire(const ProcessModel& m, const ModelState& s, std::string_view activity,
                const std::map<std::string, Value>& writes);

/// Throws Error{UnreachableFinal}.
std::size_t min_moves_to_final(const ProcessModel& m, StateId position);

}  // namespace fuzzyalign
