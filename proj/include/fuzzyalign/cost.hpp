#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fuzzyalign/event_log.hpp"
#include "fuzzyalign/model.hpp"

namespace fuzzyalign {

enum class MoveKind : std::uint8_t { LogMove, ModelMove, SyncCorrect, SyncIncorrect };

const char* to_string(MoveKind kind);

/// A variable that made a synchronous move incorrect.
struct Violation {
  std::string variable;
  /// Source text of the violated predicate; empty for a missing write.
  std::string predicate;
  /// Log-side value; nullopt when the log event did not write a variable in W(a).
  std::optional<Value> value;
  /// eval_mf of the attached MF; 1 in crisp mode or when the predicate has none.
  double severity = 1.0;
  /// True when no MF was attached and the crisp price was used.
  bool crisp_fallback = false;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct MoveClass {
  MoveKind kind = MoveKind::SyncCorrect;
  std::vector<Violation> violations;
};

enum class CostMode { Crisp, Fuzzy };

const char* to_string(CostMode mode);

/// Control-flow weights. Defaults reproduce the standard data-aware cost.
struct CostWeights {
  double log_move = 1.0;
  double model_move_base = 1.0;
  double per_write = 1.0;
};

struct CostProfile {
  CostMode mode = CostMode::Crisp;
  CostWeights weights;
};

/// Parses `{log_move, model_move_base, per_write}`; all optional, all >= 0.
CostWeights parse_cost_weights(std::string_view json_text);

/// What the alignment knows about a variable along the model path.
struct DataSlot {
  enum class Tag : std::uint8_t { Unset, Corrected, Observed };

  Tag tag = Tag::Unset;
  Value value;

  static DataSlot observed(Value v) { return {Tag::Observed, std::move(v)}; }
  static DataSlot corrected() { return {Tag::Corrected, {}}; }

  friend bool operator==(const DataSlot&, const DataSlot&) = default;
};

/// Classifies a legal move. `log` is the log step (nullptr for ≫), `activity`
/// the model step (nullopt for ≫), `slots` the valuation before the move.
/// The guard is evaluated on observed values; when an OR has both sides
/// failing, the branch that is cheaper under `mode` is charged.
/// Throws Error{IllegalMove} for (≫,≫) and Error{ActivityMismatch}.
MoveClass classify_move(const ProcessModel& model, const Event* log,
                        std::optional<ActivityId> activity, std::span<const DataSlot> slots,
                        CostMode mode);

/// Log 1, model 1+|W|, sync-incorrect = #violating variables, sync-correct 0.
double crisp_cost(const MoveClass& k, const ProcessModel& model,
                  std::optional<ActivityId> activity, const CostWeights& w = {});

/// As crisp, but sync-incorrect = Σ per variable of the severity.
double fuzzy_cost(const MoveClass& k, const ProcessModel& model,
                  std::optional<ActivityId> activity, const CostWeights& w = {});

double move_cost(const MoveClass& k, const ProcessModel& model, std::optional<ActivityId> activity,
                 const CostProfile& profile);

/// Cost of a model move on `a` (0 for invisible activities).
double model_move_cost(const ProcessModel& model, ActivityId a, const CostWeights& w);

}  // namespace fuzzyalign
