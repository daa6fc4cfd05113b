#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fuzzyalign/cost.hpp"
#include "fuzzyalign/event_log.hpp"
#include "fuzzyalign/model.hpp"

namespace fuzzyalign {

inline constexpr double kTieTolerance = 1e-9;

struct AlignOptions {
  double epsilon = 1e-6;
  /// Collect every optimum (up to `optima_cap`) instead of only the first.
  bool all_optima = false;
  std::size_t optima_cap = 100;
  std::size_t node_budget = 1'000'000;
  /// false turns A* into Dijkstra (h = 0).
  bool use_heuristic = true;
};

struct AlignmentMove {
  std::optional<std::size_t> log_index;   // ≫ when empty
  std::optional<ActivityId> model_activity;  // ≫ when empty
  MoveKind kind = MoveKind::SyncCorrect;
  std::vector<Violation> violations;
  double cost = 0.0;
};

struct Alignment {
  std::vector<AlignmentMove> moves;
  double total_cost = 0.0;  // K(γ)

  /// g(γ) = K(γ) + ε|γ|.
  double search_cost(double epsilon) const {
    return total_cost + epsilon * static_cast<double>(moves.size());
  }
};

struct SearchStats {
  std::size_t expanded = 0;
  std::size_t queue_peak = 0;
};

struct AlignmentResult {
  double optimal_cost = 0.0;  // K of the optima
  double search_cost = 0.0;   // g of the optima
  double worst_cost = 0.0;    // reference g for fitness
  double fitness = 1.0;
  std::vector<Alignment> alignments;  // sorted; [0] is the default alignment
  bool truncated = false;
  bool epsilon_warning = false;
  SearchStats stats;
};

/// Valuation after a move; W(a) takes the log value on sync moves (or
/// `corrected` when the log omitted it) and `corrected` on model moves.
std::vector<DataSlot> advance_slots(const ProcessModel& model, std::vector<DataSlot> slots,
                                    const Event* log, std::optional<ActivityId> activity);

/// A* over alignment prefixes. Throws Error{UnreachableFinal} when the model
/// cannot finish and Error{BudgetExceeded} past `node_budget` expansions.
AlignmentResult align(const ProcessModel& model, const Trace& trace, const CostProfile& profile,
                      const AlignOptions& options = {});

/// ε · max(remaining events, min moves to a final state).
double heuristic(const ProcessModel& model, StateId position, std::size_t remaining_events,
                 double epsilon);

struct OptimaSet {
  std::vector<Alignment> alignments;
  bool truncated = false;
};

OptimaSet enumerate_optima(const ProcessModel& model, const Trace& trace, const CostProfile& profile,
                           double epsilon, std::size_t cap);

/// All-log-moves plus the cheapest model-only run, ε terms included.
double worst_case_cost(const ProcessModel& model, const Trace& trace, const CostProfile& profile,
                       double epsilon);

/// 1 − optimal/worst clamped to [0,1]; 1 when worst is 0.
double fitness(double optimal_cost, double worst_cost);

/// Model-side projection (activities of non-≫ model steps).
std::vector<ActivityId> model_projection(const Alignment& a);
/// Log-side projection as event indices.
std::vector<std::size_t> log_projection(const Alignment& a);

}  // namespace fuzzyalign
