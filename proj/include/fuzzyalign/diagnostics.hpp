#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fuzzyalign/aligner.hpp"

namespace fuzzyalign {

struct SeveritySample {
  std::string constraint;  // "<activity>: <predicate>"
  std::size_t move_index = 0;
  double severity = 0.0;
};

struct TraceComparison {
  std::string case_id;
  bool failed = false;
  std::string error;
  double cost_crisp = 0.0;
  double cost_fuzzy = 0.0;
  double fitness_crisp = 0.0;
  double fitness_fuzzy = 0.0;
  bool truncated_crisp = false;
  bool truncated_fuzzy = false;
  std::vector<SeveritySample> severities;
  AlignmentResult crisp;
  AlignmentResult fuzzy;
};

struct MoveCounts {
  std::size_t move_in_log = 0;
  std::size_t move_in_data = 0;
  friend bool operator==(const MoveCounts&, const MoveCounts&) = default;
};

/// Per guarded activity name.
using MoveStats = std::map<std::string, MoveCounts>;

struct QuantileSummary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

struct ComparisonReport {
  std::vector<TraceComparison> traces;
  std::size_t failed_count = 0;
  std::size_t movestats_excluded = 0;
  double above_diagonal_fraction = 0.0;
  std::map<std::string, QuantileSummary> severity;
  MoveStats crisp_stats;
  MoveStats fuzzy_stats;
};

struct CompareOptions {
  double epsilon = 1e-6;
  std::size_t optima_cap = 100;
  std::size_t node_budget = 1'000'000;
  std::size_t jobs = 1;
  CostWeights weights;
};

ComparisonReport compare(const ProcessModel& model, const EventLog& log,
                         const CompareOptions& options = {});

/// A trace contributes at most +1 per counter and activity: move-in-log if any
/// optimum has a log move on it, move-in-data if any has a sync-incorrect move.
/// Traces whose optima were truncated are skipped.
MoveStats move_stats(std::span<const Trace> traces, std::span<const OptimaSet> optima_per_trace,
                     std::span<const std::string> guarded_activities);

std::vector<std::string> guarded_activities(const ProcessModel& model);

/// Linear interpolation between closest ranks (h = (n−1)p).
double quantile(std::vector<double> sample, double p);
QuantileSummary summarize(std::vector<double> sample);

/// Throws Error{EmptySample} if the constraint was never violated.
QuantileSummary severity_distribution(const ComparisonReport& report, const std::string& constraint);

/// Q3 of the numeric values the log writes for `variable`. Throws Error{EmptySample}.
double third_quartile_suggestion(const EventLog& log, const std::string& variable);

/// Strictly above the diagonal: fuzzy > crisp + tie tolerance.
bool above_diagonal(const TraceComparison& t);

}  // namespace fuzzyalign
