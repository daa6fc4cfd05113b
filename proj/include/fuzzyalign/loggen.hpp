#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "fuzzyalign/event_log.hpp"
#include "fuzzyalign/model.hpp"

namespace fuzzyalign {

enum class DeviationKind : std::uint8_t { SkipActivity, InsertActivity, AmountBelowGuard, DurationAboveGuard };

inline constexpr std::array<DeviationKind, 4> kDeviationKinds = {
    DeviationKind::AmountBelowGuard, DeviationKind::DurationAboveGuard, DeviationKind::SkipActivity,
    DeviationKind::InsertActivity};

const char* to_string(DeviationKind kind);

struct AmountDistribution {
  enum class Kind { Uniform, LogNormal, Empirical };
  Kind kind = Kind::LogNormal;
  double lo = 0.0, hi = 0.0;         // uniform
  double mu = 8.7, sigma = 0.9;      // lognormal
  std::vector<double> samples;       // empirical
};

struct DeviationRates {
  double skip_activity = 0.1;
  double insert_activity = 0.1;
  double amount_below_guard = 0.3;
  double duration_above_guard = 0.3;
};

/// Which model variables/activities play the Amount and Duration roles.
struct VariableMapping {
  std::string amount_variable = "Amount";
  std::string amount_guarded = "W_F_C";
  std::string duration_variable = "Duration";
  std::string duration_guarded = "W_FURTHER_A";
};

struct GenConfig {
  std::size_t trace_count = 500;
  std::uint64_t seed = 1;
  AmountDistribution amount;
  double gap_lo_hours = 4.0;
  double gap_hi_hours = 100.0;
  double late_fraction = 0.2;
  double late_shift_hours = 744.0;
  DeviationRates rates;
  /// Range an amount deviation resamples from (capped below the guard constant).
  double amount_deviation_lo = 2000.0;
  double amount_deviation_hi = 10000.0;
  /// A duration deviation lands in (guard, guard + excess] days.
  double duration_excess_days = 60.0;
  std::size_t max_walk_length = 80;
  VariableMapping mapping;

  void validate() const;
};

/// Throws Error{InvalidArgument}; missing keys keep their defaults.
GenConfig parse_gen_config(std::string_view json_text);

/// Portable per-trace stream: mt19937_64 seeded with splitmix64(seed, index).
std::mt19937_64 trace_stream(std::uint64_t seed, std::uint64_t index);
double uniform01(std::mt19937_64& rng);
double uniform(std::mt19937_64& rng, double lo, double hi);
double standard_normal(std::mt19937_64& rng);

/// Model-derived data for injections: guard constants of the mapped activities.
struct InjectionContext {
  const ProcessModel* model = nullptr;
  const GenConfig* config = nullptr;
  double amount_guard = 0.0;    // Amount >= amount_guard required
  double duration_guard = 0.0;  // Duration <= duration_guard required

  static InjectionContext from(const ProcessModel& model, const GenConfig& config);
};

/// Mutates the trace; returns false (trace unchanged) when the kind is inapplicable.
bool inject_deviation(Trace& trace, DeviationKind kind, std::mt19937_64& rng,
                      const InjectionContext& ctx);

struct GeneratedLog {
  EventLog log;
  std::vector<std::vector<DeviationKind>> injected;  // per trace, in application order
  std::array<std::size_t, 4> injected_counts{};      // indexed by DeviationKind

  std::size_t count(DeviationKind k) const { return injected_counts[static_cast<std::size_t>(k)]; }
};

GeneratedLog generate(const ProcessModel& model, const GenConfig& config);

}  // namespace fuzzyalign
