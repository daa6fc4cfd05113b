#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "fuzzyalign/guard.hpp"

namespace fuzzyalign {

/// Deviation-severity function attached to a guard predicate. Severity is the
/// degree of deviation (0 = compliant, 1 = fully deviating), i.e. the
/// complement of membership in the acceptable set.
struct DeviationMF {
  enum class Shape { Crisp, Ramp, Piecewise };

  Shape shape = Shape::Crisp;
  /// Crisp: severity 1 exactly when this predicate fails.
  std::optional<Predicate> predicate;
  /// Ramp: 0 at/beyond `ideal` on the compliant side, 1 at/beyond `tolerance`.
  double ideal = 0.0;
  double tolerance = 0.0;
  /// Piecewise: strictly increasing values, severities in [0,1], clamped at the ends.
  std::vector<std::pair<double, double>> points;

  static DeviationMF crisp(Predicate p);
  static DeviationMF ramp(double ideal, double tolerance);
  static DeviationMF piecewise(std::vector<std::pair<double, double>> points);

  /// Throws Error{InvalidArgument} when a shape invariant is broken.
  void validate() const;
};

/// Severity in [0,1]. Throws Error{NonFinite} for NaN/inf.
double eval_mf(const DeviationMF& mf, double value);
/// Crisp MFs also work on string-valued predicates; other shapes need a number.
double eval_mf(const DeviationMF& mf, const Value& value);

/// Ramp from the predicate's constant to `tolerance_bound`, which must lie
/// strictly on the violating side of an inequality predicate.
DeviationMF mf_from_tolerance(const Predicate& predicate, double tolerance_bound);

struct Interval {
  double lo;  // may be -inf
  double hi;  // may be +inf
  bool lo_closed;
  bool hi_closed;

  bool contains(double v) const;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Sorted, disjoint, non-adjacent intervals.
using IntervalSet = std::vector<Interval>;

bool contains(const IntervalSet& set, double v);

struct MFRegion {
  IntervalSet support;  // severity > 0
  IntervalSet core;     // severity == 1
};

MFRegion regions(const DeviationMF& mf);

}  // namespace fuzzyalign
