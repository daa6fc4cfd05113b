#include "fuzzyalign/membership.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fuzzyalign/error.hpp"

namespace fuzzyalign {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

DeviationMF DeviationMF::crisp(Predicate p) {
  DeviationMF mf;
  mf.shape = Shape::Crisp;
  mf.predicate = std::move(p);
  return mf;
}

DeviationMF DeviationMF::ramp(double ideal, double tolerance) {
  DeviationMF mf;
  mf.shape = Shape::Ramp;
  mf.ideal = ideal;
  mf.tolerance = tolerance;
  mf.validate();
  return mf;
}

DeviationMF DeviationMF::piecewise(std::vector<std::pair<double, double>> points) {
  DeviationMF mf;
  mf.shape = Shape::Piecewise;
  mf.points = std::move(points);
  mf.validate();
  return mf;
}

void DeviationMF::validate() const {
  switch (shape) {
    case Shape::Crisp:
      if (!predicate) throw Error(ErrorKind::InvalidArgument, "crisp MF needs a predicate");
      break;
    case Shape::Ramp:
      if (!std::isfinite(ideal) || !std::isfinite(tolerance))
        throw Error(ErrorKind::InvalidArgument, "ramp MF bounds must be finite");
      if (ideal == tolerance)
        throw Error(ErrorKind::InvalidArgument, "ramp MF needs ideal != tolerance");
      break;
    case Shape::Piecewise:
      if (points.empty()) throw Error(ErrorKind::InvalidArgument, "piecewise MF needs at least one point");
      for (std::size_t i = 0; i < points.size(); ++i) {
        auto [v, s] = points[i];
        if (!std::isfinite(v) || !(s >= 0.0 && s <= 1.0))
          throw Error(ErrorKind::InvalidArgument, "piecewise MF severities must lie in [0,1]");
        if (i > 0 && !(v > points[i - 1].first))
          throw Error(ErrorKind::InvalidArgument, "piecewise MF breakpoints must be strictly increasing");
      }
      break;
  }
}

double eval_mf(const DeviationMF& mf, double value) {
  if (!std::isfinite(value)) throw Error(ErrorKind::NonFinite, "MF evaluated at a non-finite value");
  switch (mf.shape) {
    case DeviationMF::Shape::Crisp: return mf.predicate->holds(Value{value}) ? 0.0 : 1.0;
    case DeviationMF::Shape::Ramp: {
      double t = (value - mf.ideal) / (mf.tolerance - mf.ideal);
      return std::clamp(t, 0.0, 1.0);
    }
    case DeviationMF::Shape::Piecewise: {
      const auto& pts = mf.points;
      if (value <= pts.front().first) return pts.front().second;
      if (value >= pts.back().first) return pts.back().second;
      auto hi = std::upper_bound(pts.begin(), pts.end(), value,
                                 [](double v, const auto& p) { return v < p.first; });
      auto lo = hi - 1;
      double t = (value - lo->first) / (hi->first - lo->first);
      return std::clamp(lo->second + t * (hi->second - lo->second), 0.0, 1.0);
    }
  }
  return 1.0;
}

double eval_mf(const DeviationMF& mf, const Value& value) {
  if (const auto* d = std::get_if<double>(&value)) return eval_mf(mf, *d);
  if (mf.shape == DeviationMF::Shape::Crisp) return mf.predicate->holds(value) ? 0.0 : 1.0;
  throw Error(ErrorKind::InvalidArgument, "graded MF evaluated on a string value");
}

DeviationMF mf_from_tolerance(const Predicate& predicate, double tolerance_bound) {
  if (!is_inequality(predicate.op) || !is_number(predicate.constant))
    throw Error(ErrorKind::InvalidArgument,
                "tolerance ramps need a numeric inequality, got '" + predicate.text() + "'");
  double c = std::get<double>(predicate.constant);
  bool lower_bound = predicate.op == CmpOp::Ge || predicate.op == CmpOp::Gt;
  bool violating_side = lower_bound ? tolerance_bound < c : tolerance_bound > c;
  if (!violating_side)
    throw Error(ErrorKind::InvalidArgument, "tolerance bound " + format_number(tolerance_bound) +
                                                " is on the compliant side of '" + predicate.text() + "'");
  return DeviationMF::ramp(c, tolerance_bound);
}

bool Interval::contains(double v) const {
  bool above = lo_closed ? v >= lo : v > lo;
  bool below = hi_closed ? v <= hi : v < hi;
  return above && below;
}

bool contains(const IntervalSet& set, double v) {
  return std::any_of(set.begin(), set.end(), [v](const Interval& i) { return i.contains(v); });
}

namespace {

IntervalSet normalize(IntervalSet pieces) {
  std::sort(pieces.begin(), pieces.end(), [](const Interval& a, const Interval& b) {
    if (a.lo != b.lo) return a.lo < b.lo;
    return a.lo_closed && !b.lo_closed;
  });
  IntervalSet out;
  for (const auto& p : pieces) {
    if (!out.empty()) {
      Interval& last = out.back();
      bool touches = p.lo < last.hi || (p.lo == last.hi && (p.lo_closed || last.hi_closed));
      if (touches) {
        if (p.hi > last.hi) {
          last.hi = p.hi;
          last.hi_closed = p.hi_closed;
        } else if (p.hi == last.hi) {
          last.hi_closed = last.hi_closed || p.hi_closed;
        }
        continue;
      }
    }
    out.push_back(p);
  }
  return out;
}

// Regions of a continuous piecewise-linear function where it is > 0
// (`want_one` false) or == 1 (`want_one` true).
IntervalSet pl_region(const std::vector<std::pair<double, double>>& pts, bool want_one) {
  auto in = [want_one](double s) { return want_one ? s >= 1.0 : s > 0.0; };
  IntervalSet pieces;
  if (in(pts.front().second)) pieces.push_back({-kInf, pts.front().first, false, true});
  if (in(pts.back().second)) pieces.push_back({pts.back().first, kInf, true, false});
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    auto [x0, s0] = pts[i];
    auto [x1, s1] = pts[i + 1];
    bool a = in(s0), b = in(s1);
    if (a && b) {
      if (want_one || (s0 > 0 && s1 > 0)) pieces.push_back({x0, x1, true, true});
    } else if (a) {
      if (want_one)
        pieces.push_back({x0, x0, true, true});
      else
        pieces.push_back({x0, x1, true, false});
    } else if (b) {
      if (want_one)
        pieces.push_back({x1, x1, true, true});
      else
        pieces.push_back({x0, x1, false, true});
    }
  }
  return normalize(std::move(pieces));
}

IntervalSet violating_set(const Predicate& p) {
  double c = std::get<double>(p.constant);
  switch (p.op) {
    case CmpOp::Lt: return {{c, kInf, true, false}};
    case CmpOp::Le: return {{c, kInf, false, false}};
    case CmpOp::Ge: return {{-kInf, c, false, false}};
    case CmpOp::Gt: return {{-kInf, c, false, true}};
    case CmpOp::Eq: return {{-kInf, c, false, false}, {c, kInf, false, false}};
    case CmpOp::Ne: return {{c, c, true, true}};
  }
  return {};
}

}  // namespace

MFRegion regions(const DeviationMF& mf) {
  switch (mf.shape) {
    case DeviationMF::Shape::Crisp: {
      if (!is_number(mf.predicate->constant))
        throw Error(ErrorKind::InvalidArgument, "regions need a numeric predicate");
      auto set = violating_set(*mf.predicate);
      return {set, set};
    }
    case DeviationMF::Shape::Ramp: {
      if (mf.tolerance < mf.ideal)
        return {{{-kInf, mf.ideal, false, false}}, {{-kInf, mf.tolerance, false, true}}};
      return {{{mf.ideal, kInf, false, false}}, {{mf.tolerance, kInf, true, false}}};
    }
    case DeviationMF::Shape::Piecewise: return {pl_region(mf.points, false), pl_region(mf.points, true)};
  }
  return {};
}

}  // namespace fuzzyalign
