#include "fuzzyalign/loggen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "fuzzyalign/error.hpp"

namespace fuzzyalign {

const char* to_string(DeviationKind kind) {
  switch (kind) {
    case DeviationKind::SkipActivity: return "skip_activity";
    case DeviationKind::InsertActivity: return "insert_activity";
    case DeviationKind::AmountBelowGuard: return "amount_below_guard";
    case DeviationKind::DurationAboveGuard: return "duration_above_guard";
  }
  return "?";
}

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorKind::InvalidArgument, msg); }

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

void GenConfig::validate() const {
  if (trace_count == 0) invalid("trace_count must be positive");
  for (double p : {rates.skip_activity, rates.insert_activity, rates.amount_below_guard, rates.duration_above_guard,
                   late_fraction})
    if (!is_probability(p)) invalid("probabilities must lie in [0,1]");
  if (!(gap_lo_hours < gap_hi_hours) || gap_lo_hours < 0) invalid("step gap needs 0 <= lo < hi");
  if (!(amount_deviation_lo < amount_deviation_hi)) invalid("amount deviation range needs lo < hi");
  if (!(duration_excess_days > 0)) invalid("duration_excess_days must be positive");
  if (late_shift_hours < 0) invalid("late_shift_hours must be non-negative");
  if (max_walk_length == 0) invalid("max_walk_length must be positive");
  switch (amount.kind) {
    case AmountDistribution::Kind::Uniform:
      if (!(amount.lo < amount.hi)) invalid("uniform amount distribution needs lo < hi");
      break;
    case AmountDistribution::Kind::LogNormal:
      if (!(amount.sigma > 0)) invalid("lognormal sigma must be positive");
      break;
    case AmountDistribution::Kind::Empirical:
      if (amount.samples.empty()) invalid("empirical amount distribution has no samples");
      break;
  }
}

GenConfig parse_gen_config(std::string_view json_text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    invalid(std::string("generator config: ") + e.what());
  }
  GenConfig c;
  try {
    if (!j.is_object()) invalid("generator config must be a JSON object");
    c.trace_count = j.value("trace_count", c.trace_count);
    c.seed = j.value("seed", c.seed);
    if (j.contains("amount")) {
      const auto& a = j.at("amount");
      std::string type = a.at("type").get<std::string>();
      if (type == "uniform") {
        c.amount.kind = AmountDistribution::Kind::Uniform;
        c.amount.lo = a.at("lo").get<double>();
        c.amount.hi = a.at("hi").get<double>();
      } else if (type == "lognormal") {
        c.amount.kind = AmountDistribution::Kind::LogNormal;
        c.amount.mu = a.value("mu", c.amount.mu);
        c.amount.sigma = a.value("sigma", c.amount.sigma);
      } else if (type == "empirical") {
        c.amount.kind = AmountDistribution::Kind::Empirical;
        if (a.contains("values")) c.amount.samples = a.at("values").get<std::vector<double>>();
        if (a.contains("file")) {
          std::ifstream in(a.at("file").get<std::string>());
          if (!in) invalid("cannot open empirical amount file");
          for (double v; in >> v;) c.amount.samples.push_back(v);
        }
      } else {
        invalid("unknown amount distribution '" + type + "'");
      }
    }
    if (j.contains("step_gap_hours")) {
      const auto& g = j.at("step_gap_hours");
      if (!g.is_array() || g.size() != 2) invalid("step_gap_hours must be [lo, hi]");
      c.gap_lo_hours = g[0].get<double>();
      c.gap_hi_hours = g[1].get<double>();
    }
    c.late_fraction = j.value("late_fraction", c.late_fraction);
    c.late_shift_hours = j.value("late_shift_hours", c.late_shift_hours);
    if (j.contains("rates")) {
      const auto& r = j.at("rates");
      for (const auto& [k, v] : r.items()) {
        double p = v.get<double>();
        if (k == "skip_activity") c.rates.skip_activity = p;
        else if (k == "insert_activity") c.rates.insert_activity = p;
        else if (k == "amount_below_guard") c.rates.amount_below_guard = p;
        else if (k == "duration_above_guard") c.rates.duration_above_guard = p;
        else invalid("unknown deviation kind '" + k + "'");
      }
    }
    if (j.contains("amount_deviation_range")) {
      const auto& g = j.at("amount_deviation_range");
      if (!g.is_array() || g.size() != 2) invalid("amount_deviation_range must be [lo, hi]");
      c.amount_deviation_lo = g[0].get<double>();
      c.amount_deviation_hi = g[1].get<double>();
    }
    c.duration_excess_days = j.value("duration_excess_days", c.duration_excess_days);
    c.max_walk_length = j.value("max_walk_length", c.max_walk_length);
    if (j.contains("mapping")) {
      const auto& m = j.at("mapping");
      c.mapping.amount_variable = m.value("amount_variable", c.mapping.amount_variable);
      c.mapping.amount_guarded = m.value("amount_guarded", c.mapping.amount_guarded);
      c.mapping.duration_variable = m.value("duration_variable", c.mapping.duration_variable);
      c.mapping.duration_guarded = m.value("duration_guarded", c.mapping.duration_guarded);
    }
  } catch (const json::exception& e) {
    invalid(std::string("generator config: ") + e.what());
  }
  c.validate();
  return c;
}

std::mt19937_64 trace_stream(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(index)));
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

double standard_normal(std::mt19937_64& rng) {
  double u1 = 1.0 - uniform01(rng);  // (0, 1]
  double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
}

bool bernoulli(std::mt19937_64& rng, double p) { return uniform01(rng) < p; }

const Predicate* mapped_atom(const ProcessModel& model, const std::string& activity, const std::string& variable,
                             bool lower_bound, std::vector<Predicate>& storage) {
  auto a = model.find_activity(activity);
  if (!a || !model.activity(*a).guard) invalid("model has no guarded activity '" + activity + "'");
  storage = model.activity(*a).guard->atoms();
  for (const auto& p : storage) {
    if (p.variable != variable || !is_number(p.constant)) continue;
    bool is_lower = p.op == CmpOp::Ge || p.op == CmpOp::Gt;
    bool is_upper = p.op == CmpOp::Le || p.op == CmpOp::Lt;
    if ((lower_bound && is_lower) || (!lower_bound && is_upper)) return &p;
  }
  invalid("guard of '" + activity + "' has no " + (lower_bound ? "lower" : "upper") + " bound on '" + variable + "'");
}

double round_to(double v, double step) { return std::round(v / step) * step; }

bool is_maskable(const Event& e, const InjectionContext& ctx) {
  const auto& m = ctx.config->mapping;
  return e.writes.empty() && e.activity != m.amount_guarded && e.activity != m.duration_guarded;
}

// Index of the last event before `before` that writes `var`.
std::optional<std::size_t> last_writer(const Trace& t, const std::string& var, std::size_t before) {
  for (std::size_t i = before; i-- > 0;)
    if (t.events[i].writes.count(var)) return i;
  return std::nullopt;
}

std::optional<std::size_t> find_activity(const Trace& t, const std::string& name) {
  for (std::size_t i = 0; i < t.events.size(); ++i)
    if (t.events[i].activity == name) return i;
  return std::nullopt;
}

}  // namespace

InjectionContext InjectionContext::from(const ProcessModel& model, const GenConfig& config) {
  const auto& m = config.mapping;
  for (const auto& v : {m.amount_variable, m.duration_variable}) {
    const VariableDecl* d = model.find_variable(v);
    if (!d || d->kind == VarKind::String) invalid("model lacks numeric variable '" + v + "'");
  }
  InjectionContext ctx;
  ctx.model = &model;
  ctx.config = &config;
  std::vector<Predicate> storage;
  ctx.amount_guard = std::get<double>(mapped_atom(model, m.amount_guarded, m.amount_variable, true, storage)->constant);
  ctx.duration_guard =
      std::get<double>(mapped_atom(model, m.duration_guarded, m.duration_variable, false, storage)->constant);
  return ctx;
}

bool inject_deviation(Trace& trace, DeviationKind kind, std::mt19937_64& rng, const InjectionContext& ctx) {
  const GenConfig& cfg = *ctx.config;
  switch (kind) {
    case DeviationKind::AmountBelowGuard: {
      auto guarded = find_activity(trace, cfg.mapping.amount_guarded);
      if (!guarded) return false;
      auto writer = last_writer(trace, cfg.mapping.amount_variable, *guarded);
      if (!writer) return false;
      double hi = std::min(cfg.amount_deviation_hi, ctx.amount_guard);
      if (!(cfg.amount_deviation_lo < hi)) return false;
      double v = std::floor(uniform(rng, cfg.amount_deviation_lo, hi));
      if (v >= ctx.amount_guard) return false;
      trace.events[*writer].writes[cfg.mapping.amount_variable] = v;
      return true;
    }
    case DeviationKind::DurationAboveGuard: {
      auto guarded = find_activity(trace, cfg.mapping.duration_guarded);
      if (!guarded) return false;
      auto writer = last_writer(trace, cfg.mapping.duration_variable, *guarded);
      if (!writer) return false;
      double excess = std::max(uniform(rng, 0.0, cfg.duration_excess_days), 0.01);
      double v = std::ceil((ctx.duration_guard + excess) * 100.0) / 100.0;
      if (v <= ctx.duration_guard) v = ctx.duration_guard + 0.01;
      trace.events[*writer].writes[cfg.mapping.duration_variable] = v;
      return true;
    }
    case DeviationKind::SkipActivity: {
      if (trace.events.size() < 2) return false;
      std::vector<std::size_t> maskable;
      for (std::size_t i = 0; i < trace.events.size(); ++i)
        if (is_maskable(trace.events[i], ctx)) maskable.push_back(i);
      if (maskable.empty()) return false;
      trace.events.erase(trace.events.begin() + static_cast<std::ptrdiff_t>(maskable[pick(rng, maskable.size())]));
      return true;
    }
    case DeviationKind::InsertActivity: {
      std::vector<std::size_t> maskable;
      for (std::size_t i = 0; i < trace.events.size(); ++i)
        if (is_maskable(trace.events[i], ctx)) maskable.push_back(i);
      if (maskable.empty()) return false;
      Event copy = trace.events[maskable[pick(rng, maskable.size())]];
      std::size_t at = pick(rng, trace.events.size() + 1);
      trace.events.insert(trace.events.begin() + static_cast<std::ptrdiff_t>(at), std::move(copy));
      return true;
    }
  }
  return false;
}

namespace {

struct WalkPlan {
  double amount = 0.0;
  bool late = false;
  bool force_amount_guarded = false;
  bool force_duration_guarded = false;
};

double sample_amount(const AmountDistribution& d, std::mt19937_64& rng) {
  switch (d.kind) {
    case AmountDistribution::Kind::Uniform: return std::round(uniform(rng, d.lo, d.hi));
    case AmountDistribution::Kind::LogNormal: return std::round(std::exp(d.mu + d.sigma * standard_normal(rng)));
    case AmountDistribution::Kind::Empirical: return d.samples[pick(rng, d.samples.size())];
  }
  return 0.0;
}

Value default_value(const VariableDecl& d) {
  if (d.kind == VarKind::String) return d.enumeration.empty() ? std::string() : d.enumeration.front();
  return d.interval ? d.interval->first : 0.0;
}

// One random valid run of the model; nullopt if the walk got stuck.
std::optional<Trace> walk(const ProcessModel& model, const GenConfig& cfg, const InjectionContext& ctx,
                          const WalkPlan& plan, std::mt19937_64& rng) {
  const auto& map = cfg.mapping;
  auto inits = model.initial_states();
  StateId state = inits[pick(rng, inits.size())];
  std::map<std::string, Value> values;
  double hours = 0.0;
  Trace trace;
  for (std::size_t step = 0;; ++step) {
    auto out = model.outgoing(state);
    if (model.is_final(state) && (out.empty() || uniform01(rng) * static_cast<double>(out.size() + 1) < 1.0))
      return trace;
    if (step > 4 * cfg.max_walk_length) return std::nullopt;

    std::size_t here = model.distance_to_final(state).value_or(0);
    double gap = trace.events.empty() ? 0.0 : uniform(rng, cfg.gap_lo_hours, cfg.gap_hi_hours);

    struct Candidate {
      const Transition* t;
      std::map<std::string, Value> writes;
    };
    std::vector<Candidate> candidates;
    for (const Transition& t : out) {
      auto d = model.distance_to_final(t.to);
      if (!d) continue;
      if (step >= cfg.max_walk_length && *d >= here) continue;
      const ActivitySpec& spec = model.activity(t.activity);
      std::map<std::string, Value> writes;
      for (const auto& w : spec.writes) {
        if (w == map.amount_variable) {
          writes[w] = plan.amount;
        } else if (w == map.duration_variable) {
          double total = hours + gap + (plan.late ? cfg.late_shift_hours : 0.0);
          double days = round_to(total / 24.0, 0.01);
          if (plan.force_duration_guarded) days = std::min(days, ctx.duration_guard);
          writes[w] = days;
        } else {
          writes[w] = default_value(*model.find_variable(w));
        }
      }
      if (spec.guard) {
        bool ok = false;
        try {
          ok = eval_guard(*spec.guard, [&](const Predicate& p) -> const Value* {
            const auto& src = p.primed ? writes : values;
            auto it = src.find(p.variable);
            return it == src.end() ? nullptr : &it->second;
          });
        } catch (const Error&) {
          ok = false;
        }
        if (!ok) continue;
      }
      candidates.push_back({&t, std::move(writes)});
    }
    if (candidates.empty()) return std::nullopt;

    std::size_t chosen = pick(rng, candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const auto& name = model.activity(candidates[c].t->activity).name;
      if ((plan.force_amount_guarded && name == map.amount_guarded) ||
          (plan.force_duration_guarded && name == map.duration_guarded))
        chosen = c;
    }
    Candidate& c = candidates[chosen];
    const ActivitySpec& spec = model.activity(c.t->activity);
    if (!spec.invisible) {
      hours += gap;
      for (const auto& [k, v] : c.writes) values[k] = v;
      trace.events.push_back(Event{spec.name, std::move(c.writes)});
    } else {
      for (const auto& [k, v] : c.writes) values[k] = v;
    }
    state = c.t->to;
  }
}

}  // namespace

GeneratedLog generate(const ProcessModel& model, const GenConfig& config) {
  config.validate();
  const InjectionContext ctx = InjectionContext::from(model, config);
  GeneratedLog out;
  out.log.traces.reserve(config.trace_count);
  out.injected.resize(config.trace_count);
  const std::size_t width = std::to_string(config.trace_count).size();

  for (std::size_t i = 0; i < config.trace_count; ++i) {
    auto rng = trace_stream(config.seed, i);
    bool planned[4] = {};
    for (DeviationKind k : kDeviationKinds) {
      double p = 0.0;
      switch (k) {
        case DeviationKind::AmountBelowGuard: p = config.rates.amount_below_guard; break;
        case DeviationKind::DurationAboveGuard: p = config.rates.duration_above_guard; break;
        case DeviationKind::SkipActivity: p = config.rates.skip_activity; break;
        case DeviationKind::InsertActivity: p = config.rates.insert_activity; break;
      }
      planned[static_cast<std::size_t>(k)] = bernoulli(rng, p);
    }
    WalkPlan plan;
    plan.late = bernoulli(rng, config.late_fraction);
    plan.force_amount_guarded = planned[static_cast<std::size_t>(DeviationKind::AmountBelowGuard)];
    plan.force_duration_guarded = planned[static_cast<std::size_t>(DeviationKind::DurationAboveGuard)];
    plan.amount = sample_amount(config.amount, rng);
    if (plan.force_amount_guarded) {
      for (int tries = 0; plan.amount < ctx.amount_guard && tries < 1000; ++tries)
        plan.amount = sample_amount(config.amount, rng);
      plan.amount = std::max(plan.amount, ctx.amount_guard);
    }

    std::optional<Trace> trace;
    for (int attempt = 0; attempt < 100 && !trace; ++attempt) trace = walk(model, config, ctx, plan, rng);
    if (!trace) invalid("could not generate a valid run of the model for trace " + std::to_string(i + 1));
    std::string id = std::to_string(i + 1);
    trace->case_id = "case_" + std::string(width - id.size(), '0') + id;

    for (DeviationKind k : kDeviationKinds) {
      if (!planned[static_cast<std::size_t>(k)]) continue;
      if (inject_deviation(*trace, k, rng, ctx)) {
        out.injected[i].push_back(k);
        ++out.injected_counts[static_cast<std::size_t>(k)];
      }
    }
    out.log.traces.push_back(std::move(*trace));
  }
  return out;
}

}  // namespace fuzzyalign
