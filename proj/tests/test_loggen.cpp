#include <doctest.h>

#include <cmath>

#include "fuzzyalign/aligner.hpp"
#include "fuzzyalign/error.hpp"
#include "fuzzyalign/loggen.hpp"
#include "support/fixtures.hpp"

using namespace fuzzyalign;

namespace {

// 99% normal-approximation interval for a Binomial(n, p) count.
bool within_binomial(std::size_t count, std::size_t n, double p) {
  double mean = static_cast<double>(n) * p;
  double sd = std::sqrt(static_cast<double>(n) * p * (1 - p));
  return std::abs(static_cast<double>(count) - mean) <= 2.576 * sd + 0.5;
}

// Value of `var` last written before event `idx`.
std::optional<double> value_before(const Trace& t, std::size_t idx, const std::string& var) {
  std::optional<double> v;
  for (std::size_t i = 0; i < idx; ++i) {
    auto it = t.events[i].writes.find(var);
    if (it != t.events[i].writes.end()) v = std::get<double>(it->second);
  }
  return v;
}

std::optional<std::size_t> index_of(const Trace& t, const std::string& act) {
  for (std::size_t i = 0; i < t.events.size(); ++i)
    if (t.events[i].activity == act) return i;
  return std::nullopt;
}

bool has(const std::vector<DeviationKind>& v, DeviationKind k) { return std::find(v.begin(), v.end(), k) != v.end(); }

}  // namespace

TEST_CASE("generation is deterministic and per-trace stable") {
  auto m = testsupport::loan_model();
  GenConfig cfg;
  cfg.seed = 42;
  cfg.trace_count = 60;
  auto a = generate(m, cfg);
  auto b = generate(m, cfg);
  CHECK(write_xes(a.log) == write_xes(b.log));
  cfg.trace_count = 80;
  auto c = generate(m, cfg);
  for (std::size_t i = 0; i < 60; ++i) CHECK(a.log.traces[i].events == c.log.traces[i].events);
  cfg.seed = 43;
  CHECK(generate(m, cfg).log.traces[0].events != c.log.traces[0].events);
}

TEST_CASE("zero rates give compliant traces") {
  auto m = testsupport::loan_model();
  GenConfig cfg;
  cfg.trace_count = 100;
  cfg.rates = {0, 0, 0, 0};
  auto g = generate(m, cfg);
  for (auto k : kDeviationKinds) CHECK(g.count(k) == 0);
  for (const auto& t : g.log.traces) {
    auto s = initial_model_states(m).at(0);
    for (const auto& e : t.events) REQUIRE_NOTHROW(s = fire(m, s, e.activity, e.writes));
    CHECK(m.is_final(s.position));
    for (auto mode : {CostMode::Crisp, CostMode::Fuzzy}) {
      auto r = align(m, t, CostProfile{mode, {}});
      CHECK(r.optimal_cost == 0.0);
      CHECK(r.fitness == doctest::Approx(1.0).epsilon(1e-4));
    }
  }
}

TEST_CASE("injections are sound") {
  auto m = testsupport::loan_model();
  GenConfig cfg;
  cfg.seed = 3;
  auto g = generate(m, cfg);
  auto amount_guard = *m.activity(*m.find_activity("W_F_C")).guard;
  auto duration_guard = *m.activity(*m.find_activity("W_FURTHER_A")).guard;
  for (std::size_t i = 0; i < g.log.traces.size(); ++i) {
    const auto& t = g.log.traces[i];
    if (has(g.injected[i], DeviationKind::AmountBelowGuard)) {
      auto at = index_of(t, "W_F_C");
      REQUIRE(at);
      auto v = value_before(t, *at, "Amount");
      REQUIRE(v);
      CHECK_FALSE(eval_guard(amount_guard, {{"Amount", *v}}));
      CHECK(*v >= 2000);
    }
    if (has(g.injected[i], DeviationKind::DurationAboveGuard)) {
      auto at = index_of(t, "W_FURTHER_A");
      REQUIRE(at);
      auto v = value_before(t, *at, "Duration");
      REQUIRE(v);
      CHECK_FALSE(eval_guard(duration_guard, {{"Duration", *v}}));
      CHECK(*v <= 90.0);
    }
  }
}

TEST_CASE("default injection counts follow the configured rates") {
  auto m = testsupport::loan_model();
  GenConfig cfg;
  auto g = generate(m, cfg);
  CHECK(within_binomial(g.count(DeviationKind::AmountBelowGuard), 500, 0.3));
  CHECK(within_binomial(g.count(DeviationKind::DurationAboveGuard), 500, 0.3));
  CHECK(within_binomial(g.count(DeviationKind::SkipActivity), 500, 0.1));
  CHECK(within_binomial(g.count(DeviationKind::InsertActivity), 500, 0.1));
}

TEST_CASE("uniform amounts: deviating W_F_C executions and their interpretation") {
  auto m = testsupport::loan_model();
  GenConfig cfg;
  cfg.seed = 9;
  cfg.amount = AmountDistribution{AmountDistribution::Kind::Uniform, 2000, 12000, 0, 0, {}};
  cfg.rates = {0, 0, 0.3, 0};
  auto g = generate(m, cfg);
  std::size_t low = 0, unique = 0, tolerable = 0;
  for (const auto& t : g.log.traces) {
    auto at = index_of(t, "W_F_C");
    if (!at) continue;
    double v = *value_before(t, *at, "Amount");
    if (v >= 10000) continue;
    ++low;
    if (v <= 3050) continue;
    ++tolerable;
    AlignOptions o;
    o.all_optima = true;
    auto r = align(m, t, CostProfile{CostMode::Fuzzy, {}}, o);
    if (r.alignments.size() == 1) ++unique;
  }
  CHECK(within_binomial(low, 500, 0.3));
  CHECK(tolerable > 0);
  CHECK(unique == tolerable);
}

TEST_CASE("inject_deviation") {
  auto m = testsupport::loan_model();
  GenConfig cfg;
  auto ctx = InjectionContext::from(m, cfg);
  CHECK(ctx.amount_guard == 10000);
  CHECK(ctx.duration_guard == 30);
  auto rng = trace_stream(1, 0);

  auto t = testsupport::first_trace("fixtures/sigma1.csv", m);
  t.events[0].writes["Amount"] = 11000.0;
  REQUIRE(inject_deviation(t, DeviationKind::AmountBelowGuard, rng, ctx));
  double a = std::get<double>(t.events[0].writes.at("Amount"));
  CHECK(a >= 2000);
  CHECK(a < 10000);

  auto e = testsupport::first_trace("fixtures/trace_example.csv", m);
  REQUIRE(inject_deviation(e, DeviationKind::DurationAboveGuard, rng, ctx));
  CHECK(std::get<double>(e.events[16].writes.at("Duration")) > 30);
  CHECK(e.events[17].activity == "W_FURTHER_A");

  Trace one{"x", {Event{"A_S", {{"Amount", 5.0}}}}};
  CHECK_FALSE(inject_deviation(one, DeviationKind::SkipActivity, rng, ctx));
  CHECK(one.events.size() == 1);
  CHECK_FALSE(inject_deviation(one, DeviationKind::AmountBelowGuard, rng, ctx));

  auto s = testsupport::first_trace("fixtures/sigma1.csv", m);
  REQUIRE(inject_deviation(s, DeviationKind::SkipActivity, rng, ctx));
  CHECK(s.events.size() == 10);
  REQUIRE(inject_deviation(s, DeviationKind::InsertActivity, rng, ctx));
  CHECK(s.events.size() == 11);
}

TEST_CASE("RNG helpers") {
  auto rng = trace_stream(1, 0);
  double sum = 0, sq = 0;
  for (int i = 0; i < 20000; ++i) {
    double u = uniform01(rng);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    double z = standard_normal(rng);
    sum += z;
    sq += z * z;
  }
  CHECK(sum / 20000 == doctest::Approx(0.0).epsilon(0.05).scale(1));
  CHECK(sq / 20000 == doctest::Approx(1.0).epsilon(0.05));
  auto r1 = trace_stream(7, 3), r2 = trace_stream(7, 3);
  CHECK(r1() == r2());
}

TEST_CASE("config parsing") {
  auto c = parse_gen_config(R"({"trace_count": 10, "seed": 5, "amount": {"type": "uniform", "lo": 1, "hi": 2},
                                "rates": {"skip_activity": 0}})");
  CHECK(c.trace_count == 10);
  CHECK(c.seed == 5);
  CHECK(c.amount.kind == AmountDistribution::Kind::Uniform);
  CHECK(c.rates.skip_activity == 0);
  CHECK(c.rates.insert_activity == 0.1);
  CHECK_THROWS_AS(parse_gen_config(R"({"rates": {"skip_activity": 2}})"), Error);
  CHECK_THROWS_AS(parse_gen_config(R"({"rates": {"typo": 0.1}})"), Error);
  CHECK_THROWS_AS(parse_gen_config(R"({"amount": {"type": "pareto"}})"), Error);
  CHECK_THROWS_AS(parse_gen_config("{"), Error);
  auto e = parse_gen_config(R"({"amount": {"type": "empirical", "values": [100, 20000]}})");
  CHECK(e.amount.samples.size() == 2);
}
