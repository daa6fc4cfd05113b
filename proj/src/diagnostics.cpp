#include "fuzzyalign/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "fuzzyalign/error.hpp"
#include "fuzzyalign/parallel.hpp"

namespace fuzzyalign {

std::vector<std::string> guarded_activities(const ProcessModel& model) {
  std::vector<std::string> out;
  for (const auto& a : model.activities())
    if (a.guard) out.push_back(a.name);
  std::sort(out.begin(), out.end());
  return out;
}

double quantile(std::vector<double> sample, double p) {
  if (sample.empty()) throw Error(ErrorKind::EmptySample, "quantile of an empty sample");
  std::sort(sample.begin(), sample.end());
  double h = (static_cast<double>(sample.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
  auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sample.size()) return sample.back();
  return sample[lo] + (h - static_cast<double>(lo)) * (sample[lo + 1] - sample[lo]);
}

QuantileSummary summarize(std::vector<double> sample) {
  if (sample.empty()) throw Error(ErrorKind::EmptySample, "summary of an empty sample");
  std::sort(sample.begin(), sample.end());
  QuantileSummary q;
  q.count = sample.size();
  q.min = sample.front();
  q.max = sample.back();
  q.q1 = quantile(sample, 0.25);
  q.median = quantile(sample, 0.5);
  q.q3 = quantile(sample, 0.75);
  return q;
}

bool above_diagonal(const TraceComparison& t) {
  return !t.failed && t.fitness_fuzzy > t.fitness_crisp + kTieTolerance;
}

MoveStats move_stats(std::span<const Trace> traces, std::span<const OptimaSet> optima_per_trace,
                     std::span<const std::string> guarded) {
  MoveStats stats;
  for (const auto& a : guarded) stats[a];
  for (std::size_t t = 0; t < optima_per_trace.size(); ++t) {
    const OptimaSet& optima = optima_per_trace[t];
    if (optima.truncated) continue;
    std::set<std::string> as_log, as_data;
    for (const auto& alignment : optima.alignments)
      for (const auto& mv : alignment.moves) {
        if (!mv.log_index) continue;
        const std::string& act = traces[t].events[*mv.log_index].activity;
        if (mv.kind == MoveKind::LogMove) as_log.insert(act);
        if (mv.kind == MoveKind::SyncIncorrect) as_data.insert(act);
      }
    for (const auto& a : guarded) {
      if (as_log.count(a)) ++stats[a].move_in_log;
      if (as_data.count(a)) ++stats[a].move_in_data;
    }
  }
  return stats;
}

namespace {

std::vector<SeveritySample> severity_samples(const ProcessModel& model, const std::vector<Alignment>& optima) {
  std::vector<SeveritySample> out;
  std::set<std::tuple<std::size_t, std::string>> seen;  // (log index, constraint)
  for (const auto& alignment : optima)
    for (std::size_t j = 0; j < alignment.moves.size(); ++j) {
      const auto& mv = alignment.moves[j];
      if (mv.kind != MoveKind::SyncIncorrect) continue;
      for (const auto& v : mv.violations) {
        if (v.predicate.empty()) continue;
        std::string constraint = model.activity(*mv.model_activity).name + ": " + v.predicate;
        if (!seen.emplace(*mv.log_index, constraint).second) continue;
        out.push_back({std::move(constraint), j, v.severity});
      }
    }
  return out;
}

}  // namespace

ComparisonReport compare(const ProcessModel& model, const EventLog& log, const CompareOptions& options) {
  ComparisonReport report;
  report.traces.resize(log.traces.size());

  AlignOptions align_opts;
  align_opts.epsilon = options.epsilon;
  align_opts.all_optima = true;
  align_opts.optima_cap = options.optima_cap;
  align_opts.node_budget = options.node_budget;
  const CostProfile crisp{CostMode::Crisp, options.weights};
  const CostProfile fuzzy{CostMode::Fuzzy, options.weights};

  parallel_for(log.traces.size(), options.jobs, [&](std::size_t i) {
    const Trace& trace = log.traces[i];
    TraceComparison& out = report.traces[i];
    out.case_id = trace.case_id;
    try {
      out.crisp = align(model, trace, crisp, align_opts);
      out.fuzzy = align(model, trace, fuzzy, align_opts);
    } catch (const Error& e) {
      out.failed = true;
      out.error = e.what();
      return;
    }
    out.cost_crisp = out.crisp.optimal_cost;
    out.cost_fuzzy = out.fuzzy.optimal_cost;
    out.fitness_crisp = out.crisp.fitness;
    out.fitness_fuzzy = out.fuzzy.fitness;
    out.truncated_crisp = out.crisp.truncated;
    out.truncated_fuzzy = out.fuzzy.truncated;
    out.severities = severity_samples(model, out.fuzzy.alignments);
  });

  std::vector<Trace> counted_traces;
  std::vector<OptimaSet> crisp_optima, fuzzy_optima;
  std::map<std::string, std::vector<double>> severities;
  std::size_t above = 0, ok = 0;
  for (std::size_t i = 0; i < report.traces.size(); ++i) {
    const auto& t = report.traces[i];
    if (t.failed) {
      ++report.failed_count;
      continue;
    }
    ++ok;
    if (above_diagonal(t)) ++above;
    for (const auto& s : t.severities) severities[s.constraint].push_back(s.severity);
    if (t.truncated_crisp || t.truncated_fuzzy) {
      ++report.movestats_excluded;
      continue;
    }
    counted_traces.push_back(log.traces[i]);
    crisp_optima.push_back({t.crisp.alignments, false});
    fuzzy_optima.push_back({t.fuzzy.alignments, false});
  }
  report.above_diagonal_fraction = ok == 0 ? 0.0 : static_cast<double>(above) / static_cast<double>(ok);
  for (auto& [constraint, sample] : severities) report.severity[constraint] = summarize(std::move(sample));
  auto guarded = guarded_activities(model);
  report.crisp_stats = move_stats(counted_traces, crisp_optima, guarded);
  report.fuzzy_stats = move_stats(counted_traces, fuzzy_optima, guarded);
  return report;
}

QuantileSummary severity_distribution(const ComparisonReport& report, const std::string& constraint) {
  std::vector<double> sample;
  for (const auto& t : report.traces)
    for (const auto& s : t.severities)
      if (s.constraint == constraint) sample.push_back(s.severity);
  if (sample.empty()) throw Error(ErrorKind::EmptySample, "constraint '" + constraint + "' was never violated");
  return summarize(std::move(sample));
}

double third_quartile_suggestion(const EventLog& log, const std::string& variable) {
  std::vector<double> values;
  for (const auto& t : log.traces)
    for (const auto& e : t.events) {
      auto it = e.writes.find(variable);
      if (it != e.writes.end() && is_number(it->second)) values.push_back(std::get<double>(it->second));
    }
  if (values.empty()) throw Error(ErrorKind::EmptySample, "no numeric observations of '" + variable + "'");
  return quantile(std::move(values), 0.75);
}

}  // namespace fuzzyalign
