// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fuzzyalign/aligner.hpp"
#include "fuzzyalign/cli.hpp"
#include "fuzzyalign/diagnostics.hpp"
#include "fuzzyalign/loggen.hpp"
#include "fuzzyalign/membership.hpp"
#include "oracle/brute_force.hpp"
#include "support/fixtures.hpp"

using namespace fuzzyalign;
using testsupport::data_path;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<Outcome()>& body) {
  auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream line;
  line << (o.ok ? "PASS" : "FAIL") << " [" << id << "] " << title;
  line.precision(3);
  line << " (" << std::fixed << secs << " s)";
  if (!o.detail.empty()) line << ": " << o.detail;
  std::cout << line.str() << std::endl;
  if (!o.ok) ++failures;
}

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("fuzzyalign_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string jobs() { return std::to_string(std::max(1u, std::thread::hardware_concurrency())); }

// Severity of the loan guards written out from their case splits.
double amount_severity(double a) {
  if (a <= 3050) return 1.0;
  if (a < 10000) return (10000 - a) / 6950;
  return 0.0;
}
double duration_severity(double d) {
  if (d >= 70) return 1.0;
  if (d > 30) return (d - 30) / 40;
  return 0.0;
}

// Severity of the data value in effect when `activity` runs; nullopt if the
// activity is absent or its guard holds.
std::optional<double> scan_severity(const Trace& t, const std::string& activity, const std::string& var,
                                    double (*sev)(double)) {
  std::optional<double> value;
  for (const auto& e : t.events) {
    if (e.activity == activity) {
      if (!value) return std::nullopt;
      double s = sev(*value);
      return s > 0 ? std::optional<double>(s) : std::nullopt;
    }
    auto it = e.writes.find(var);
    if (it != e.writes.end()) value = std::get<double>(it->second);
  }
  return std::nullopt;
}

struct Shared {
  ProcessModel model = testsupport::loan_model();
  GeneratedLog generated;
  ComparisonReport report;
  bool ready = false;
};

Shared& shared() {
  static Shared s;
  if (!s.ready) {
    GenConfig cfg = parse_gen_config(slurp(data_path("gen_default.json")));
    s.generated = generate(s.model, cfg);
    CompareOptions opts;
    opts.jobs = std::max(1u, std::thread::hardware_concurrency());
    s.report = compare(s.model, s.generated.log, opts);
    s.ready = true;
  }
  return s;
}

std::string move_signature(const json& moves) {
  std::string s;
  for (const auto& m : moves) s += m["kind"].get<std::string>() + ":" + m["log"].get<std::string>() + "/" +
                                   m["model"].get<std::string>() + " ";
  return s;
}

}  // namespace

int main() {
  criterion(1, "ramp MF (ideal 30, tolerance 40) at 35 is exactly 0.5", [] {
    Outcome o;
    double s = eval_mf(DeviationMF::ramp(30, 40), 35);
    o.require(s == 0.5, "got " + std::to_string(s));
    return o;
  });

  criterion(2, "two-activity fixture: crisp has 2 optima, fuzzy has 1 with cost 0.5", [] {
    Outcome o;
    auto crisp = cli({"check", "--model", data_path("fig2_model.json"), "--log", data_path("fixtures/table1.csv"),
                      "--cost", "crisp", "--all-optima"});
    o.require(crisp.code == kExitOk, "crisp check exit " + std::to_string(crisp.code));
    if (!o.ok) return o;
    auto cj = json::parse(crisp.out)["traces"][0];
    o.require(cj["optima_count"] == 2, "crisp optima_count " + cj["optima_count"].dump());
    std::vector<std::string> sigs;
    for (const auto& a : cj["optima"]) sigs.push_back(move_signature(a));
    std::sort(sigs.begin(), sigs.end());
    std::vector<std::string> want = {"sync-correct:a/a log-move:b/>> sync-correct:c/c ",
                                     "sync-correct:a/a sync-incorrect:b/b sync-correct:c/c "};
    o.require(sigs == want, "crisp optima differ from the log-move and data-move interpretations");
    o.require(std::abs(cj["cost_crisp"].get<double>() - 1.0) <= 1e-9, "crisp cost " + cj["cost_crisp"].dump());

    auto fuzzy = cli({"check", "--model", data_path("fig2_model.json"), "--log", data_path("fixtures/table1.csv"),
                      "--cost", "fuzzy", "--all-optima"});
    o.require(fuzzy.code == kExitOk, "fuzzy check exit " + std::to_string(fuzzy.code));
    if (!o.ok) return o;
    auto fj = json::parse(fuzzy.out)["traces"][0];
    o.require(fj["optima_count"] == 1, "fuzzy optima_count " + fj["optima_count"].dump());
    o.require(move_signature(fj["moves"]) == want[1], "fuzzy optimum is not the data-move interpretation");
    o.require(std::abs(fj["cost_fuzzy"].get<double>() - 0.5) <= 1e-9, "fuzzy cost " + fj["cost_fuzzy"].dump());
    return o;
  });

  criterion(3, "loan MF evaluations", [] {
    Outcome o;
    auto mf1 = DeviationMF::ramp(10000, 3050);
    auto mf2 = DeviationMF::ramp(30, 70);
    struct Case {
      const DeviationMF* mf;
      double (*split)(double);
      double v, expect;
    };
    std::vector<Case> cases = {{&mf1, amount_severity, 9950, 0.00719424}, {&mf1, amount_severity, 8160, 0.26474820},
                               {&mf1, amount_severity, 2000, 1.0},        {&mf2, duration_severity, 50, 0.5},
                               {&mf2, duration_severity, 60, 0.75},       {&mf2, duration_severity, 97, 1.0}};
    for (const auto& c : cases) {
      double got = eval_mf(*c.mf, c.v);
      o.require(std::abs(got - c.expect) <= 1e-8, "value " + std::to_string(c.v) + " gave " + std::to_string(got));
      o.require(std::abs(got - c.split(c.v)) <= 1e-12, "case split disagrees at " + std::to_string(c.v));
    }
    return o;
  });

  criterion(4, "loan trace example: Amount deviation always a data move; fuzzy fitness higher", [] {
    Outcome o;
    auto m = testsupport::loan_model();
    auto t = testsupport::first_trace("fixtures/trace_example.csv", m);
    o.require(t.events.size() == 19 && t.events[2].activity == "W_F_C", "unexpected fixture");
    AlignOptions opts;
    opts.all_optima = true;
    auto fuzzy = align(m, t, CostProfile{CostMode::Fuzzy, {}}, opts);
    auto crisp = align(m, t, CostProfile{CostMode::Crisp, {}}, opts);
    o.require(!fuzzy.truncated && !fuzzy.alignments.empty(), "no complete fuzzy optima");
    for (const auto& a : fuzzy.alignments) {
      bool data_move = false;
      for (const auto& mv : a.moves)
        if (mv.log_index == 2u) data_move = mv.kind == MoveKind::SyncIncorrect;
      o.require(data_move, "a fuzzy optimum treats the Amount deviation as a log move");
    }
    o.require(fuzzy.fitness > crisp.fitness,
              "fuzzy fitness " + std::to_string(fuzzy.fitness) + " <= crisp " + std::to_string(crisp.fitness));
    return o;
  });

  criterion(5, "dominance on the seeded 500-trace log", [] {
    Outcome o;
    auto start = std::chrono::steady_clock::now();
    auto& s = shared();
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(s.report.failed_count == 0, std::to_string(s.report.failed_count) + " traces failed");
    std::size_t strict = 0;
    for (std::size_t i = 0; i < s.report.traces.size(); ++i) {
      const auto& t = s.report.traces[i];
      o.require(t.fitness_fuzzy >= t.fitness_crisp - 1e-9, "trace " + t.case_id + " below the diagonal");
      const auto& kinds = s.generated.injected[i];
      bool data_only = !kinds.empty() && std::all_of(kinds.begin(), kinds.end(), [](DeviationKind k) {
        return k == DeviationKind::AmountBelowGuard || k == DeviationKind::DurationAboveGuard;
      });
      if (!data_only) continue;
      const Trace& tr = s.generated.log.traces[i];
      auto sa = scan_severity(tr, "W_F_C", "Amount", amount_severity);
      auto sd = scan_severity(tr, "W_FURTHER_A", "Duration", duration_severity);
      if ((sa && *sa >= 1.0) || (sd && *sd >= 1.0)) continue;
      ++strict;
      o.require(above_diagonal(t), "trace " + t.case_id + " has only tolerable data deviations but is on the diagonal");
    }
    o.require(strict > 0, "no trace with only tolerable data deviations");
    o.require(secs < 60, "took " + std::to_string(secs) + " s");
    if (o.ok) o.detail = std::to_string(strict) + " strictly-above traces checked";
    return o;
  });

  criterion(6, "move statistics pattern on the seeded log", [] {
    Outcome o;
    auto& s = shared();
    o.require(s.report.movestats_excluded == 0, std::to_string(s.report.movestats_excluded) + " traces excluded");
    std::map<std::string, std::size_t> severity_one;
    for (const auto& t : s.generated.log.traces) {
      auto sa = scan_severity(t, "W_F_C", "Amount", amount_severity);
      auto sd = scan_severity(t, "W_FURTHER_A", "Duration", duration_severity);
      if (sa && *sa >= 1.0) ++severity_one["W_F_C"];
      if (sd && *sd >= 1.0) ++severity_one["W_FURTHER_A"];
    }
    std::ostringstream summary;
    for (const char* act : {"W_F_C", "W_FURTHER_A"}) {
      auto c = s.report.crisp_stats.count(act) ? s.report.crisp_stats.at(act) : MoveCounts{};
      auto f = s.report.fuzzy_stats.count(act) ? s.report.fuzzy_stats.at(act) : MoveCounts{};
      o.require(c.move_in_log == c.move_in_data, std::string(act) + ": crisp counters differ");
      o.require(f.move_in_log <= f.move_in_data, std::string(act) + ": fuzzy move-in-log exceeds move-in-data");
      o.require(f.move_in_log == severity_one[act],
                std::string(act) + ": fuzzy move-in-log " + std::to_string(f.move_in_log) + " vs " +
                    std::to_string(severity_one[act]) + " severity-1 deviations");
      o.require(c.move_in_log > 0, std::string(act) + ": no deviations counted");
      summary << act << " crisp " << c.move_in_log << "/" << c.move_in_data << " fuzzy " << f.move_in_log << "/"
              << f.move_in_data << "; ";
    }
    if (o.ok) o.detail = summary.str();
    return o;
  });

  criterion(7, "A* matches brute force on 200 random instances", [] {
    Outcome o;
    auto start = std::chrono::steady_clock::now();
    testsupport::InstanceGenerator gen(20240601);
    const double eps = 1e-6;
    for (int i = 0; i < 200 && o.ok; ++i) {
      auto rm = gen.model();
      auto rt = gen.trace(rm);
      auto m = parse_model(rm.to_json());
      auto t = testsupport::to_trace(rt);
      for (bool fuzzy : {false, true}) {
        auto expect = oracle::brute_force(rm, rt, fuzzy, eps);
        AlignOptions opts;
        opts.epsilon = eps;
        auto r = align(m, t, CostProfile{fuzzy ? CostMode::Fuzzy : CostMode::Crisp, {}}, opts);
        o.require(std::abs(r.search_cost - expect.best_g) <= 1e-9,
                  "instance " + std::to_string(i) + (fuzzy ? " fuzzy" : " crisp") + ": " +
                      std::to_string(r.search_cost) + " vs " + std::to_string(expect.best_g));
      }
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs < 120, "took " + std::to_string(secs) + " s");
    return o;
  });

  criterion(8, "crisp-shaped MFs make fuzzy reports identical to crisp ones", [] {
    Outcome o;
    auto& s = shared();
    auto dir = scratch("crisp_recovery");
    save_log(s.generated.log, (dir / "log.xes").string());
    json model = json::parse(slurp(data_path("loan_model.json")));
    for (auto& a : model["activities"])
      if (a.contains("mfs"))
        for (auto& mf : a["mfs"]) mf = {{"predicate", mf["predicate"]}, {"type", "crisp"}};
    std::ofstream(dir / "crisp_model.json") << model.dump(2);

    auto crisp = cli({"check", "--model", data_path("loan_model.json"), "--log", (dir / "log.xes").string(), "--cost",
                      "crisp", "--all-optima", "--jobs", jobs()});
    auto fuzzy = cli({"check", "--model", (dir / "crisp_model.json").string(), "--log", (dir / "log.xes").string(),
                      "--cost", "fuzzy", "--all-optima", "--jobs", jobs()});
    o.require(crisp.code == kExitOk && fuzzy.code == kExitOk, "check failed");
    if (!o.ok) return o;
    auto normalize = [](std::string text) {
      for (auto p = text.find("\"cost_fuzzy\""); p != std::string::npos; p = text.find("\"cost_fuzzy\"", p))
        text.replace(p, 12, "\"cost_crisp\"");
      auto p = text.find("\"mode\": \"fuzzy\"");
      if (p != std::string::npos) text.replace(p, 15, "\"mode\": \"crisp\"");
      return text;
    };
    o.require(normalize(fuzzy.out) == crisp.out, "check reports differ");

    auto c1 = cli({"compare", "--model", data_path("loan_model.json"), "--log", (dir / "log.xes").string(), "--out",
                   (dir / "orig").string(), "--jobs", jobs()});
    auto c2 = cli({"compare", "--model", (dir / "crisp_model.json").string(), "--log", (dir / "log.xes").string(),
                   "--out", (dir / "crisp").string(), "--jobs", jobs()});
    o.require(c1.code == kExitOk && c2.code == kExitOk, "compare failed");
    auto orig = json::parse(slurp(dir / "orig" / "report.json"))["traces"];
    auto flat = json::parse(slurp(dir / "crisp" / "report.json"))["traces"];
    std::string crisp_cols, fuzzy_cols;
    for (const auto& t : orig) crisp_cols += t["cost_crisp"].dump() + "," + t["fitness_crisp"].dump() + "\n";
    for (const auto& t : flat) fuzzy_cols += t["cost_fuzzy"].dump() + "," + t["fitness_fuzzy"].dump() + "\n";
    o.require(crisp_cols == fuzzy_cols, "compare: fuzzy columns under crisp MFs differ from crisp columns");
    auto stats = json::parse(slurp(dir / "crisp" / "movestats.json"));
    o.require(stats["crisp"] == stats["fuzzy"], "compare: move statistics differ between profiles");
    return o;
  });

  criterion(9, "generate --seed 1 then compare is byte-identical across runs", [] {
    Outcome o;
    std::vector<fs::path> dirs = {scratch("det_a"), scratch("det_b")};
    for (const auto& d : dirs) {
      auto g = cli({"generate", "--model", data_path("loan_model.json"), "--config", data_path("gen_default.json"),
                    "--seed", "1", "--out", (d / "log.xes").string()});
      o.require(g.code == kExitOk, "generate failed: " + g.err);
      auto c = cli({"compare", "--model", data_path("loan_model.json"), "--log", (d / "log.xes").string(), "--out",
                    (d / "out").string(), "--jobs", jobs()});
      o.require(c.code == kExitOk, "compare failed: " + c.err);
    }
    if (!o.ok) return o;
    for (const char* f : {"log.xes", "out/report.json", "out/scatter.csv", "out/severity.csv", "out/movestats.json"}) {
      auto a = slurp(dirs[0] / f), b = slurp(dirs[1] / f);
      o.require(!a.empty() && a == b, std::string(f) + " differs");
    }
    return o;
  });

  return failures == 0 ? 0 : 1;
}
