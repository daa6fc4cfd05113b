#include "fuzzyalign/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "fuzzyalign/aligner.hpp"
#include "fuzzyalign/diagnostics.hpp"
#include "fuzzyalign/error.hpp"
#include "fuzzyalign/loggen.hpp"
#include "fuzzyalign/parallel.hpp"
#include "fuzzyalign/report.hpp"

namespace fuzzyalign {

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

std::size_t default_jobs() {
  if (const char* env = std::getenv("FUZZYALIGN_JOBS")) {
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct CheckArgs {
  std::string model, log, cost, costs, out;
  double epsilon = 1e-6;
  bool all_optima = false;
  std::size_t cap = 100;
  std::size_t max_nodes = 1'000'000;
  std::size_t jobs = 0;
};

struct GenerateArgs {
  std::string model, config, out;
  std::optional<std::size_t> traces;
  std::optional<std::uint64_t> seed;
};

int cmd_check(const CheckArgs& a, std::ostream& out, std::ostream& err) {
  ProcessModel model = load_model(a.model);
  EventLog log = load_log(a.log, &model);
  CostProfile profile;
  profile.mode = a.cost.empty() ? (model.has_mfs() ? CostMode::Fuzzy : CostMode::Crisp)
                                : (a.cost == "crisp" ? CostMode::Crisp : CostMode::Fuzzy);
  if (!a.costs.empty()) profile.weights = parse_cost_weights(read_file(a.costs));
  AlignOptions opts;
  opts.epsilon = a.epsilon;
  opts.all_optima = a.all_optima;
  opts.optima_cap = a.cap;
  opts.node_budget = a.max_nodes;

  const std::size_t n = log.traces.size();
  std::vector<nlohmann::json> results(n);
  std::vector<std::string> errors(n);
  parallel_for(n, a.jobs ? a.jobs : default_jobs(), [&](std::size_t i) {
    const Trace& t = log.traces[i];
    try {
      results[i] = trace_result_to_json(model, t, align(model, t, profile, opts), profile.mode, a.all_optima);
    } catch (const Error& e) {
      errors[i] = e.what();
      results[i] = {{"case_id", t.case_id}, {"failed", true}, {"error", e.what()}};
    }
  });

  nlohmann::json report = {{"mode", to_string(profile.mode)},
                           {"epsilon", round_sig9(a.epsilon)},
                           {"traces", std::move(results)}};
  std::string text = report.dump(2) + "\n";
  if (a.out.empty()) out << text;
  else write_file(a.out, text);

  bool failed = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i].empty()) continue;
    err << "trace " << log.traces[i].case_id << ": " << errors[i] << "\n";
    failed = true;
  }
  return failed ? kExitSearchError : kExitOk;
}

int cmd_compare(const CheckArgs& a, std::ostream& out, std::ostream& err) {
  ProcessModel model = load_model(a.model);
  EventLog log = load_log(a.log, &model);
  CompareOptions opts;
  opts.epsilon = a.epsilon;
  opts.optima_cap = a.cap;
  opts.node_budget = a.max_nodes;
  opts.jobs = a.jobs ? a.jobs : default_jobs();
  if (!a.costs.empty()) opts.weights = parse_cost_weights(read_file(a.costs));
  ComparisonReport report = compare(model, log, opts);

  std::string json_text = comparison_to_json(report).dump(2) + "\n";
  if (a.out.empty()) {
    out << json_text;
  } else {
    fs::path dir(a.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create '" + a.out + "': " + ec.message());
    write_file(dir / "report.json", json_text);
    write_file(dir / "scatter.csv", scatter_csv(report));
    write_file(dir / "severity.csv", severity_csv(report));
    write_file(dir / "movestats.json", movestats_to_json(report).dump(2) + "\n");
  }
  for (const auto& t : report.traces)
    if (t.failed) err << "trace " << t.case_id << ": " << t.error << "\n";
  return report.failed_count ? kExitSearchError : kExitOk;
}

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  ProcessModel model = load_model(a.model);
  GenConfig config = parse_gen_config(read_file(a.config));
  if (a.traces) config.trace_count = *a.traces;
  if (a.seed) config.seed = *a.seed;
  config.validate();
  GeneratedLog g = generate(model, config);
  save_log(g.log, a.out);
  out << "traces: " << g.log.traces.size() << "\n";
  for (DeviationKind k : kDeviationKinds) out << to_string(k) << ": " << g.count(k) << "\n";
  return kExitOk;
}

int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
  ProcessModel model = load_model(path);
  out << model.state_count() << " states, " << model.activities().size() << " activities, "
      << model.guarded_activity_count() << " guarded activities, " << model.mf_count() << " MFs\n";
  auto fallback = model.crisp_fallback_predicates();
  if (!fallback.empty()) {
    err << "warning: predicates without MF are priced crisp in fuzzy mode:\n";
    for (const auto& p : fallback) err << "  " << p << "\n";
  }
  return kExitOk;
}

void add_align_flags(CLI::App* cmd, CheckArgs& a) {
  cmd->add_option("--model", a.model, "process model JSON")->required();
  cmd->add_option("--log", a.log, "event log (.xes or .csv)")->required();
  cmd->add_option("--epsilon", a.epsilon, "per-move tie-break cost")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--cap", a.cap, "maximum optima enumerated per trace")->check(CLI::PositiveNumber);
  cmd->add_option("--max-nodes", a.max_nodes, "node budget per trace")->check(CLI::PositiveNumber);
  cmd->add_option("--costs", a.costs, "JSON file overriding control-flow weights");
  cmd->add_option("--jobs", a.jobs, "worker threads (default: FUZZYALIGN_JOBS or all cores)");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Crisp and fuzzy data-aware alignments", "fuzzyalign"};
  app.require_subcommand(1);

  CheckArgs check;
  auto* check_cmd = app.add_subcommand("check", "align every trace and report per-trace results");
  add_align_flags(check_cmd, check);
  check_cmd->add_option("--cost", check.cost, "crisp or fuzzy (default: fuzzy if the model has MFs)")
      ->check(CLI::IsMember({"crisp", "fuzzy"}));
  check_cmd->add_flag("--all-optima", check.all_optima, "list every optimal alignment");
  check_cmd->add_option("--out", check.out, "report file (default: stdout)");

  CheckArgs cmp;
  auto* compare_cmd = app.add_subcommand("compare", "crisp vs fuzzy comparison with diagnostics");
  add_align_flags(compare_cmd, cmp);
  compare_cmd->add_option("--out", cmp.out, "output directory (default: report on stdout)");

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "generate a synthetic log with injected deviations");
  gen_cmd->add_option("--model", gen.model, "process model JSON")->required();
  gen_cmd->add_option("--config", gen.config, "generator config JSON")->required();
  gen_cmd->add_option("--traces", gen.traces, "number of traces");
  gen_cmd->add_option("--seed", gen.seed, "RNG seed");
  gen_cmd->add_option("--out", gen.out, "output log (.xes or .csv)")->required();

  std::string validate_model;
  auto* validate_cmd = app.add_subcommand("validate", "check a model and summarize it");
  validate_cmd->add_option("--model", validate_model, "process model JSON")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*check_cmd) return cmd_check(check, out, err);
    if (*compare_cmd) return cmd_compare(cmp, out, err);
    if (*gen_cmd) return cmd_generate(gen, out);
    if (*validate_cmd) return cmd_validate(validate_model, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::BudgetExceeded ? kExitSearchError : kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace fuzzyalign
