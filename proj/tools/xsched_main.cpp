// Command line front end: workload generation, planning policies, the
// discrete-event simulator, and suite-level policy comparisons.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "xsched/graph.hpp"
#include "xsched/heuristics.hpp"
#include "xsched/ilp.hpp"
#include "xsched/json_io.hpp"
#include "xsched/platform.hpp"
#include "xsched/simulator.hpp"
#include "xsched/timetable.hpp"
#include "xsched/workload.hpp"

namespace {

using nlohmann::json;
using namespace xsched;

// Bad flags and flag values exit 1; operational failures (infeasible models,
// trace violations, unreadable files) exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

PlatformConfig resolve_platform(const std::string& arg) {
  if (auto preset = platform_preset(arg)) return *preset;
  if (std::filesystem::exists(arg)) return load_platform(arg);
  throw UsageError("unknown platform '" + arg +
                   "' (expected \"small\", \"large\", or a JSON file)");
}

// "300" or "300s" are seconds, "5m" minutes.
double parse_duration_sec(const std::string& text) {
  if (text.empty()) return 0.0;
  std::string number = text;
  double scale = 1.0;
  if (number.back() == 's') {
    number.pop_back();
  } else if (number.back() == 'm') {
    number.pop_back();
    scale = 60.0;
  }
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(number, &used);
  } catch (const std::exception&) {
    throw UsageError("bad duration '" + text + "'");
  }
  if (used != number.size() || value < 0.0) {
    throw UsageError("bad duration '" + text + "'");
  }
  return value * scale;
}

SchedMode parse_mode(const std::string& text) {
  if (text == "fp") return SchedMode::kFpPreemptive;
  if (text == "fp-nonpreempt") return SchedMode::kFpNonPreemptive;
  if (text == "rr") return SchedMode::kRoundRobin;
  throw UsageError("unknown mode '" + text +
                   "' (expected fp, fp-nonpreempt, or rr)");
}

SimConfig make_sim_config(const PlatformConfig& platform, const std::string& mode,
                          const std::vector<std::string>& mode_for,
                          const std::string& overheads) {
  SimConfig config = SimConfig::uniform(platform, parse_mode(mode));
  for (const std::string& spec : mode_for) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
      throw UsageError("bad --mode-for '" + spec + "' (expected TYPE=mode)");
    }
    const std::string type = spec.substr(0, eq);
    if (!platform.has_type(type)) {
      throw UsageError("--mode-for names unknown class '" + type + "'");
    }
    config.modes[type] = parse_mode(spec.substr(eq + 1));
  }
  if (overheads == "on") {
    config.apply_overheads = true;
  } else if (overheads == "off") {
    config.apply_overheads = false;
  } else {
    throw UsageError("bad --overheads '" + overheads + "' (expected on|off)");
  }
  return config;
}

void write_or_print(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

// ---- generate ----

struct GenerateArgs {
  std::string out;
  std::string sizes = "10:25:50";
  int per_group = 50;
  std::uint64_t seed = 42;
  bool force = false;
};

int run_generate(const GenerateArgs& args) {
  SuiteSpec spec;
  spec.per_group = args.per_group;
  spec.base_seed = args.seed;
  std::stringstream sizes(args.sizes);
  std::string token;
  while (std::getline(sizes, token, ':')) {
    if (token.empty()) continue;
    try {
      spec.group_sizes.push_back(std::stoi(token));
    } catch (const std::exception&) {
      throw UsageError("bad --sizes value '" + token + "'");
    }
  }
  if (spec.group_sizes.empty()) {
    throw UsageError("--sizes yielded no group sizes");
  }

  FlagMap flags{{"sizes", args.sizes},
                {"per_group", std::to_string(args.per_group)},
                {"seed", std::to_string(args.seed)}};
  const WorkloadSuite suite = generate_suite(spec);
  write_suite(suite, args.out, flags, args.force);

  json summary{{"suite_dir", args.out},
               {"groups", spec.group_sizes.size()},
               {"dags", suite.entries.size()}};
  std::cout << summary.dump() << '\n';
  return 0;
}

// ---- plan ----

struct PlanArgs {
  std::string graph;
  std::string graph_positional;
  std::string platform = "small";
  std::string policy = "ilp";
  std::string deployment_out;
  std::string timetable_out;
  std::string lp_out;
  std::string backend = "internal";
  std::string time_limit = "0";
  double gap = 0.0;
  int threads = 1;
  std::int64_t deadline_us = 0;
  int brute_max_nodes = 10;
  bool export_only = false;
  bool print_stats = false;
};

struct PlanOutcome {
  DeploymentConfig deployment;
  std::optional<ScheduleTimetable> timetable;
  json info;
};

PlanOutcome run_policy(const std::string& policy, const ApplicationGraph& graph,
                       const PlatformConfig& platform, const PlanArgs& args) {
  PlanOutcome outcome;
  outcome.info["policy"] = policy;
  if (policy == "fastest") {
    outcome.deployment = fastest_xpu(graph, platform);
    return outcome;
  }
  if (policy == "heft") {
    HeuristicResult result = heft(graph, platform);
    outcome.deployment = std::move(result.deployment);
    outcome.info["planned_makespan_us"] = result.predicted_makespan;
    return outcome;
  }
  if (policy == "brute") {
    BruteForceOptions options;
    options.max_nodes = args.brute_max_nodes;
    BruteForceResult result = brute_force(graph, platform, options);
    outcome.deployment = std::move(result.deployment);
    outcome.info["planned_makespan_us"] = result.makespan;
    outcome.info["evaluated"] = result.evaluated;
    return outcome;
  }
  if (policy == "ilp") {
    IlpBuildOptions build;
    if (args.deadline_us > 0) build.deadline = args.deadline_us;
    const IlpModel model = build_model(graph, platform, build);
    if (args.print_stats) {
      const auto stats = model.stats();
      json j{{"p_vars", stats.p_vars},   {"d_vars", stats.d_vars},
             {"b1_vars", stats.b1_vars}, {"b2_vars", stats.b2_vars},
             {"c_vars", stats.c_vars},   {"constraints", stats.constraints},
             {"horizon_us", model.horizon}};
      std::cerr << j.dump() << '\n';
    }
    if (!args.lp_out.empty()) write_text_file(args.lp_out, export_lp(model));
    if (args.export_only) return outcome;

    SolveOptions solve_options;
    solve_options.time_limit_sec = parse_duration_sec(args.time_limit);
    solve_options.gap_limit = args.gap;
    solve_options.threads = args.threads;
    solve_options.backend = args.backend;
    SolveResult result = solve(model, solve_options);
    outcome.deployment = interpret(result.timetable);
    outcome.info["planned_makespan_us"] = result.timetable.makespan;
    outcome.info["optimality"] = result.timetable.optimality.to_string();
    outcome.info["gap"] = result.timetable.optimality.gap;
    outcome.info["nodes_explored"] = result.stats.nodes_explored;
    outcome.info["wall_sec"] = result.stats.wall_sec;
    outcome.info["lower_bound_us"] = result.stats.lower_bound;
    outcome.timetable = std::move(result.timetable);
    return outcome;
  }
  throw UsageError("unknown policy '" + policy +
                   "' (expected ilp, heft, fastest, or brute)");
}

int run_plan(const PlanArgs& args) {
  const std::string graph_path =
      args.graph.empty() ? args.graph_positional : args.graph;
  if (graph_path.empty()) throw UsageError("plan needs a graph (--graph or positional)");
  const ApplicationGraph graph = load_graph(graph_path);
  const PlatformConfig platform = resolve_platform(args.platform);
  const PlanOutcome outcome = run_policy(args.policy, graph, platform, args);
  if (args.export_only) {
    std::cout << outcome.info.dump() << '\n';
    return 0;
  }

  FlagMap flags{{"policy", args.policy}, {"platform", args.platform}};
  if (args.policy == "ilp") {
    flags["backend"] = args.backend;
    if (parse_duration_sec(args.time_limit) > 0) flags["time_limit"] = args.time_limit;
  }
  if (!args.deployment_out.empty() || !args.timetable_out.empty()) {
    if (!args.deployment_out.empty()) {
      save_deployment(outcome.deployment, args.deployment_out, flags);
    }
    if (!args.timetable_out.empty() && outcome.timetable) {
      save_timetable(*outcome.timetable, args.timetable_out, flags);
    }
    std::cout << outcome.info.dump() << '\n';
  } else {
    std::cout << deployment_to_json(outcome.deployment, flags);
  }
  return 0;
}

// ---- simulate ----

struct SimulateArgs {
  std::string graph;
  std::string platform = "small";
  std::string deployment;
  std::string mode = "fp";
  std::vector<std::string> mode_for;
  std::string overheads = "off";
  std::string trace_out;
  std::string gantt_out;
  std::string svg_out;
  bool check = false;
};

int run_simulate(const SimulateArgs& args) {
  const ApplicationGraph graph = load_graph(args.graph);
  const PlatformConfig platform = resolve_platform(args.platform);
  const DeploymentConfig deployment = load_deployment(args.deployment);
  const SimConfig config =
      make_sim_config(platform, args.mode, args.mode_for, args.overheads);

  const SimulationTrace trace = simulate(graph, platform, deployment, config);
  if (!args.trace_out.empty()) write_text_file(args.trace_out, trace_to_jsonl(trace));
  if (!args.gantt_out.empty()) write_text_file(args.gantt_out, render_gantt_text(trace));
  if (!args.svg_out.empty()) write_text_file(args.svg_out, render_gantt_svg(trace));

  json summary{{"makespan_us", trace.makespan},
               {"preemptions", trace.preemptions},
               {"segments", trace.segments.size()}};
  if (args.check) {
    const InvariantReport report =
        check_trace(trace, graph, platform, deployment, config);
    summary["violations"] = report.violations;
    std::cout << summary.dump() << '\n';
    if (!report.ok()) {
      std::cerr << report.to_string() << '\n';
      return 2;
    }
    return 0;
  }
  std::cout << summary.dump() << '\n';
  return 0;
}

// ---- compare ----

// A pipeline bundles one planning policy with one simulation regime.
struct Pipeline {
  std::string name;
  std::string policy;
  std::string mode = "fp";
  std::vector<std::string> mode_for;
  std::string overheads = "off";
  std::string spec;  // the flag text, echoed into the report
};

// Pipeline flag syntax: [name=]policy+token+token...
// Tokens after the policy: a base mode (fp, fp-nonpreempt, rr), a per-class
// override TYPE=mode, or an overheads switch (oh/on/off). Examples:
//   ilp+fp            fastest+rr           wosched=ilp+fp+GPU=rr+DLA=rr+oh
Pipeline parse_pipeline(const std::string& text) {
  Pipeline pipeline;
  pipeline.name = text;
  std::string body = text;
  const auto eq = text.find('=');
  const auto plus = text.find('+');
  if (eq != std::string::npos && (plus == std::string::npos || eq < plus)) {
    pipeline.name = text.substr(0, eq);
    body = text.substr(eq + 1);
  }
  pipeline.spec = body;
  if (pipeline.name.empty() || body.empty()) {
    throw UsageError("bad --pipeline '" + text + "'");
  }

  std::vector<std::string> tokens;
  std::stringstream stream(body);
  std::string token;
  while (std::getline(stream, token, '+')) {
    if (!token.empty()) tokens.push_back(token);
  }
  if (tokens.empty()) throw UsageError("bad --pipeline '" + text + "'");

  pipeline.policy = tokens.front();
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const std::string& tok = tokens[i];
    if (tok.find('=') != std::string::npos) {
      pipeline.mode_for.push_back(tok);
    } else if (tok == "oh" || tok == "on") {
      pipeline.overheads = "on";
    } else if (tok == "off") {
      pipeline.overheads = "off";
    } else {
      pipeline.mode = tok;  // validated by parse_mode later
    }
  }
  return pipeline;
}

struct CompareArgs {
  std::string suite;
  std::string graph;
  std::string platform = "small";
  std::vector<std::string> pipeline_specs;
  std::string baseline;
  std::string backend = "internal";
  std::string time_limit = "0";
  double gap = 0.0;
  int threads = 1;
  int max_per_group = 0;
  std::string out;
  std::string csv_out;
};

int run_compare(const CompareArgs& args) {
  const PlatformConfig platform = resolve_platform(args.platform);

  std::vector<Pipeline> pipelines;
  for (const std::string& text : args.pipeline_specs) {
    pipelines.push_back(parse_pipeline(text));
  }
  if (pipelines.size() < 2) {
    throw UsageError("compare needs at least two --pipeline flags");
  }
  // Canonical order: results must not depend on how pipelines were listed.
  std::sort(pipelines.begin(), pipelines.end(),
            [](const Pipeline& a, const Pipeline& b) { return a.name < b.name; });
  for (std::size_t i = 1; i < pipelines.size(); ++i) {
    if (pipelines[i].name == pipelines[i - 1].name) {
      throw UsageError("duplicate pipeline name '" + pipelines[i].name + "'");
    }
  }
  if (args.baseline.empty()) throw UsageError("compare needs --baseline");
  const bool baseline_known =
      std::any_of(pipelines.begin(), pipelines.end(),
                  [&](const Pipeline& p) { return p.name == args.baseline; });
  if (!baseline_known) {
    throw UsageError("--baseline '" + args.baseline + "' is not a pipeline name");
  }

  std::vector<SimConfig> sim_configs;
  for (const Pipeline& p : pipelines) {
    sim_configs.push_back(make_sim_config(platform, p.mode, p.mode_for, p.overheads));
  }

  struct Item {
    std::string dag_id;
    int group = 0;
    int size = 0;
    std::uint64_t seed = 0;
    ApplicationGraph graph;
  };
  std::vector<Item> items;
  if (!args.suite.empty()) {
    const WorkloadSuite suite = load_suite(args.suite);
    std::map<int, int> taken;
    for (const SuiteEntry& entry : suite.entries) {
      if (args.max_per_group > 0 && taken[entry.group_index] >= args.max_per_group) {
        continue;
      }
      taken[entry.group_index]++;
      items.push_back({std::filesystem::path(entry.file).stem().string(),
                       entry.group_index,
                       suite.spec.group_sizes[entry.group_index], entry.seed,
                       entry.graph});
    }
  } else if (!args.graph.empty()) {
    Item item;
    item.dag_id = std::filesystem::path(args.graph).stem().string();
    item.graph = load_graph(args.graph);
    item.size = static_cast<int>(item.graph.nodes.size());
    items.push_back(std::move(item));
  } else {
    throw UsageError("compare needs --suite or --graph");
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    return std::tie(a.group, a.dag_id) < std::tie(b.group, b.dag_id);
  });

  PlanArgs plan_args;
  plan_args.backend = args.backend;
  plan_args.time_limit = args.time_limit;
  plan_args.gap = args.gap;
  plan_args.threads = args.threads;

  json entries = json::array();
  std::string csv = "group,dag_id,pipeline,makespan_us\n";
  // group -> pipeline -> per-DAG makespans, in item order
  std::map<int, std::map<std::string, std::vector<double>>> by_group;
  for (const Item& item : items) {
    json result_block;
    for (std::size_t i = 0; i < pipelines.size(); ++i) {
      const Pipeline& pipeline = pipelines[i];
      const PlanOutcome outcome =
          run_policy(pipeline.policy, item.graph, platform, plan_args);
      const SimulationTrace trace =
          simulate(item.graph, platform, outcome.deployment, sim_configs[i]);
      json r = outcome.info;
      r["makespan_us"] = trace.makespan;
      result_block[pipeline.name] = r;
      by_group[item.group][pipeline.name].push_back(
          static_cast<double>(trace.makespan));
      csv += std::to_string(item.group) + ',' + item.dag_id + ',' + pipeline.name +
             ',' + std::to_string(trace.makespan) + '\n';
    }
    entries.push_back({{"dag_id", item.dag_id},
                       {"group", item.group},
                       {"size", item.size},
                       {"seed", item.seed},
                       {"results", result_block}});
    std::cerr << item.dag_id << " done\n";
  }

  // geomean_ratio = geometric mean over the group's DAGs of
  // baseline_makespan / pipeline_makespan, so values > 1 mean the pipeline
  // beats the baseline. The baseline's own row is exactly 1.
  json summary = json::array();
  for (const auto& [group, per_pipeline] : by_group) {
    const std::vector<double>& base = per_pipeline.at(args.baseline);
    for (const auto& [name, values] : per_pipeline) {
      double log_sum = 0.0;
      for (std::size_t i = 0; i < values.size(); ++i) {
        log_sum += std::log(base[i] / values[i]);
      }
      const double geomean =
          values.empty() ? 1.0 : std::exp(log_sum / static_cast<double>(values.size()));
      summary.push_back(
          {{"group", group}, {"pipeline", name}, {"geomean_ratio", geomean}});
    }
  }

  json pipeline_list = json::array();
  for (const Pipeline& p : pipelines) {
    pipeline_list.push_back({{"name", p.name},
                             {"policy", p.policy},
                             {"mode", p.mode},
                             {"mode_for", p.mode_for},
                             {"overheads", p.overheads},
                             {"spec", p.spec}});
  }
  json flags{{"platform", args.platform},
             {"baseline", args.baseline},
             {"backend", args.backend},
             {"time_limit", args.time_limit},
             {"gap", args.gap},
             {"threads", args.threads},
             {"max_per_group", args.max_per_group}};
  if (!args.suite.empty()) flags["suite"] = args.suite;
  if (!args.graph.empty()) flags["graph"] = args.graph;
  json report{{"flags", flags},
              {"pipelines", pipeline_list},
              {"baseline", args.baseline},
              {"entries", entries},
              {"summary", summary}};
  write_or_print(report.dump(2) + "\n", args.out);
  if (!args.csv_out.empty()) write_text_file(args.csv_out, csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"xsched: DAG scheduling on heterogeneous XPU platforms"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand("generate", "Generate a workload suite");
  generate->add_option("--out", gen.out, "Suite output directory")->required();
  generate->add_option("--sizes", gen.sizes, "Colon-separated node counts per group");
  generate->add_option("--per-group", gen.per_group, "DAGs per size group");
  generate->add_option("--seed", gen.seed, "Base seed");
  generate->add_flag("--force", gen.force, "Overwrite an existing suite");

  PlanArgs plan;
  CLI::App* plan_cmd = app.add_subcommand("plan", "Plan a deployment for one graph");
  plan_cmd->add_option("--graph", plan.graph, "Graph JSON");
  plan_cmd->add_option("graph_file", plan.graph_positional, "Graph JSON (positional)");
  plan_cmd->add_option("--platform", plan.platform, "small, large, or JSON file");
  plan_cmd->add_option("--policy", plan.policy, "ilp, heft, fastest, brute");
  plan_cmd->add_option("--deployment-out", plan.deployment_out, "Deployment JSON out");
  plan_cmd->add_option("--timetable-out", plan.timetable_out, "Timetable JSON out (ilp)");
  plan_cmd->add_option("--lp-out", plan.lp_out, "Write the model in LP format (ilp)");
  plan_cmd->add_option("--backend", plan.backend, "internal or external:<cmd>");
  plan_cmd->add_option("--time-limit", plan.time_limit, "Solver limit, e.g. 300s or 5m");
  plan_cmd->add_option("--gap", plan.gap, "Stop at this relative gap");
  plan_cmd->add_option("--threads", plan.threads, "Solver threads (reserved)");
  plan_cmd->add_option("--deadline-us", plan.deadline_us, "Makespan deadline in us");
  plan_cmd->add_option("--brute-max-nodes", plan.brute_max_nodes,
                       "Node limit for --policy brute");
  plan_cmd->add_flag("--export-only", plan.export_only, "Only write --lp-out, no solve");
  plan_cmd->add_flag("--print-stats", plan.print_stats, "Model stats to stderr (ilp)");

  SimulateArgs sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Simulate a deployment");
  sim_cmd->add_option("--graph", sim.graph, "Graph JSON")->required();
  sim_cmd->add_option("--platform", sim.platform, "small, large, or JSON file");
  sim_cmd->add_option("--deployment", sim.deployment, "Deployment JSON")->required();
  sim_cmd->add_option("--mode", sim.mode, "fp, fp-nonpreempt, or rr");
  sim_cmd->add_option("--mode-for", sim.mode_for, "Per-class override TYPE=mode");
  sim_cmd->add_option("--overheads", sim.overheads, "on or off");
  sim_cmd->add_option("--trace-out", sim.trace_out, "Trace JSONL out");
  sim_cmd->add_option("--gantt-out", sim.gantt_out, "Text gantt out");
  sim_cmd->add_option("--svg-out", sim.svg_out, "SVG gantt out");
  sim_cmd->add_flag("--check", sim.check, "Re-check trace invariants; fail on violation");

  CompareArgs cmp;
  CLI::App* cmp_cmd = app.add_subcommand("compare", "Run pipelines across a suite");
  cmp_cmd->add_option("--suite", cmp.suite, "Suite directory");
  cmp_cmd->add_option("--graph", cmp.graph, "Single graph JSON instead of a suite");
  cmp_cmd->add_option("--platform", cmp.platform, "small, large, or JSON file");
  cmp_cmd->add_option("--pipeline", cmp.pipeline_specs,
                      "[name=]policy+mode tokens, e.g. ilp+fp or fastest+rr+oh;"
                      " repeat for each pipeline (needs >= 2)");
  cmp_cmd->add_option("--baseline", cmp.baseline,
                      "Pipeline name ratios are normalized to");
  cmp_cmd->add_option("--backend", cmp.backend, "ILP backend");
  cmp_cmd->add_option("--time-limit", cmp.time_limit, "ILP limit per DAG");
  cmp_cmd->add_option("--gap", cmp.gap, "ILP relative gap limit");
  cmp_cmd->add_option("--threads", cmp.threads, "Solver threads (reserved)");
  cmp_cmd->add_option("--max-per-group", cmp.max_per_group, "Cap DAGs per size group");
  cmp_cmd->add_option("--out", cmp.out, "Report JSON out (default stdout)");
  cmp_cmd->add_option("--csv-out", cmp.csv_out, "Per-DAG CSV out");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*generate) return run_generate(gen);
    if (*plan_cmd) return run_plan(plan);
    if (*sim_cmd) return run_simulate(sim);
    if (*cmp_cmd) return run_compare(cmp);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
