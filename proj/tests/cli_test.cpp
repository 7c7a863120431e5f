#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "test_util.hpp"
#include "xsched/json_io.hpp"
#include "xsched/workload.hpp"

using namespace xsched;
using namespace xsched::testsupport;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path root;
  Scratch() {
    root = fs::temp_directory_path() /
           ("xsched_cli_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Scratch() { fs::remove_all(root); }
  fs::path operator/(const std::string& leaf) const { return root / leaf; }
};

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun run_cli(const Scratch& scratch, const std::string& args) {
  const fs::path out_file = scratch / "stdout.tmp";
  const fs::path err_file = scratch / "stderr.tmp";
  const std::string command = std::string(XSCHED_CLI_PATH) + " " + args + " >" +
                              out_file.string() + " 2>" + err_file.string();
  const int status = std::system(command.c_str());
  CliRun run;
  run.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  run.out = read_text_file(out_file);
  run.err = read_text_file(err_file);
  return run;
}

int count_graph_files(const fs::path& dir) {
  int count = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.path().extension() == ".json" &&
        entry.path().filename() != "suite.json") {
      ++count;
    }
  }
  return count;
}

fs::path write_diamond(const Scratch& scratch, const std::string& leaf) {
  const auto graph = make_graph(
      {make_node("a", {{"CPU", 5'000}}),
       make_node("b", {{"CPU", 50'000}, {"GPU", 10'000}}),
       make_node("c", {{"CPU", 40'000}, {"GPU", 8'000}}),
       make_node("d", {{"CPU", 5'000}})},
      {{"a", "b"}, {"a", "c"}, {"b", "d"}, {"c", "d"}});
  const auto path = scratch / leaf;
  save_graph(graph, path);
  return path;
}

fs::path write_big_graph(const Scratch& scratch, const std::string& leaf) {
  GenParams params;
  params.target_node_count = 24;
  ApplicationGraph graph;
  for (std::uint64_t seed = 900;; ++seed) {
    graph = generate_graph(params, seed);
    if (graph.nodes.size() >= 20) break;
  }
  const auto path = scratch / leaf;
  save_graph(graph, path);
  return path;
}

}  // namespace

TEST_CASE("[cli] generate writes a reproducible suite and guards overwrites") {
  Scratch scratch;
  const std::string flags = " --sizes 4:6 --per-group 2 --seed 9";
  const auto first =
      run_cli(scratch, "generate --out " + (scratch / "a").string() + flags);
  REQUIRE(first.code == 0);
  CHECK(fs::exists(scratch / "a" / "suite.json"));
  CHECK(count_graph_files(scratch / "a") == 4);

  const auto manifest = json::parse(read_text_file(scratch / "a" / "suite.json"));
  REQUIRE(manifest.contains("flags"));
  CHECK(manifest["flags"]["sizes"] == "4:6");
  CHECK(manifest["flags"]["seed"] == "9");

  const auto second =
      run_cli(scratch, "generate --out " + (scratch / "b").string() + flags);
  REQUIRE(second.code == 0);
  CHECK(read_text_file(scratch / "a" / "suite.json") ==
        read_text_file(scratch / "b" / "suite.json"));
  for (const auto& entry : fs::recursive_directory_iterator(scratch / "a")) {
    if (entry.path().extension() != ".json") continue;
    const auto twin = scratch / "b" / fs::relative(entry.path(), scratch / "a");
    CAPTURE(entry.path().string());
    CHECK(read_text_file(entry.path()) == read_text_file(twin));
  }

  const auto refused =
      run_cli(scratch, "generate --out " + (scratch / "a").string() + flags);
  CHECK(refused.code == 2);
  const auto forced = run_cli(
      scratch, "generate --out " + (scratch / "a").string() + flags + " --force");
  CHECK(forced.code == 0);

  CHECK(run_cli(scratch, "generate" + flags).code == 1);
}

TEST_CASE("[cli] plan prints a deployment and honors output files") {
  Scratch scratch;
  const auto graph_path = write_diamond(scratch, "diamond.json");

  const auto flagged = run_cli(
      scratch, "plan --policy heft --graph " + graph_path.string());
  REQUIRE(flagged.code == 0);
  const auto deployment = json::parse(flagged.out);
  CHECK(deployment.contains("assignments"));
  CHECK(deployment["policy"] == "heft");

  const auto positional =
      run_cli(scratch, "plan " + graph_path.string() + " --policy heft");
  CHECK(positional.code == 0);
  CHECK(positional.out == flagged.out);

  const auto again = run_cli(
      scratch, "plan --policy heft --graph " + graph_path.string());
  CHECK(again.out == flagged.out);

  const auto dep_out = scratch / "dep.json";
  const auto tt_out = scratch / "tt.json";
  const auto to_files = run_cli(
      scratch, "plan --policy ilp --graph " + graph_path.string() +
                   " --deployment-out " + dep_out.string() +
                   " --timetable-out " + tt_out.string());
  REQUIRE(to_files.code == 0);
  const auto info = json::parse(to_files.out);
  CHECK(info["planned_makespan_us"] == 28'000);
  CHECK(json::parse(read_text_file(dep_out)).contains("assignments"));
  const auto timetable = json::parse(read_text_file(tt_out));
  CHECK(timetable.contains("optimality"));
  CHECK(timetable["makespan"] == 28'000);
}

TEST_CASE("[cli] plan exports lp models without solving") {
  Scratch scratch;
  const auto graph_path = write_diamond(scratch, "diamond.json");
  const auto lp_out = scratch / "model.lp";
  const auto run = run_cli(
      scratch, "plan --policy ilp --graph " + graph_path.string() +
                   " --export-only --lp-out " + lp_out.string());
  REQUIRE(run.code == 0);
  const auto text = read_text_file(lp_out);
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("Binaries") != std::string::npos);
}

TEST_CASE("[cli] plan brute refuses oversized graphs with the failure code") {
  Scratch scratch;
  const auto graph_path = write_big_graph(scratch, "big.json");
  const auto run =
      run_cli(scratch, "plan --policy brute --graph " + graph_path.string());
  CHECK(run.code == 2);
}

TEST_CASE("[cli] plan rejects bad flag values as usage errors") {
  Scratch scratch;
  const auto graph_path = write_diamond(scratch, "diamond.json");
  CHECK(run_cli(scratch, "plan --policy nosuch --graph " + graph_path.string())
            .code == 1);
  CHECK(run_cli(scratch, "plan --policy heft").code == 1);
  CHECK(run_cli(scratch, "plan --policy ilp --graph " + graph_path.string() +
                             " --time-limit soon")
            .code == 1);
  CHECK(run_cli(scratch, "nosuchcommand").code == 1);
  CHECK(run_cli(scratch, "").code == 1);
}

TEST_CASE("[cli] simulate reports, checks, and renders the schedule") {
  Scratch scratch;
  const auto graph_path = write_diamond(scratch, "diamond.json");
  const auto dep_out = scratch / "dep.json";
  REQUIRE(run_cli(scratch, "plan --policy ilp --graph " + graph_path.string() +
                               " --deployment-out " + dep_out.string())
              .code == 0);

  const auto trace_out = scratch / "trace.jsonl";
  const auto gantt_out = scratch / "gantt.txt";
  const auto svg_out = scratch / "gantt.svg";
  const std::string base = "simulate --graph " + graph_path.string() +
                           " --deployment " + dep_out.string() +
                           " --mode fp --overheads off";
  const auto run = run_cli(
      scratch, base + " --check --trace-out " + trace_out.string() +
                   " --gantt-out " + gantt_out.string() + " --svg-out " +
                   svg_out.string());
  REQUIRE(run.code == 0);
  const auto summary = json::parse(run.out);
  CHECK(summary["makespan_us"] == 28'000);
  CHECK(summary["violations"].empty());

  const auto trace = read_text_file(trace_out);
  CHECK(trace.find("\"node_id\"") != std::string::npos);
  CHECK(read_text_file(gantt_out).find("GPU0") != std::string::npos);
  CHECK(read_text_file(svg_out).find("<svg") != std::string::npos);

  const auto rerun = run_cli(scratch, base + " --trace-out " +
                                          (scratch / "trace2.jsonl").string());
  CHECK(rerun.code == 0);
  CHECK(read_text_file(scratch / "trace2.jsonl") == trace);
}

TEST_CASE("[cli] simulate fails cleanly on a mismatched deployment") {
  Scratch scratch;
  const auto graph_path = write_diamond(scratch, "diamond.json");
  const auto other = make_graph({make_node("zz", {{"CPU", 1'000}})});
  const auto other_path = scratch / "other.json";
  save_graph(other, other_path);
  const auto dep_out = scratch / "dep.json";
  REQUIRE(run_cli(scratch, "plan --policy fastest --graph " + other_path.string() +
                               " --deployment-out " + dep_out.string())
              .code == 0);
  CHECK(run_cli(scratch, "simulate --graph " + graph_path.string() +
                             " --deployment " + dep_out.string())
            .code == 2);
}

TEST_CASE("[cli] compare ranks pipelines against the chosen baseline") {
  Scratch scratch;
  const auto suite_dir = scratch / "suite";
  REQUIRE(run_cli(scratch, "generate --out " + suite_dir.string() +
                               " --sizes 4:6 --per-group 2 --seed 3")
              .code == 0);

  const std::string pipelines =
      " --pipeline heft+fp --pipeline base=fastest+rr --baseline base";
  const auto csv_path = scratch / "cmp.csv";
  const auto report_path = scratch / "cmp.json";
  const auto run = run_cli(
      scratch, "compare --suite " + suite_dir.string() + pipelines +
                   " --csv-out " + csv_path.string() + " --out " +
                   report_path.string());
  REQUIRE(run.code == 0);

  const auto csv = read_text_file(csv_path);
  CHECK(csv.rfind("group,dag_id,pipeline,makespan_us\n", 0) == 0);

  const auto report = json::parse(read_text_file(report_path));
  CHECK(report["baseline"] == "base");
  REQUIRE(report.contains("summary"));
  bool saw_baseline_row = false;
  for (const auto& row : report["summary"]) {
    if (row["pipeline"] == "base") {
      saw_baseline_row = true;
      CHECK(row["geomean_ratio"] == 1.0);
    }
  }
  CHECK(saw_baseline_row);

  // Pipelines are canonicalized by name, so listing order cannot matter.
  const auto swapped_path = scratch / "cmp_swapped.json";
  const auto swapped = run_cli(
      scratch, "compare --suite " + suite_dir.string() +
                   " --pipeline base=fastest+rr --pipeline heft+fp" +
                   " --baseline base --out " + swapped_path.string());
  REQUIRE(swapped.code == 0);
  CHECK(read_text_file(swapped_path) == read_text_file(report_path));
}

TEST_CASE("[cli] compare works on a single graph") {
  Scratch scratch;
  const auto graph_path = write_diamond(scratch, "diamond.json");
  const auto run = run_cli(
      scratch, "compare --graph " + graph_path.string() +
                   " --pipeline ilp+fp --pipeline base=fastest+fp" +
                   " --baseline base");
  REQUIRE(run.code == 0);
  const auto report = json::parse(run.out);
  double ilp_ratio = 0.0;
  for (const auto& row : report["summary"]) {
    if (row["pipeline"] == "ilp+fp") ilp_ratio = row["geomean_ratio"];
  }
  // The diamond's optimum (28 ms) beats pinning every stage to its fastest
  // class (the gpu serializes b and c behind each other's contention), so
  // the ratio must favor the solver.
  CHECK(ilp_ratio >= 1.0);
}

TEST_CASE("[cli] compare validates its pipeline arguments") {
  Scratch scratch;
  const auto graph_path = write_diamond(scratch, "diamond.json");
  const std::string base = "compare --graph " + graph_path.string();
  CHECK(run_cli(scratch, base + " --pipeline heft+fp --baseline heft+fp").code == 1);
  CHECK(run_cli(scratch, base +
                    " --pipeline heft+fp --pipeline fastest+rr --baseline nope")
            .code == 1);
  CHECK(run_cli(scratch, base +
                    " --pipeline heft+fp --pipeline heft+fp --baseline heft+fp")
            .code == 1);
  CHECK(run_cli(scratch, base + " --pipeline heft+bogus --pipeline fastest+rr" +
                             " --baseline fastest+rr")
            .code == 1);
}
