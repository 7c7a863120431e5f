#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "ilp_names.hpp"
#include "xsched/heuristics.hpp"
#include "xsched/ilp.hpp"
#include "xsched/json_io.hpp"
#include "xsched/simplex.hpp"
#include "xsched/simulator.hpp"

namespace xsched {

namespace {

using Clock = std::chrono::steady_clock;

constexpr Micros kInf = std::numeric_limits<Micros>::max() / 4;

// A difference constraint var >= other + gap over the start/finish values;
// other == -1 anchors var >= gap directly.
struct DiffConstraint {
  int var;
  int other;
  Micros gap;
};

// Builds a feasible timetable out of a simulated trace: each node's window
// is its first dispatch to its completion. Windows taken from a real trace
// always satisfy the demand bound, so this is a cheap incumbent.
ScheduleTimetable timetable_from_trace(const SimulationTrace& trace,
                                       const DeploymentConfig& deployment) {
  std::map<std::string, Micros> first_start;
  for (const auto& seg : trace.segments) {
    if (seg.kind != SegmentKind::kRun) continue;
    auto [it, fresh] = first_start.emplace(seg.node_id, seg.start);
    if (!fresh) it->second = std::min(it->second, seg.start);
  }
  ScheduleTimetable timetable;
  Micros makespan = 0;
  for (const auto& a : deployment.assignments) {
    const Micros finish = trace.finish.at(a.node_id);
    timetable.entries.push_back(
        {a.node_id, first_start.at(a.node_id), finish, a.xpu_type, a.instance_id});
    makespan = std::max(makespan, finish);
  }
  timetable.makespan = makespan;
  timetable.optimality = {OptimalityStatus::kHeuristicFeasible, 0.0};
  timetable.normalize();
  return timetable;
}

class Searcher {
 public:
  Searcher(const IlpModel& model, const SolveOptions& options)
      : model_(model), options_(options) {
    n_ = static_cast<int>(model_.graph.nodes.size());
    m_ = static_cast<int>(model_.platform.xpus.size());
    cutoff_ = model_.deadline ? *model_.deadline + 1 : kInf;

    std::map<std::string, int> index_of;
    for (int i = 0; i < n_; ++i) index_of[model_.graph.nodes[i].node_id] = i;
    for (const auto& [from, to] : model_.graph.edges) {
      edges_.push_back({index_of[from], index_of[to]});
    }

    min_wcet_.assign(n_, kInf);
    max_wcet_.assign(n_, 0);
    for (int i = 0; i < n_; ++i) {
      for (int mi = 0; mi < m_; ++mi) {
        if (model_.wcet[i][mi] < 0) continue;
        min_wcet_[i] = std::min(min_wcet_[i], model_.wcet[i][mi]);
        max_wcet_[i] = std::max(max_wcet_[i], model_.wcet[i][mi]);
      }
    }

    // Branching order: critical nodes first (descending longest downstream
    // path by max wcet, which is topologically consistent).
    std::vector<Micros> rank(n_, 0);
    std::vector<std::vector<int>> succs(n_);
    for (const auto& [u, v] : edges_) succs[u].push_back(v);
    std::vector<std::string> topo = topo_order(model_.graph);
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
      const int u = index_of[*it];
      Micros best = 0;
      for (int v : succs[u]) best = std::max(best, rank[v]);
      rank[u] = max_wcet_[u] + best;
    }
    order_.resize(n_);
    for (int i = 0; i < n_; ++i) order_[i] = i;
    std::sort(order_.begin(), order_.end(), [&rank](int a, int b) {
      if (rank[a] != rank[b]) return rank[a] > rank[b];
      return a < b;
    });

    group_of_.assign(m_, -1);
    for (std::size_t g = 0; g < model_.instance_groups.size(); ++g) {
      for (int mi : model_.instance_groups[g]) group_of_[mi] = static_cast<int>(g);
    }

    // Per node: candidate instances ordered fastest-first so the first full
    // descent already lands near a greedy solution.
    choices_.resize(n_);
    for (int i = 0; i < n_; ++i) {
      for (int mi = 0; mi < m_; ++mi) {
        if (model_.wcet[i][mi] >= 0) choices_[i].push_back(mi);
      }
      std::sort(choices_[i].begin(), choices_[i].end(), [&](int a, int b) {
        const auto& xa = model_.platform.xpus[a];
        const auto& xb = model_.platform.xpus[b];
        return std::forward_as_tuple(model_.wcet[i][a], xa.xpu_type, xa.instance_id) <
               std::forward_as_tuple(model_.wcet[i][b], xb.xpu_type, xb.instance_id);
      });
    }

    assigned_.assign(n_, -1);
    committed_.assign(m_, 0);
    used_.assign(m_, 0);
  }

  SolveResult run() {
    start_ = Clock::now();
    seed_incumbents();
    root_bound_ = std::max(path_bound(), load_bound());
    if (n_ > 8) root_bound_ = std::max(root_bound_, lp_bound());

    dfs_assign(0);

    if (std::getenv("XSCHED_SOLVER_LOG") != nullptr) {
      std::fprintf(stderr,
                   "solver: root=%lld seed=%lld best=%lld assign_nodes=%lld "
                   "completes=%lld window_nodes=%lld wall=%.2fs\n",
                   static_cast<long long>(root_bound_), static_cast<long long>(seed_mk_),
                   static_cast<long long>(have_best_ ? best_mk_ : -1),
                   static_cast<long long>(explored_) - window_nodes_, completes_,
                   window_nodes_, elapsed());
    }

    SolveResult result;
    result.stats.nodes_explored = explored_;
    result.stats.wall_sec = elapsed();
    if (!have_best_) {
      if (timed_out_) {
        throw std::runtime_error("solve: no incumbent within the time limit");
      }
      throw std::runtime_error("solve: infeasible under the deadline");
    }

    Micros lb = std::min(open_bound_, best_mk_);
    lb = std::max(lb, root_bound_);
    const double gap =
        lb >= best_mk_
            ? 0.0
            : static_cast<double>(best_mk_ - lb) / static_cast<double>(best_mk_);
    result.stats.lower_bound = static_cast<double>(lb);
    best_.optimality = gap == 0.0 ? Optimality{OptimalityStatus::kProvenOptimal, 0.0}
                                  : Optimality{OptimalityStatus::kGap, gap};
    result.timetable = best_;
    return result;
  }

 private:
  double elapsed() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }

  bool over_time() {
    if (timed_out_) return true;
    if (options_.time_limit_sec > 0.0 && elapsed() > options_.time_limit_sec) {
      timed_out_ = true;
    }
    return timed_out_;
  }

  Micros cutoff() const { return have_best_ ? std::min(best_mk_, cutoff_) : cutoff_; }

  // Records the bound of a subtree skipped for a non-proof reason (time or
  // accepted gap), which caps the final lower bound.
  void record_open(Micros bound) { open_bound_ = std::min(open_bound_, bound); }

  bool gap_acceptable(Micros bound) const {
    if (options_.gap_limit <= 0.0 || !have_best_) return false;
    return static_cast<double>(best_mk_ - bound) <=
           options_.gap_limit * static_cast<double>(best_mk_);
  }

  void install(const ScheduleTimetable& timetable) {
    const Micros mk = timetable.makespan;
    if (mk >= cutoff()) return;
    best_ = timetable;
    best_mk_ = mk;
    have_best_ = true;
  }

  void seed_incumbents() {
    const SimConfig config =
        SimConfig::uniform(model_.platform, SchedMode::kFpPreemptive, false);
    const DeploymentConfig heft_dep = heft(model_.graph, model_.platform).deployment;
    for (const DeploymentConfig& dep :
         {heft_dep, fastest_xpu(model_.graph, model_.platform)}) {
      const SimulationTrace trace = simulate(model_.graph, model_.platform, dep, config);
      install(timetable_from_trace(trace, dep));
    }
    seed_mk_ = have_best_ ? best_mk_ : -1;
  }

  // ---- level 1: assignment search ----

  // Longest path with current node weights (exact for assigned nodes, the
  // cheapest supported impl otherwise).
  Micros path_bound() const {
    std::vector<Micros> weight(n_);
    for (int i = 0; i < n_; ++i) {
      weight[i] = assigned_[i] >= 0 ? model_.wcet[i][assigned_[i]] : min_wcet_[i];
    }
    // order_ is topologically consistent; accumulate along it.
    std::vector<Micros> dist(n_, 0);
    Micros best = 0;
    for (int i : order_) dist[i] += weight[i];
    for (int i : order_) {
      for (const auto& [u, v] : edges_) {
        if (u == i) dist[v] = std::max(dist[v], dist[i] + weight[v]);
      }
    }
    for (int i = 0; i < n_; ++i) best = std::max(best, dist[i]);
    return best;
  }

  Micros load_bound() const {
    Micros best = 0;
    for (int mi = 0; mi < m_; ++mi) best = std::max(best, committed_[mi]);
    // Work that can only land on one group spreads over it at best evenly.
    for (const auto& group : model_.instance_groups) {
      Micros pool = 0;
      for (int mi : group) pool += committed_[mi];
      for (int i = 0; i < n_; ++i) {
        if (assigned_[i] >= 0) continue;
        bool confined = true;
        Micros cheapest = kInf;
        for (int mi : choices_[i]) {
          if (group_of_[mi] != group_of_[group[0]]) {
            confined = false;
            break;
          }
          cheapest = std::min(cheapest, model_.wcet[i][mi]);
        }
        if (confined) pool += cheapest;
      }
      const Micros size = static_cast<Micros>(group.size());
      best = std::max(best, (pool + size - 1) / size);
    }
    return best;
  }

  // Fractional relaxation: assignment mix, precedence, per-node span and
  // per-instance load versus the makespan.
  Micros lp_bound() const {
    LinearProgram lp;
    std::vector<int> s_var(n_), f_var(n_);
    for (int i = 0; i < n_; ++i) {
      s_var[i] = lp.add_var(0.0);
      f_var[i] = lp.add_var(0.0);
    }
    const int z_var = lp.add_var(1.0);
    std::map<std::pair<int, int>, int> p_var;
    for (int i = 0; i < n_; ++i) {
      if (assigned_[i] >= 0) continue;
      LinearProgram::Row mix;
      for (int mi : choices_[i]) {
        // The mix row already caps each share at 1, so no explicit bound.
        const int var = lp.add_var(0.0);
        p_var[{i, mi}] = var;
        mix.terms.push_back({var, 1.0});
      }
      mix.sense = LinearProgram::Sense::kEq;
      mix.rhs = 1.0;
      lp.add_row(mix);
    }
    for (const auto& [u, v] : edges_) {
      lp.add_row({{{s_var[v], 1.0}, {f_var[u], -1.0}}, LinearProgram::Sense::kGe, 0.0});
    }
    for (int i = 0; i < n_; ++i) {
      LinearProgram::Row span;
      span.terms.push_back({f_var[i], 1.0});
      span.terms.push_back({s_var[i], -1.0});
      span.sense = LinearProgram::Sense::kGe;
      if (assigned_[i] >= 0) {
        span.rhs = static_cast<double>(model_.wcet[i][assigned_[i]]);
      } else {
        for (int mi : choices_[i]) {
          span.terms.push_back({p_var.at({i, mi}),
                                -static_cast<double>(model_.wcet[i][mi])});
        }
        span.rhs = 0.0;
      }
      lp.add_row(span);
      lp.add_row({{{z_var, 1.0}, {f_var[i], -1.0}}, LinearProgram::Sense::kGe, 0.0});
    }
    for (int mi = 0; mi < m_; ++mi) {
      LinearProgram::Row load;
      load.terms.push_back({z_var, -1.0});
      for (int i = 0; i < n_; ++i) {
        if (assigned_[i] >= 0) continue;
        auto it = p_var.find({i, mi});
        if (it != p_var.end()) {
          load.terms.push_back({it->second, static_cast<double>(model_.wcet[i][mi])});
        }
      }
      load.sense = LinearProgram::Sense::kLe;
      load.rhs = -static_cast<double>(committed_[mi]);
      lp.add_row(load);
    }

    // Advisory bound: give up rather than grind on a degenerate relaxation.
    const LpSolution solution = solve_lp(lp, 20000);
    if (solution.status != LpStatus::kOptimal) return 0;
    return static_cast<Micros>(std::ceil(solution.objective - 1e-6));
  }

  void dfs_assign(std::size_t depth) {
    explored_++;
    if (depth == order_.size()) {
      solve_complete();
      return;
    }
    const int i = order_[depth];
    for (int mi : choices_[i]) {
      // Canonical instance use inside a group of identical instances:
      // a member may be opened only after all lower members of its group.
      bool canonical = true;
      for (int other : model_.instance_groups[group_of_[mi]]) {
        if (other == mi) break;
        if (used_[other] == 0) {
          canonical = false;
          break;
        }
      }
      if (!canonical) continue;

      assigned_[i] = mi;
      committed_[mi] += model_.wcet[i][mi];
      used_[mi]++;

      Micros bound = std::max(path_bound(), load_bound());
      if (bound < cutoff() && depth < 2 && n_ > 8 && !over_time()) {
        bound = std::max(bound, lp_bound());
      }
      if (bound >= cutoff()) {
        // proven: nothing better below
      } else if (over_time() || gap_acceptable(bound)) {
        record_open(bound);
      } else {
        dfs_assign(depth + 1);
      }

      used_[mi]--;
      committed_[mi] -= model_.wcet[i][mi];
      assigned_[i] = -1;
    }
  }

  // ---- level 2: scheduling a fixed assignment ----

  // Componentwise-least solution of the difference system, or nullopt when
  // a positive cycle makes it infeasible. Variables: s_i at i, f_i at n+i.
  // `warm` may be any componentwise underestimate of the solution (e.g. the
  // parent node's least solution); iteration converges from below either way.
  std::optional<std::vector<Micros>> earliest(const std::vector<DiffConstraint>& extra,
                                              const std::vector<Micros>* warm) const {
    std::vector<Micros> val = warm ? *warm : std::vector<Micros>(2 * n_, 0);
    for (int round = 0; round <= 2 * n_ + 1; ++round) {
      bool changed = false;
      auto relax = [&](const DiffConstraint& c) {
        const Micros lo = c.other < 0 ? c.gap : val[c.other] + c.gap;
        if (val[c.var] < lo) {
          val[c.var] = lo;
          changed = true;
        }
      };
      for (const auto& c : base_) relax(c);
      for (const auto& c : extra) relax(c);
      if (!changed) return val;
    }
    return std::nullopt;  // positive cycle
  }

  struct Violation {
    int inst = -1;
    int a = -1;
    int b = -1;
    Micros demand = 0;
    std::vector<int> inside;
  };

  // A violated demand window at the given least solution, if any. Among the
  // violated windows prefer the one spanning the fewest jobs (smallest
  // branching disjunction), then the largest excess.
  std::optional<Violation> separate(const std::vector<Micros>& val) const {
    std::optional<Violation> best;
    Micros best_excess = 0;
    std::size_t best_count = 0;
    for (int mi = 0; mi < m_; ++mi) {
      const auto& jobs = by_instance_[mi];
      for (int a : jobs) {
        for (int b : jobs) {
          const Micros lo = val[a];
          const Micros hi = val[n_ + b];
          if (lo > hi) continue;
          Micros demand = 0;
          std::size_t count = 0;
          for (int k : jobs) {
            if (val[k] >= lo && val[n_ + k] <= hi) {
              demand += model_.wcet[k][assigned_[k]];
              count++;
            }
          }
          const Micros excess = demand - (hi - lo);
          if (excess <= 0) continue;
          if (!best || count < best_count ||
              (count == best_count && excess > best_excess)) {
            best_excess = excess;
            best_count = count;
            best = Violation{mi, a, b, demand, {}};
          }
        }
      }
    }
    if (best) {
      const Micros lo = val[best->a];
      const Micros hi = val[n_ + best->b];
      for (int k : by_instance_[best->inst]) {
        if (val[k] >= lo && val[n_ + k] <= hi) best->inside.push_back(k);
      }
    }
    return best;
  }

  ScheduleTimetable timetable_from(const std::vector<Micros>& val) const {
    ScheduleTimetable timetable;
    for (int i = 0; i < n_; ++i) {
      const XpuInstance& xpu = model_.platform.xpus[assigned_[i]];
      timetable.entries.push_back({model_.graph.nodes[i].node_id, val[i], val[n_ + i],
                                   xpu.xpu_type, xpu.instance_id});
      timetable.makespan = std::max(timetable.makespan, val[n_ + i]);
    }
    timetable.normalize();
    return timetable;
  }

  // `floor` is the parent's subtree bound: constraints only tighten along a
  // branch, so it stays valid here when we stop early.
  void dfs_windows(std::vector<DiffConstraint>& extra, Micros floor,
                   const std::vector<Micros>* warm) {
    explored_++;
    window_nodes_++;
    if (over_time()) {
      record_open(floor);
      return;
    }
    const auto val = earliest(extra, warm);
    if (!val) return;  // contradictory orderings, nothing feasible below
    Micros mk = 0;
    for (int i = 0; i < n_; ++i) mk = std::max(mk, (*val)[n_ + i]);
    // Capacity: val[k] lower-bounds every start below this node, so for any
    // threshold t the work of jobs released at or after t on one instance
    // runs entirely after t; the last finish is at least t + that work.
    Micros bound = mk;
    for (int mi = 0; mi < m_; ++mi) {
      const auto& jobs = by_instance_[mi];
      for (int j : jobs) {
        const Micros t = (*val)[j];
        Micros work = 0;
        for (int k : jobs) {
          if ((*val)[k] >= t) work += model_.wcet[k][assigned_[k]];
        }
        bound = std::max(bound, t + work);
      }
    }
    if (bound >= cutoff()) return;
    if (gap_acceptable(bound)) {
      record_open(bound);
      return;
    }

    const auto violation = separate(*val);
    if (!violation) {
      install(timetable_from(*val));
      return;
    }

    // Disjunctive cover: the window stretches to fit everything currently
    // inside, or some inside job escapes past one of its edges. Every child
    // constraint is violated by the current least solution, so the bound
    // strictly grows along any branch.
    const int a = violation->a;
    const int b = violation->b;
    extra.push_back({n_ + b, a, violation->demand});
    dfs_windows(extra, bound, &*val);
    extra.pop_back();
    for (int k : violation->inside) {
      if (k == a) continue;
      extra.push_back({a, k, 1});
      dfs_windows(extra, bound, &*val);
      extra.pop_back();
    }
    for (int k : violation->inside) {
      if (k == b) continue;
      extra.push_back({n_ + k, n_ + b, 1});
      dfs_windows(extra, bound, &*val);
      extra.pop_back();
    }
  }

  // Non-preemptive greedy packing of the fixed assignment, a quick
  // incumbent before the exact window search.
  void pack_greedy() {
    std::vector<Micros> avail(m_, 0);
    std::vector<Micros> start(n_, 0), finish(n_, 0);
    for (int i : order_) {
      Micros ready = avail[assigned_[i]];
      for (const auto& [u, v] : edges_) {
        if (v == i) ready = std::max(ready, finish[u]);
      }
      start[i] = ready;
      finish[i] = ready + model_.wcet[i][assigned_[i]];
      avail[assigned_[i]] = finish[i];
    }
    ScheduleTimetable timetable;
    for (int i = 0; i < n_; ++i) {
      const XpuInstance& xpu = model_.platform.xpus[assigned_[i]];
      timetable.entries.push_back({model_.graph.nodes[i].node_id, start[i], finish[i],
                                   xpu.xpu_type, xpu.instance_id});
      timetable.makespan = std::max(timetable.makespan, finish[i]);
    }
    timetable.normalize();
    install(timetable);
  }

  void solve_complete() {
    completes_++;
    const Micros pb = path_bound();
    if (pb >= cutoff()) return;

    pack_greedy();

    base_.clear();
    for (int i = 0; i < n_; ++i) {
      base_.push_back({n_ + i, i, model_.wcet[i][assigned_[i]]});
    }
    for (const auto& [u, v] : edges_) base_.push_back({v, n_ + u, 0});
    by_instance_.assign(m_, {});
    for (int i = 0; i < n_; ++i) by_instance_[assigned_[i]].push_back(i);

    std::vector<DiffConstraint> extra;
    dfs_windows(extra, pb, nullptr);
  }

  const IlpModel& model_;
  SolveOptions options_;
  int n_ = 0;
  int m_ = 0;

  std::vector<std::pair<int, int>> edges_;
  std::vector<Micros> min_wcet_, max_wcet_;
  std::vector<int> order_;
  std::vector<std::vector<int>> choices_;
  std::vector<int> group_of_;

  std::vector<int> assigned_;
  std::vector<Micros> committed_;
  std::vector<int> used_;

  std::vector<DiffConstraint> base_;
  std::vector<std::vector<int>> by_instance_;

  ScheduleTimetable best_;
  Micros best_mk_ = kInf;
  bool have_best_ = false;
  Micros cutoff_ = kInf;
  Micros open_bound_ = kInf;
  Micros root_bound_ = 0;
  Micros seed_mk_ = -1;
  long long window_nodes_ = 0;
  long long completes_ = 0;

  std::uint64_t explored_ = 0;
  bool timed_out_ = false;
  Clock::time_point start_;
};

// ---- external backend ----

SolveResult solve_external(const IlpModel& model, const SolveOptions& options,
                           const std::string& command) {
  namespace fs = std::filesystem;
  const auto t0 = Clock::now();

  char dir_template[] = "/tmp/xsched-lp-XXXXXX";
  if (::mkdtemp(dir_template) == nullptr) {
    throw std::runtime_error("solve: cannot create temp directory");
  }
  const fs::path dir = dir_template;
  const fs::path model_path = dir / "model.lp";
  const fs::path solution_path = dir / "solution.out";
  write_text_file(model_path.string(), export_lp(model));

  // Limits travel via the environment; the adapter is free to ignore them.
  std::string invocation;
  if (options.time_limit_sec > 0.0) {
    invocation += "XSCHED_TIME_LIMIT_SEC=" + std::to_string(options.time_limit_sec) + " ";
  }
  if (options.gap_limit > 0.0) {
    invocation += "XSCHED_GAP_LIMIT=" + std::to_string(options.gap_limit) + " ";
  }
  if (options.threads > 1) {
    invocation += "XSCHED_THREADS=" + std::to_string(options.threads) + " ";
  }
  invocation +=
      command + " '" + model_path.string() + "' '" + solution_path.string() + "'";
  const int rc = std::system(invocation.c_str());
  if (rc != 0) {
    fs::remove_all(dir);
    throw std::runtime_error("solve: external solver exited with status " +
                             std::to_string(rc));
  }

  std::map<std::string, double> values;
  std::string status = "optimal";
  double objective = std::numeric_limits<double>::quiet_NaN();
  double bound = std::numeric_limits<double>::quiet_NaN();
  {
    std::istringstream in(read_text_file(solution_path.string()));
    std::string name;
    while (in >> name) {
      if (name == "status") {
        in >> status;
      } else if (name == "objective") {
        in >> objective;
      } else if (name == "bound") {
        in >> bound;
      } else {
        double value = 0.0;
        in >> value;
        values[name] = value;
      }
    }
  }
  fs::remove_all(dir);

  if (status == "infeasible") {
    throw std::runtime_error("solve: external solver reports infeasible");
  }

  ScheduleTimetable timetable;
  for (const auto& node : model.graph.nodes) {
    auto value_of = [&values](const std::string& name) {
      auto it = values.find(name);
      return it == values.end() ? 0.0 : it->second;
    };
    const XpuInstance* chosen = nullptr;
    for (const auto& xpu : model.platform.xpus) {
      if (!node.wcet_on(xpu.xpu_type)) continue;
      if (value_of(detail::lp_p(node.node_id, xpu)) > 0.5) {
        chosen = &xpu;
        break;
      }
    }
    if (chosen == nullptr) {
      throw std::runtime_error("solve: external solution assigns no instance to '" +
                               node.node_id + "'");
    }
    const Micros start = std::llround(value_of(detail::lp_s(node.node_id)));
    const Micros finish = std::llround(value_of(detail::lp_f(node.node_id)));
    timetable.entries.push_back(
        {node.node_id, start, finish, chosen->xpu_type, chosen->instance_id});
    timetable.makespan = std::max(timetable.makespan, finish);
  }
  timetable.normalize();

  SolveResult result;
  if (status == "optimal") {
    timetable.optimality = {OptimalityStatus::kProvenOptimal, 0.0};
    result.stats.lower_bound = static_cast<double>(timetable.makespan);
  } else {
    double gap = 1.0;
    if (!std::isnan(bound) && timetable.makespan > 0) {
      gap = std::max(0.0, (static_cast<double>(timetable.makespan) - bound) /
                              static_cast<double>(timetable.makespan));
    }
    timetable.optimality = {gap == 0.0 ? OptimalityStatus::kProvenOptimal
                                       : OptimalityStatus::kGap,
                            gap};
    result.stats.lower_bound = std::isnan(bound) ? 0.0 : bound;
  }
  result.timetable = timetable;
  result.stats.wall_sec = std::chrono::duration<double>(Clock::now() - t0).count();
  return result;
}

}  // namespace

SolveResult solve(const IlpModel& model, const SolveOptions& options) {
  if (options.backend == "internal") {
    Searcher searcher(model, options);
    return searcher.run();
  }
  if (options.backend == "external" || options.backend.rfind("external:", 0) == 0) {
    std::string command;
    if (options.backend.size() > 9) {
      command = options.backend.substr(9);
    } else if (const char* env = std::getenv("XSCHED_EXTERNAL_SOLVER")) {
      command = env;
    }
    if (command.empty()) {
      throw std::invalid_argument(
          "solve: external backend needs a command (backend \"external:<cmd>\" or "
          "XSCHED_EXTERNAL_SOLVER)");
    }
    return solve_external(model, options, command);
  }
  throw std::invalid_argument("solve: unknown backend '" + options.backend + "'");
}

}  // namespace xsched
