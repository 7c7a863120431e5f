#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

#include "ilp_names.hpp"
#include "xsched/ilp.hpp"

namespace xsched {

namespace {

// Tri-state of an order indicator once precedence is folded in.
enum class Indicator { kFalse, kTrue, kVar };

// b1[i,k] <=> s_i <= s_k.
Indicator b1_state(const IlpModel& model, int i, int k) {
  if (i == k || model.reaches[i][k]) return Indicator::kTrue;
  if (model.reaches[k][i]) return Indicator::kFalse;
  return Indicator::kVar;
}

// b2[j,k] <=> f_j >= f_k.
Indicator b2_state(const IlpModel& model, int j, int k) {
  if (j == k || model.reaches[k][j]) return Indicator::kTrue;
  if (model.reaches[j][k]) return Indicator::kFalse;
  return Indicator::kVar;
}

// c[i,j] <=> s_i <= f_j. Windows with j preceding i are never materialized.
Indicator c_state(const IlpModel& model, int i, int j) {
  if (i == j || model.reaches[i][j]) return Indicator::kTrue;
  return Indicator::kVar;
}

bool window_possible(const IlpModel& model, int i, int j) {
  return i == j || !model.reaches[j][i];
}

bool demand_possible(const IlpModel& model, int i, int j, int k, int m) {
  if (model.wcet[i][m] < 0 || model.wcet[j][m] < 0 || model.wcet[k][m] < 0) return false;
  if (!window_possible(model, i, j)) return false;
  // k can only contribute if it can lie fully inside [s_i, f_j].
  if (k != i && model.reaches[k][i]) return false;
  if (k != j && model.reaches[j][k]) return false;
  return true;
}

// Calls fn(i, j, m, ks) for every materialized window, ks being the demand
// contributors on instance m.
template <typename Fn>
void for_each_window(const IlpModel& model, Fn&& fn) {
  const int n = static_cast<int>(model.graph.nodes.size());
  const int m = static_cast<int>(model.platform.xpus.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!window_possible(model, i, j)) continue;
      for (int mi = 0; mi < m; ++mi) {
        std::vector<int> ks;
        for (int k = 0; k < n; ++k) {
          if (demand_possible(model, i, j, k, mi)) ks.push_back(k);
        }
        if (!ks.empty()) fn(i, j, mi, ks);
      }
    }
  }
}

}  // namespace

IlpModel::Stats IlpModel::stats() const {
  Stats stats;
  const int n = static_cast<int>(graph.nodes.size());

  for (int i = 0; i < n; ++i) {
    for (std::size_t mi = 0; mi < platform.xpus.size(); ++mi) {
      if (wcet[i][mi] >= 0) stats.p_vars++;
    }
  }
  stats.constraints += n;                                   // (1) assignment
  stats.constraints += static_cast<std::int64_t>(graph.edges.size());  // (2)
  stats.constraints += stats.p_vars;                        // (3) span per impl
  stats.constraints += n;                                   // (6) Z >= f_i

  std::set<std::pair<int, int>> b1_vars, b2_vars, c_vars;
  for_each_window(*this, [&](int i, int j, int mi, const std::vector<int>& ks) {
    (void)mi;
    stats.d_vars += static_cast<std::int64_t>(ks.size());
    stats.constraints += static_cast<std::int64_t>(ks.size());  // (4)
    stats.constraints += 1;                                     // (5)
    if (c_state(*this, i, j) == Indicator::kVar) c_vars.insert({i, j});
    for (int k : ks) {
      if (b1_state(*this, i, k) == Indicator::kVar) b1_vars.insert({i, k});
      if (b2_state(*this, j, k) == Indicator::kVar) b2_vars.insert({j, k});
    }
  });
  stats.b1_vars = static_cast<std::int64_t>(b1_vars.size());
  stats.b2_vars = static_cast<std::int64_t>(b2_vars.size());
  stats.c_vars = static_cast<std::int64_t>(c_vars.size());
  // One linking row per order indicator.
  stats.constraints += stats.b1_vars + stats.b2_vars + stats.c_vars;

  // Symmetry breaking: per node and per non-first member of its usable
  // groups.
  for (const auto& group : instance_groups) {
    if (group.size() < 2) continue;
    for (int i = 0; i < n; ++i) {
      if (wcet[i][group[0]] < 0) continue;
      stats.constraints += static_cast<std::int64_t>(group.size()) - 1;
    }
  }
  if (deadline) stats.constraints += 1;
  return stats;
}

IlpModel build_model(const ApplicationGraph& graph, const PlatformConfig& platform,
                     const IlpBuildOptions& options) {
  IlpModel model;
  model.graph = graph;
  model.graph.normalize();
  model.platform = platform;
  model.platform.normalize();
  model.deadline = options.deadline;

  if (auto report = validate(model.graph); !report.valid()) {
    throw std::invalid_argument("build_model: invalid graph: " + report.to_string());
  }
  if (auto report = validate(model.platform); !report.valid()) {
    throw std::invalid_argument("build_model: invalid platform: " + report.to_string());
  }

  const int n = static_cast<int>(model.graph.nodes.size());
  const int m = static_cast<int>(model.platform.xpus.size());

  model.wcet.assign(n, std::vector<Micros>(m, -1));
  for (int i = 0; i < n; ++i) {
    const XNodeSpec& node = model.graph.nodes[i];
    bool usable = false;
    for (int mi = 0; mi < m; ++mi) {
      if (auto w = node.wcet_on(model.platform.xpus[mi].xpu_type)) {
        model.wcet[i][mi] = *w;
        usable = true;
      }
    }
    if (!usable) {
      throw std::invalid_argument("build_model: node '" + node.node_id +
                                  "' has no impl for any platform class");
    }
    Micros max_wcet = 0;
    for (int mi = 0; mi < m; ++mi) max_wcet = std::max(max_wcet, model.wcet[i][mi]);
    model.horizon += max_wcet;
  }

  std::map<std::string, int> index_of;
  for (int i = 0; i < n; ++i) index_of[model.graph.nodes[i].node_id] = i;
  model.reaches.assign(n, std::vector<bool>(n, false));
  for (const auto& [from, to] : model.graph.edges) {
    model.reaches[index_of[from]][index_of[to]] = true;
  }
  for (const std::string& mid_id : topo_order(model.graph)) {
    const int mid = index_of[mid_id];
    for (int u = 0; u < n; ++u) {
      if (!model.reaches[u][mid]) continue;
      for (int v = 0; v < n; ++v) {
        if (model.reaches[mid][v]) model.reaches[u][v] = true;
      }
    }
  }

  // Identical instances are interchangeable for the model.
  std::map<std::tuple<XpuType, bool, Micros, Micros, Micros>, std::vector<int>> groups;
  for (int mi = 0; mi < m; ++mi) {
    const XpuInstance& xpu = model.platform.xpus[mi];
    groups[{xpu.xpu_type, xpu.preemptive, xpu.preempt_overhead, xpu.restore_overhead,
            xpu.rr_quantum}]
        .push_back(mi);
  }
  std::vector<std::vector<int>> ordered;
  for (auto& [key, members] : groups) ordered.push_back(std::move(members));
  std::sort(ordered.begin(), ordered.end());
  model.instance_groups = std::move(ordered);

  return model;
}

std::string export_lp(const IlpModel& model) {
  using detail::lp_b1;
  using detail::lp_b2;
  using detail::lp_c;
  using detail::lp_d;
  using detail::lp_f;
  using detail::lp_p;
  using detail::lp_s;
  using detail::lp_sanitize;

  const int n = static_cast<int>(model.graph.nodes.size());
  const int m = static_cast<int>(model.platform.xpus.size());
  const Micros big_m = model.horizon;
  auto node_id = [&](int i) -> const std::string& {
    return model.graph.nodes[i].node_id;
  };
  auto xpu = [&](int mi) -> const XpuInstance& { return model.platform.xpus[mi]; };

  std::string out;
  out += "\\ Joint assignment + schedulability model, makespan objective\n";
  out += "\\ horizon " + std::to_string(model.horizon) + " us, epsilon " +
         std::to_string(model.epsilon) + " us\n";
  out += "Minimize\n obj: Z\nSubject To\n";

  // Rows accumulate integer coefficients per variable so repeated variables
  // (for example k == i in a demand row) merge correctly.
  struct RowBuf {
    std::vector<std::pair<std::string, Micros>> terms;
    std::map<std::string, std::size_t> index;
    void add(const std::string& var, Micros coef) {
      auto [it, fresh] = index.emplace(var, terms.size());
      if (fresh) {
        terms.push_back({var, coef});
      } else {
        terms[it->second].second += coef;
      }
    }
  };
  auto write_row = [&out](const std::string& name, const RowBuf& row, const char* rel,
                          Micros rhs) {
    out += ' ' + name + ':';
    bool first = true;
    for (const auto& [var, coef] : row.terms) {
      if (coef == 0) continue;
      if (coef < 0) {
        out += " - ";
      } else {
        out += first ? " " : " + ";
      }
      const Micros mag = coef < 0 ? -coef : coef;
      if (mag != 1) out += std::to_string(mag) + ' ';
      out += var;
      first = false;
    }
    if (first) out += " 0 Z";  // degenerate row; does not occur in practice
    out += std::string(" ") + rel + ' ' + std::to_string(rhs) + '\n';
  };

  for (int i = 0; i < n; ++i) {
    RowBuf row;
    for (int mi = 0; mi < m; ++mi) {
      if (model.wcet[i][mi] >= 0) row.add(lp_p(node_id(i), xpu(mi)), 1);
    }
    write_row("assign_" + lp_sanitize(node_id(i)), row, "=", 1);
  }

  for (const auto& [from, to] : model.graph.edges) {
    RowBuf row;
    row.add(lp_f(from), 1);
    row.add(lp_s(to), -1);
    write_row("prec_" + lp_sanitize(from) + "_" + lp_sanitize(to), row, "<=", 0);
  }

  // (3): f_i - s_i - H p[i,m] >= wcet - H.
  for (int i = 0; i < n; ++i) {
    for (int mi = 0; mi < m; ++mi) {
      if (model.wcet[i][mi] < 0) continue;
      RowBuf row;
      row.add(lp_f(node_id(i)), 1);
      row.add(lp_s(node_id(i)), -1);
      row.add(lp_p(node_id(i), xpu(mi)), -big_m);
      write_row("span_" + lp_sanitize(node_id(i)) + "_" + lp_sanitize(xpu(mi).label()),
                row, ">=", model.wcet[i][mi] - big_m);
    }
  }

  // Order indicators, collected while walking the windows.
  std::set<std::pair<int, int>> b1_vars, b2_vars, c_vars;
  for_each_window(model, [&](int i, int j, int mi, const std::vector<int>& ks) {
    RowBuf window_row;  // (5)
    Micros window_rhs = 0;
    for (int k : ks) {
      // (4): d - H(p_i + p_j + p_k) - H b1 - H b2 >= wcet_k - 5H, with
      // constant-true indicators folded into the right-hand side.
      RowBuf row;
      Micros rhs = model.wcet[k][mi];
      row.add(lp_d(node_id(i), node_id(j), node_id(k), xpu(mi)), 1);
      row.add(lp_p(node_id(i), xpu(mi)), -big_m);
      row.add(lp_p(node_id(j), xpu(mi)), -big_m);
      row.add(lp_p(node_id(k), xpu(mi)), -big_m);
      rhs -= 3 * big_m;
      if (b1_state(model, i, k) == Indicator::kVar) {
        b1_vars.insert({i, k});
        row.add(lp_b1(node_id(i), node_id(k)), -big_m);
        rhs -= big_m;
      }
      if (b2_state(model, j, k) == Indicator::kVar) {
        b2_vars.insert({j, k});
        row.add(lp_b2(node_id(j), node_id(k)), -big_m);
        rhs -= big_m;
      }
      write_row("demand_" + lp_sanitize(node_id(i)) + "_" + lp_sanitize(node_id(j)) +
                    "_" + lp_sanitize(node_id(k)) + "_" + lp_sanitize(xpu(mi).label()),
                row, ">=", rhs);
      window_row.add(lp_d(node_id(i), node_id(j), node_id(k), xpu(mi)), 1);
    }
    // (5): sum_k d <= f_j - s_i + H(1 - c).
    window_row.add(lp_f(node_id(j)), -1);
    window_row.add(lp_s(node_id(i)), 1);
    if (c_state(model, i, j) == Indicator::kVar) {
      c_vars.insert({i, j});
      window_row.add(lp_c(node_id(i), node_id(j)), big_m);
      window_rhs += big_m;
    }
    write_row("window_" + lp_sanitize(node_id(i)) + "_" + lp_sanitize(node_id(j)) +
                  "_" + lp_sanitize(xpu(mi).label()),
              window_row, "<=", window_rhs);
  });

  // Indicator links: the binary may be 0 only when the strict complement
  // holds, on the 1 us grid.
  for (const auto& [i, k] : b1_vars) {
    RowBuf row;
    row.add(lp_s(node_id(i)), 1);
    row.add(lp_s(node_id(k)), -1);
    row.add(lp_b1(node_id(i), node_id(k)), big_m);
    write_row("ord_s_" + lp_sanitize(node_id(i)) + "_" + lp_sanitize(node_id(k)), row,
              ">=", model.epsilon);
  }
  for (const auto& [j, k] : b2_vars) {
    RowBuf row;
    row.add(lp_f(node_id(k)), 1);
    row.add(lp_f(node_id(j)), -1);
    row.add(lp_b2(node_id(j), node_id(k)), big_m);
    write_row("ord_f_" + lp_sanitize(node_id(j)) + "_" + lp_sanitize(node_id(k)), row,
              ">=", model.epsilon);
  }
  for (const auto& [i, j] : c_vars) {
    RowBuf row;
    row.add(lp_s(node_id(i)), 1);
    row.add(lp_f(node_id(j)), -1);
    row.add(lp_c(node_id(i), node_id(j)), big_m);
    write_row("span_order_" + lp_sanitize(node_id(i)) + "_" + lp_sanitize(node_id(j)),
              row, ">=", model.epsilon);
  }

  for (int i = 0; i < n; ++i) {
    RowBuf row;
    row.add("Z", 1);
    row.add(lp_f(node_id(i)), -1);
    write_row("z_" + lp_sanitize(node_id(i)), row, ">=", 0);
  }
  if (model.deadline) {
    RowBuf row;
    row.add("Z", 1);
    write_row("deadline", row, "<=", *model.deadline);
  }

  // Symmetry breaking over identical instances: member r may be used by
  // node i only if an earlier node uses member r-1.
  for (const auto& group : model.instance_groups) {
    if (group.size() < 2) continue;
    for (int i = 0; i < n; ++i) {
      if (model.wcet[i][group[0]] < 0) continue;
      for (std::size_t r = 1; r < group.size(); ++r) {
        RowBuf row;
        row.add(lp_p(node_id(i), xpu(group[r])), 1);
        for (int prev = 0; prev < i; ++prev) {
          if (model.wcet[prev][group[r - 1]] < 0) continue;
          row.add(lp_p(node_id(prev), xpu(group[r - 1])), -1);
        }
        write_row("sym_" + lp_sanitize(node_id(i)) + "_" +
                      lp_sanitize(xpu(group[r]).label()),
                  row, "<=", 0);
      }
    }
  }

  out += "Bounds\n";
  for (int i = 0; i < n; ++i) {
    out += ' ' + lp_s(node_id(i)) + " <= " + std::to_string(model.horizon) + '\n';
    out += ' ' + lp_f(node_id(i)) + " <= " + std::to_string(model.horizon) + '\n';
  }
  for_each_window(model, [&](int i, int j, int mi, const std::vector<int>& ks) {
    for (int k : ks) {
      out += ' ' + lp_d(node_id(i), node_id(j), node_id(k), xpu(mi)) +
             " <= " + std::to_string(model.horizon) + '\n';
    }
  });
  out += " Z <= " + std::to_string(model.horizon) + '\n';

  out += "Binaries\n";
  for (int i = 0; i < n; ++i) {
    for (int mi = 0; mi < m; ++mi) {
      if (model.wcet[i][mi] >= 0) out += ' ' + lp_p(node_id(i), xpu(mi)) + '\n';
    }
  }
  for (const auto& [i, k] : b1_vars) out += ' ' + lp_b1(node_id(i), node_id(k)) + '\n';
  for (const auto& [j, k] : b2_vars) out += ' ' + lp_b2(node_id(j), node_id(k)) + '\n';
  for (const auto& [i, j] : c_vars) out += ' ' + lp_c(node_id(i), node_id(j)) + '\n';
  out += "End\n";
  return out;
}

}  // namespace xsched
