#pragma once

#include <limits>
#include <utility>
#include <vector>

namespace xsched {

// Minimal dense LP solver used for branch-and-bound relaxation bounds.
// Problems are small (a few hundred rows/columns), so a two-phase primal
// simplex on a dense tableau is plenty. All variables are >= 0; finite
// upper bounds are handled as extra rows.
struct LinearProgram {
  enum class Sense { kLe, kGe, kEq };

  struct Row {
    std::vector<std::pair<int, double>> terms;  // (variable, coefficient)
    Sense sense = Sense::kLe;
    double rhs = 0.0;
  };

  int num_vars = 0;
  std::vector<double> objective;  // minimize c'x
  std::vector<Row> rows;
  std::vector<double> upper;  // per-var upper bound, +inf if unconstrained

  int add_var(double cost, double ub = std::numeric_limits<double>::infinity());
  void add_row(Row row);
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterLimit };

struct LpSolution {
  LpStatus status = LpStatus::kIterLimit;
  double objective = 0.0;
  std::vector<double> x;
};

// Dantzig pricing with a Bland fallback after long degenerate stretches, so
// the solve terminates on every input. Deterministic for identical input.
// Returns kIterLimit if no optimum was reached within `max_iterations`.
LpSolution solve_lp(const LinearProgram& lp, int max_iterations = 200000);

}  // namespace xsched
