#include "xsched/simplex.hpp"

#include <cmath>

namespace xsched {

int LinearProgram::add_var(double cost, double ub) {
  objective.push_back(cost);
  upper.push_back(ub);
  return num_vars++;
}

void LinearProgram::add_row(Row row) { rows.push_back(std::move(row)); }

namespace {

constexpr double kTol = 1e-9;
constexpr int kBlandAfter = 2000;  // degenerate iterations before Bland kicks in

class Tableau {
 public:
  explicit Tableau(const LinearProgram& lp) {
    // Materialize upper bounds as x_j <= ub rows, then normalize every row
    // to rhs >= 0 and append slack/artificial columns.
    std::vector<LinearProgram::Row> rows = lp.rows;
    for (int j = 0; j < lp.num_vars; ++j) {
      if (std::isfinite(lp.upper[j])) {
        rows.push_back({{{j, 1.0}}, LinearProgram::Sense::kLe, lp.upper[j]});
      }
    }

    n_structural_ = lp.num_vars;
    m_ = static_cast<int>(rows.size());
    int slack_count = 0;
    for (const auto& row : rows) {
      if (row.sense != LinearProgram::Sense::kEq) slack_count++;
    }
    n_total_ = n_structural_ + slack_count;

    tab_.assign(m_, std::vector<double>(n_total_ + m_ + 1, 0.0));
    basis_.assign(m_, -1);

    int next_slack = n_structural_;
    for (int i = 0; i < m_; ++i) {
      const auto& row = rows[i];
      // Flipping >= rows with rhs 0 into <= form gives them a basic slack,
      // which keeps them out of phase 1 entirely.
      const bool flip =
          row.rhs < 0.0 || (row.rhs == 0.0 && row.sense == LinearProgram::Sense::kGe);
      const double sign = flip ? -1.0 : 1.0;
      for (const auto& [var, coef] : row.terms) tab_[i][var] += sign * coef;
      rhs(i) = sign * row.rhs;

      LinearProgram::Sense sense = row.sense;
      if (sign < 0.0) {
        if (sense == LinearProgram::Sense::kLe) sense = LinearProgram::Sense::kGe;
        else if (sense == LinearProgram::Sense::kGe) sense = LinearProgram::Sense::kLe;
      }
      if (sense == LinearProgram::Sense::kLe) {
        tab_[i][next_slack] = 1.0;
        basis_[i] = next_slack++;
      } else if (sense == LinearProgram::Sense::kGe) {
        tab_[i][next_slack++] = -1.0;
      }
      if (basis_[i] < 0) {
        const int art = n_total_ + num_artificials_++;
        tab_[i][art] = 1.0;
        basis_[i] = art;
      }
    }
    n_with_artificials_ = n_total_ + num_artificials_;
  }

  LpSolution solve(const LinearProgram& lp, int max_iterations) {
    LpSolution solution;
    max_iterations_ = max_iterations;

    if (num_artificials_ > 0) {
      std::vector<double> phase1(n_with_artificials_, 0.0);
      for (int j = n_total_; j < n_with_artificials_; ++j) phase1[j] = 1.0;
      const LpStatus status = optimize(phase1, /*allow_artificials=*/true);
      if (status == LpStatus::kIterLimit) {
        solution.status = status;
        return solution;
      }
      if (objective_value(phase1) > 1e-7) {
        solution.status = LpStatus::kInfeasible;
        return solution;
      }
      drive_out_artificials();
    }

    std::vector<double> costs(n_with_artificials_, 0.0);
    for (int j = 0; j < n_structural_; ++j) costs[j] = lp.objective[j];
    solution.status = optimize(costs, /*allow_artificials=*/false);
    if (solution.status != LpStatus::kOptimal) return solution;

    solution.x.assign(n_structural_, 0.0);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_structural_) solution.x[basis_[i]] = rhs(i);
    }
    solution.objective = 0.0;
    for (int j = 0; j < n_structural_; ++j) {
      solution.objective += lp.objective[j] * solution.x[j];
    }
    return solution;
  }

 private:
  double& rhs(int i) { return tab_[i][n_total_ + m_]; }
  double rhs(int i) const { return tab_[i][n_total_ + m_]; }

  double objective_value(const std::vector<double>& costs) const {
    double value = 0.0;
    for (int i = 0; i < m_; ++i) value += costs[basis_[i]] * rhs(i);
    return value;
  }

  // Reduced cost of column j under the current basis.
  double reduced_cost(const std::vector<double>& costs, int j) const {
    double value = costs[j];
    for (int i = 0; i < m_; ++i) value -= costs[basis_[i]] * tab_[i][j];
    return value;
  }

  void pivot(int row, int col) {
    const double p = tab_[row][col];
    for (double& v : tab_[row]) v /= p;
    for (int i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double factor = tab_[i][col];
      if (factor == 0.0) continue;
      for (int j = 0; j <= n_total_ + m_; ++j) tab_[i][j] -= factor * tab_[row][j];
    }
    basis_[row] = col;
  }

  LpStatus optimize(const std::vector<double>& costs, bool allow_artificials) {
    const int limit = allow_artificials ? n_with_artificials_ : n_total_;
    int degenerate_streak = 0;
    for (int iter = 0; iter < max_iterations_; ++iter) {
      // Pricing: Dantzig normally, Bland once progress stalls.
      const bool bland = degenerate_streak > kBlandAfter;
      int entering = -1;
      double best = -kTol;
      for (int j = 0; j < limit; ++j) {
        const double rc = reduced_cost(costs, j);
        if (rc < -kTol) {
          if (bland) {
            entering = j;
            break;
          }
          if (rc < best) {
            best = rc;
            entering = j;
          }
        }
      }
      if (entering < 0) return LpStatus::kOptimal;

      int leaving = -1;
      double best_ratio = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double a = tab_[i][entering];
        if (a <= kTol) continue;
        const double ratio = rhs(i) / a;
        if (leaving < 0 || ratio < best_ratio - kTol ||
            (ratio < best_ratio + kTol && basis_[i] < basis_[leaving])) {
          leaving = i;
          best_ratio = ratio;
        }
      }
      if (leaving < 0) return LpStatus::kUnbounded;

      degenerate_streak = best_ratio < kTol ? degenerate_streak + 1 : 0;
      pivot(leaving, entering);
    }
    return LpStatus::kIterLimit;
  }

  // After phase 1, replace basic artificials (all at value zero) by any
  // structural or slack column, or accept the row as redundant.
  void drive_out_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_total_) continue;
      int col = -1;
      for (int j = 0; j < n_total_; ++j) {
        if (std::abs(tab_[i][j]) > kTol) {
          col = j;
          break;
        }
      }
      if (col >= 0) pivot(i, col);
    }
  }

  int m_ = 0;
  int n_structural_ = 0;
  int n_total_ = 0;  // structural + slack columns
  int num_artificials_ = 0;
  int n_with_artificials_ = 0;
  int max_iterations_ = 0;
  std::vector<std::vector<double>> tab_;
  std::vector<int> basis_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, int max_iterations) {
  Tableau tableau(lp);
  return tableau.solve(lp, max_iterations);
}

}  // namespace xsched
