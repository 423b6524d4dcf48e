#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "peakshaver/errors.hpp"
#include "peakshaver/lp.hpp"

namespace peakshaver::lp {

namespace {

// Computational form: columns 0..n-1 are structurals, n..n+m-1 are row
// logicals with A x - s = 0 and row bounds moved onto s. The initial basis is
// the logical one (B = -I).
class RevisedSimplex {
 public:
  RevisedSimplex(const LpProblem& problem, const SimplexOptions& options);

  LpSolution run();

 private:
  enum class Status : std::uint8_t { Basic, AtLower, AtUpper, AtZero };
  enum class Outcome : std::uint8_t { Optimal, Infeasible, Unbounded };

  struct Eta {
    int pivot_row = 0;
    double pivot = 1.0;
    std::vector<int> index;
    std::vector<double> value;
  };

  Outcome iterate(bool restricted);
  void refactor();
  void recompute_basics();
  void ftran(Eigen::VectorXd& v) const;
  void btran(Eigen::VectorXd& v) const;
  double column_dot(int j, const Eigen::VectorXd& y) const;
  void load_column(int j, Eigen::VectorXd& out) const;
  bool has_infeasible_basic() const;
  double max_basic_infeasibility() const;
  bool is_boxed(int j) const { return std::isfinite(lb_[j]) && std::isfinite(ub_[j]); }

  const LpProblem& problem_;
  SimplexOptions options_;
  int n_ = 0;
  int m_ = 0;
  int total_ = 0;

  // CSC copy of the structural matrix.
  std::vector<int> col_start_;
  std::vector<int> row_index_;
  std::vector<double> value_;

  std::vector<double> lb_, ub_, cost_;
  std::vector<double> work_cost_;  // objective currently being minimized
  std::vector<std::uint8_t> frozen_;
  std::vector<double> x_;
  std::vector<Status> status_;
  std::vector<int> head_;  // basic variable at each basis position
  std::vector<int> pos_;   // basis position of a variable or -1

  // transpose() on SparseLU is non-const.
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
  int iterations_ = 0;
  int max_iterations_ = 0;
};

RevisedSimplex::RevisedSimplex(const LpProblem& problem, const SimplexOptions& options)
    : problem_(problem), options_(options) {
  n_ = problem.num_vars();
  m_ = problem.num_rows();
  total_ = n_ + m_;

  std::vector<int> counts(static_cast<std::size_t>(n_) + 1, 0);
  for (const Row& row : problem.rows()) {
    for (const Term& t : row.terms) ++counts[static_cast<std::size_t>(t.var.index) + 1];
  }
  col_start_.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (int j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + counts[j + 1];
  row_index_.resize(static_cast<std::size_t>(col_start_[n_]));
  value_.resize(row_index_.size());
  std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
  for (int i = 0; i < m_; ++i) {
    for (const Term& t : problem.rows()[i].terms) {
      const int k = fill[t.var.index]++;
      row_index_[k] = i;
      value_[k] = t.coef;
    }
  }

  lb_.resize(total_);
  ub_.resize(total_);
  cost_.assign(total_, 0.0);
  for (int j = 0; j < n_; ++j) {
    lb_[j] = problem.lower()[j];
    ub_[j] = problem.upper()[j];
    cost_[j] = problem.objective()[j];
  }
  for (int i = 0; i < m_; ++i) {
    const Row& row = problem.rows()[i];
    ub_[n_ + i] = row.rhs;
    lb_[n_ + i] = row.sense == RowSense::Equal ? row.rhs : -kInf;
  }

  x_.assign(total_, 0.0);
  status_.resize(total_);
  pos_.assign(total_, -1);
  for (int j = 0; j < n_; ++j) {
    if (std::isfinite(lb_[j])) {
      x_[j] = lb_[j];
      status_[j] = Status::AtLower;
    } else if (std::isfinite(ub_[j])) {
      x_[j] = ub_[j];
      status_[j] = Status::AtUpper;
    } else {
      status_[j] = Status::AtZero;
    }
  }
  head_.resize(m_);
  for (int i = 0; i < m_; ++i) {
    head_[i] = n_ + i;
    pos_[n_ + i] = i;
    status_[n_ + i] = Status::Basic;
  }
  frozen_.assign(total_, 0);
  max_iterations_ = options_.max_iterations > 0 ? options_.max_iterations : 50 * (total_ + 10) + 10000;
}

void RevisedSimplex::load_column(int j, Eigen::VectorXd& out) const {
  out.setZero(m_);
  if (j < n_) {
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) out[row_index_[k]] = value_[k];
  } else {
    out[j - n_] = -1.0;
  }
}

double RevisedSimplex::column_dot(int j, const Eigen::VectorXd& y) const {
  if (j >= n_) return -y[j - n_];
  double s = 0.0;
  for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) s += value_[k] * y[row_index_[k]];
  return s;
}

void RevisedSimplex::refactor() {
  etas_.clear();
  if (m_ == 0) return;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(m_) * 3);
  for (int r = 0; r < m_; ++r) {
    const int j = head_[r];
    if (j < n_) {
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
        triplets.emplace_back(row_index_[k], r, value_[k]);
      }
    } else {
      triplets.emplace_back(j - n_, r, -1.0);
    }
  }
  Eigen::SparseMatrix<double> basis(m_, m_);
  basis.setFromTriplets(triplets.begin(), triplets.end());
  basis.makeCompressed();
  lu_.analyzePattern(basis);
  lu_.factorize(basis);
  if (lu_.info() != Eigen::Success) {
    throw InternalError("simplex basis factorization failed: " + lu_.lastErrorMessage());
  }
}

void RevisedSimplex::ftran(Eigen::VectorXd& v) const {
  if (m_ == 0) return;
  v = lu_.solve(v).eval();
  for (const Eta& e : etas_) {
    const double xp = v[e.pivot_row] / e.pivot;
    v[e.pivot_row] = xp;
    if (xp == 0.0) continue;
    for (std::size_t k = 0; k < e.index.size(); ++k) v[e.index[k]] -= e.value[k] * xp;
  }
}

void RevisedSimplex::btran(Eigen::VectorXd& v) const {
  if (m_ == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = v[it->pivot_row];
    for (std::size_t k = 0; k < it->index.size(); ++k) s -= it->value[k] * v[it->index[k]];
    v[it->pivot_row] = s / it->pivot;
  }
  v = lu_.transpose().solve(v).eval();
}

void RevisedSimplex::recompute_basics() {
  if (m_ == 0) return;
  // B x_B = -N x_N
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
  for (int j = 0; j < total_; ++j) {
    if (status_[j] == Status::Basic || x_[j] == 0.0) continue;
    if (j < n_) {
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) rhs[row_index_[k]] -= value_[k] * x_[j];
    } else {
      rhs[j - n_] += x_[j];
    }
  }
  ftran(rhs);
  for (int r = 0; r < m_; ++r) x_[head_[r]] = rhs[r];
}

double RevisedSimplex::max_basic_infeasibility() const {
  double worst = 0.0;
  for (int r = 0; r < m_; ++r) {
    const int j = head_[r];
    worst = std::max({worst, lb_[j] - x_[j], x_[j] - ub_[j]});
  }
  return worst;
}

bool RevisedSimplex::has_infeasible_basic() const {
  return max_basic_infeasibility() > options_.primal_tolerance;
}

// One simplex run until optimality of the current objective. While basic
// variables are infeasible a composite phase-1 cost (sum of infeasibilities)
// replaces work_cost_. `restricted` limits entering candidates to non-frozen
// columns (optimal-face search for the tie-break objective).
RevisedSimplex::Outcome RevisedSimplex::iterate(bool restricted) {
  const double ptol = options_.primal_tolerance;
  const double dtol = options_.dual_tolerance;
  Eigen::VectorXd y(m_), alpha(m_);
  std::vector<double> phase_cost(static_cast<std::size_t>(m_));
  int degenerate_run = 0;

  while (true) {
    if (++iterations_ > max_iterations_) throw InternalError("simplex iteration limit reached");
    if (static_cast<int>(etas_.size()) >= options_.refactor_interval) {
      refactor();
      recompute_basics();
    }

    // Basic costs: phase 1 while infeasible, otherwise the working objective.
    bool phase1 = false;
    for (int r = 0; r < m_; ++r) {
      const int j = head_[r];
      if (x_[j] < lb_[j] - ptol) {
        phase_cost[r] = -1.0;
        phase1 = true;
      } else if (x_[j] > ub_[j] + ptol) {
        phase_cost[r] = 1.0;
        phase1 = true;
      } else {
        phase_cost[r] = 0.0;
      }
    }
    for (int r = 0; r < m_; ++r) y[r] = phase1 ? phase_cost[r] : work_cost_[head_[r]];
    btran(y);

    // Pricing.
    const bool bland = degenerate_run >= options_.degenerate_switch;
    int entering = -1;
    double best = 0.0;
    int direction = 0;
    for (int j = 0; j < total_; ++j) {
      const Status st = status_[j];
      if (st == Status::Basic || (restricted && frozen_[j])) continue;
      if (lb_[j] == ub_[j]) continue;
      const double d = (phase1 ? 0.0 : work_cost_[j]) - column_dot(j, y);
      int dir = 0;
      if (d < -dtol && (st == Status::AtLower || st == Status::AtZero)) dir = 1;
      if (d > dtol && (st == Status::AtUpper || st == Status::AtZero)) dir = -1;
      if (dir == 0) continue;
      if (bland) {
        entering = j;
        direction = dir;
        break;
      }
      if (std::abs(d) > best) {
        best = std::abs(d);
        entering = j;
        direction = dir;
      }
    }
    if (entering < 0) return phase1 ? Outcome::Infeasible : Outcome::Optimal;

    load_column(entering, alpha);
    ftran(alpha);

    // Ratio test (Harris two-pass; exact minimum with index tie-break under Bland).
    double bound_relaxed = kInf;
    for (int r = 0; r < m_; ++r) {
      const double g = -direction * alpha[r];
      if (std::abs(g) <= options_.pivot_tolerance) continue;
      const int j = head_[r];
      const double x = x_[j];
      double limit = kInf;
      if (g < 0.0) {
        if (x > ub_[j] + ptol) {
          limit = (x - ub_[j] + ptol) / -g;
        } else if (x >= lb_[j] - ptol && std::isfinite(lb_[j])) {
          limit = (x - lb_[j] + ptol) / -g;
        }
      } else {
        if (x < lb_[j] - ptol) {
          limit = (lb_[j] - x + ptol) / g;
        } else if (x <= ub_[j] + ptol && std::isfinite(ub_[j])) {
          limit = (ub_[j] - x + ptol) / g;
        }
      }
      bound_relaxed = std::min(bound_relaxed, limit);
    }

    int leave_pos = -1;
    double step = kInf;
    double leave_value = 0.0;
    double best_pivot = 0.0;
    for (int r = 0; r < m_; ++r) {
      const double g = -direction * alpha[r];
      if (std::abs(g) <= options_.pivot_tolerance) continue;
      const int j = head_[r];
      const double x = x_[j];
      double target = 0.0;
      bool limited = false;
      if (g < 0.0) {
        if (x > ub_[j] + ptol) {
          target = ub_[j];
          limited = true;
        } else if (x >= lb_[j] - ptol && std::isfinite(lb_[j])) {
          target = lb_[j];
          limited = true;
        }
      } else {
        if (x < lb_[j] - ptol) {
          target = lb_[j];
          limited = true;
        } else if (x <= ub_[j] + ptol && std::isfinite(ub_[j])) {
          target = ub_[j];
          limited = true;
        }
      }
      if (!limited) continue;
      const double ratio = std::max(0.0, (target - x) / g);
      if (bland) {
        if (ratio < step - 1e-12 || (ratio <= step + 1e-12 && leave_pos >= 0 && j < head_[leave_pos])) {
          step = ratio;
          leave_pos = r;
          leave_value = target;
        }
      } else if (ratio <= bound_relaxed && std::abs(g) > best_pivot) {
        best_pivot = std::abs(g);
        leave_pos = r;
        leave_value = target;
        step = ratio;
      }
    }

    const double flip = is_boxed(entering) ? ub_[entering] - lb_[entering] : kInf;
    const bool do_flip = flip <= step;
    if (do_flip) step = flip;
    if (!std::isfinite(step)) {
      if (phase1) throw InternalError("simplex phase 1 found an unbounded direction");
      return Outcome::Unbounded;
    }

    degenerate_run = step <= 1e-12 ? degenerate_run + 1 : 0;

    for (int r = 0; r < m_; ++r) {
      if (alpha[r] != 0.0) x_[head_[r]] -= direction * step * alpha[r];
    }
    if (do_flip) {
      const bool to_upper = direction > 0;
      x_[entering] = to_upper ? ub_[entering] : lb_[entering];
      status_[entering] = to_upper ? Status::AtUpper : Status::AtLower;
      continue;
    }
    x_[entering] += direction * step;

    const int leaving = head_[leave_pos];
    x_[leaving] = leave_value;
    status_[leaving] = leave_value == ub_[leaving] && lb_[leaving] != ub_[leaving] ? Status::AtUpper
                                                                                    : Status::AtLower;
    pos_[leaving] = -1;
    head_[leave_pos] = entering;
    pos_[entering] = leave_pos;
    status_[entering] = Status::Basic;

    Eta eta;
    eta.pivot_row = leave_pos;
    eta.pivot = alpha[leave_pos];
    for (int r = 0; r < m_; ++r) {
      if (r != leave_pos && alpha[r] != 0.0) {
        eta.index.push_back(r);
        eta.value.push_back(alpha[r]);
      }
    }
    etas_.push_back(std::move(eta));
  }
}

LpSolution RevisedSimplex::run() {
  LpSolution solution;
  refactor();
  recompute_basics();
  work_cost_ = cost_;

  // Re-run after a fresh factorization until the recomputed point is clean.
  Outcome outcome = Outcome::Optimal;
  for (int attempt = 0; attempt < 5; ++attempt) {
    outcome = iterate(false);
    if (outcome != Outcome::Optimal) break;
    refactor();
    recompute_basics();
    if (!has_infeasible_basic()) break;
  }

  if (outcome == Outcome::Optimal && !problem_.tie_break().empty()) {
    Eigen::VectorXd y(m_);
    for (int r = 0; r < m_; ++r) y[r] = cost_[head_[r]];
    btran(y);
    for (int j = 0; j < total_; ++j) {
      if (status_[j] == Status::Basic) continue;
      const double d = cost_[j] - column_dot(j, y);
      frozen_[j] = std::abs(d) > options_.dual_tolerance ? 1 : 0;
    }
    work_cost_.assign(total_, 0.0);
    for (const Term& t : problem_.tie_break()) work_cost_[t.var.index] = t.coef;
    // The face search can only fail on an unbounded secondary objective; the
    // primary optimum found above stays valid in that case.
    const auto saved_x = x_;
    const auto saved_status = status_;
    const auto saved_head = head_;
    const auto saved_pos = pos_;
    if (iterate(true) != Outcome::Optimal) {
      x_ = saved_x;
      status_ = saved_status;
      head_ = saved_head;
      pos_ = saved_pos;
    }
    refactor();
    recompute_basics();
  }

  solution.iterations = iterations_;
  switch (outcome) {
    case Outcome::Infeasible: solution.status = SolveStatus::Infeasible; return solution;
    case Outcome::Unbounded: solution.status = SolveStatus::Unbounded; return solution;
    case Outcome::Optimal: break;
  }
  solution.status = SolveStatus::Optimal;
  solution.values.assign(x_.begin(), x_.begin() + n_);
  for (int j = 0; j < n_; ++j) {
    solution.values[j] = std::clamp(solution.values[j], lb_[j], ub_[j]);
  }
  solution.objective_value = objective_value(problem_, solution.values);
  return solution;
}

}  // namespace

LpSolution SimplexSolver::solve(const LpProblem& problem) const {
  RevisedSimplex simplex(problem, options_);
  return simplex.run();
}

}  // namespace peakshaver::lp
