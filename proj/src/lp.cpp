#include "peakshaver/lp.hpp"

#include <algorithm>
#include <cmath>

#include "peakshaver/errors.hpp"

namespace peakshaver::lp {

namespace {

void sort_and_merge(std::vector<Term>& terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.var.index < b.var.index; });
  std::vector<Term> merged;
  merged.reserve(terms.size());
  for (const Term& t : terms) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  terms = std::move(merged);
}

}  // namespace

// --------------------------------------------------------------- LpProblem

std::optional<VarId> LpProblem::find(std::string_view name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return VarId{it->second};
}

VarId LpProblem::var(std::string_view name) const {
  if (auto v = find(name)) return *v;
  throw DomainError("unknown LP variable '" + std::string(name) + "'");
}

LpProblem LpProblem::with_bounds(std::string_view name, double lower, double upper) const {
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    throw DomainError("invalid bounds for '" + std::string(name) + "'");
  }
  LpProblem copy = *this;
  const auto i = static_cast<std::size_t>(var(name).index);
  copy.lower_[i] = lower;
  copy.upper_[i] = upper;
  return copy;
}

LpProblem LpProblem::with_scaled_objective(double factor) const {
  if (!std::isfinite(factor)) throw DomainError("objective scale must be finite");
  LpProblem copy = *this;
  for (double& c : copy.cost_) c *= factor;
  return copy;
}

// --------------------------------------------------------------- LpBuilder

VarId LpBuilder::add_variable(std::string name, double lower, double upper, double cost) {
  if (std::isnan(lower) || std::isnan(upper) || lower > upper || lower == kInf || upper == -kInf) {
    throw DomainError("invalid bounds for variable '" + name + "'");
  }
  if (!std::isfinite(cost)) throw DomainError("non-finite cost for variable '" + name + "'");
  auto& p = problem_;
  const int idx = p.num_vars();
  if (!p.index_.emplace(name, idx).second) {
    throw DomainError("duplicate LP variable name '" + name + "'");
  }
  p.names_.push_back(std::move(name));
  p.cost_.push_back(cost);
  p.lower_.push_back(lower);
  p.upper_.push_back(upper);
  return VarId{idx};
}

void LpBuilder::check_var(VarId v) const {
  if (v.index < 0 || v.index >= problem_.num_vars()) throw DomainError("undeclared LP variable");
}

void LpBuilder::set_cost(VarId v, double cost) {
  check_var(v);
  if (!std::isfinite(cost)) throw DomainError("non-finite cost");
  problem_.cost_[static_cast<std::size_t>(v.index)] = cost;
}

void LpBuilder::add_cost(VarId v, double cost) {
  check_var(v);
  set_cost(v, problem_.cost_[static_cast<std::size_t>(v.index)] + cost);
}

void LpBuilder::set_bounds(VarId v, double lower, double upper) {
  check_var(v);
  if (std::isnan(lower) || std::isnan(upper) || lower > upper || lower == kInf || upper == -kInf) {
    throw DomainError("invalid bounds for '" + problem_.names_[static_cast<std::size_t>(v.index)] + "'");
  }
  problem_.lower_[static_cast<std::size_t>(v.index)] = lower;
  problem_.upper_[static_cast<std::size_t>(v.index)] = upper;
}

void LpBuilder::add_row(std::string name, std::vector<Term> terms, RowSense sense, double rhs) {
  if (!std::isfinite(rhs)) throw DomainError("non-finite right-hand side in row '" + name + "'");
  for (const Term& t : terms) {
    check_var(t.var);
    if (!std::isfinite(t.coef)) throw DomainError("non-finite coefficient in row '" + name + "'");
  }
  sort_and_merge(terms);
  problem_.rows_.push_back(Row{std::move(name), std::move(terms), sense, rhs});
}

void LpBuilder::add_le(std::string name, std::vector<Term> terms, double rhs) {
  add_row(std::move(name), std::move(terms), RowSense::LessEqual, rhs);
}

void LpBuilder::add_ge(std::string name, std::vector<Term> terms, double rhs) {
  for (Term& t : terms) t.coef = -t.coef;
  add_row(std::move(name), std::move(terms), RowSense::LessEqual, -rhs);
}

void LpBuilder::add_eq(std::string name, std::vector<Term> terms, double rhs) {
  add_row(std::move(name), std::move(terms), RowSense::Equal, rhs);
}

void LpBuilder::set_tie_break(std::vector<Term> terms) {
  for (const Term& t : terms) {
    check_var(t.var);
    if (!std::isfinite(t.coef)) throw DomainError("non-finite tie-break coefficient");
  }
  sort_and_merge(terms);
  problem_.tie_break_ = std::move(terms);
}

std::optional<VarId> LpBuilder::find(std::string_view name) const { return problem_.find(name); }

LpProblem LpBuilder::build() && { return std::move(problem_); }

void add_epigraph_max(LpBuilder& builder, VarId target, std::span<const VarId> terms,
                      std::string_view row_prefix) {
  if (terms.empty()) throw DomainError("epigraph of an empty max");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    builder.add_le(std::string(row_prefix) + "[" + std::to_string(i) + "]",
                   {Term{terms[i], 1.0}, Term{target, -1.0}}, 0.0);
  }
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

// ------------------------------------------------------------ diagnostics

double max_violation(const LpProblem& problem, std::span<const double> x) {
  if (static_cast<int>(x.size()) != problem.num_vars()) throw DomainError("solution size mismatch");
  double worst = 0.0;
  for (int j = 0; j < problem.num_vars(); ++j) {
    const auto i = static_cast<std::size_t>(j);
    worst = std::max({worst, problem.lower()[i] - x[i], x[i] - problem.upper()[i]});
  }
  for (const Row& row : problem.rows()) {
    double activity = 0.0;
    for (const Term& t : row.terms) activity += t.coef * x[static_cast<std::size_t>(t.var.index)];
    const double excess = activity - row.rhs;
    worst = std::max(worst, row.sense == RowSense::Equal ? std::abs(excess) : excess);
  }
  return worst;
}

double objective_value(const LpProblem& problem, std::span<const double> x) {
  double total = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) total += problem.objective()[j] * x[j];
  return total;
}

LpSolution solve(const LpProblem& problem) { return SimplexSolver{}.solve(problem); }

}  // namespace peakshaver::lp
