#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace peakshaver::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Column handle issued by LpBuilder.
struct VarId {
  int index = -1;
  friend bool operator==(VarId, VarId) = default;
};

struct Term {
  VarId var;
  double coef = 0.0;
  friend bool operator==(const Term&, const Term&) = default;
};

enum class RowSense : std::uint8_t { LessEqual, Equal };

/// Sparse row `sum(coef * x) <= rhs` or `== rhs`; terms sorted by column, no duplicates.
struct Row {
  std::string name;
  std::vector<Term> terms;
  RowSense sense = RowSense::LessEqual;
  double rhs = 0.0;
  friend bool operator==(const Row&, const Row&) = default;
};

/// Minimization LP with named columns. Built by LpBuilder; immutable afterwards
/// apart from the explicit copy-modifiers below.
class LpProblem {
 public:
  int num_vars() const { return static_cast<int>(names_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }

  const std::vector<std::string>& var_names() const { return names_; }
  const std::vector<double>& objective() const { return cost_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::vector<Row>& rows() const { return rows_; }
  /// Secondary objective minimized over the optimal face of the primary one.
  const std::vector<Term>& tie_break() const { return tie_break_; }

  std::optional<VarId> find(std::string_view name) const;
  /// Throws DomainError for unknown names.
  VarId var(std::string_view name) const;

  /// Copy with the bounds of `name` replaced.
  LpProblem with_bounds(std::string_view name, double lower, double upper) const;
  /// Copy with every objective coefficient multiplied by `factor`.
  LpProblem with_scaled_objective(double factor) const;

  friend bool operator==(const LpProblem&, const LpProblem&) = default;

 private:
  friend class LpBuilder;

  std::vector<std::string> names_;
  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<Row> rows_;
  std::vector<Term> tie_break_;
  std::map<std::string, int, std::less<>> index_;
};

class LpBuilder {
 public:
  /// Declares a column. Names must be unique.
  VarId add_variable(std::string name, double lower = 0.0, double upper = kInf, double cost = 0.0);

  void set_cost(VarId v, double cost);
  void add_cost(VarId v, double cost);
  void set_bounds(VarId v, double lower, double upper);

  void add_le(std::string name, std::vector<Term> terms, double rhs);
  /// Stored as the negated <= row.
  void add_ge(std::string name, std::vector<Term> terms, double rhs);
  void add_eq(std::string name, std::vector<Term> terms, double rhs);

  void set_tie_break(std::vector<Term> terms);

  std::optional<VarId> find(std::string_view name) const;
  int num_vars() const { return problem_.num_vars(); }

  /// Validates (finite coefficients, declared columns) and hands over the problem.
  LpProblem build() &&;

 private:
  void add_row(std::string name, std::vector<Term> terms, RowSense sense, double rhs);
  void check_var(VarId v) const;

  LpProblem problem_;
};

/// Adds `term - target <= 0` for every term, so that minimizing a positively
/// weighted `target` yields max(terms). Row names are `<prefix>[i]`.
void add_epigraph_max(LpBuilder& builder, VarId target, std::span<const VarId> terms,
                      std::string_view row_prefix);

enum class SolveStatus : std::uint8_t { Optimal, Infeasible, Unbounded };

std::string_view to_string(SolveStatus s);

struct LpSolution {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> values;
  double objective_value = 0.0;
  int iterations = 0;

  double value(VarId v) const { return values.at(static_cast<std::size_t>(v.index)); }
  double value(const LpProblem& problem, std::string_view name) const {
    return value(problem.var(name));
  }
};

/// Pluggable solver interface; SimplexSolver is the built-in reference.
class LpSolver {
 public:
  virtual ~LpSolver() = default;
  virtual LpSolution solve(const LpProblem& problem) const = 0;
};

struct SimplexOptions {
  double primal_tolerance = 1e-9;
  double dual_tolerance = 1e-9;
  double pivot_tolerance = 1e-9;
  int refactor_interval = 100;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  int degenerate_switch = 50;
  /// 0 selects an automatic limit based on problem size.
  int max_iterations = 0;
};

/// Bounded-variable revised primal simplex with a sparse LU basis factorization,
/// Dantzig pricing, Harris ratio test and a Bland's-rule fallback on stalling.
/// Deterministic for identical input.
class SimplexSolver final : public LpSolver {
 public:
  SimplexSolver() = default;
  explicit SimplexSolver(SimplexOptions options) : options_(options) {}

  LpSolution solve(const LpProblem& problem) const override;

 private:
  SimplexOptions options_;
};

/// Solves with a default-configured SimplexSolver.
LpSolution solve(const LpProblem& problem);

/// Largest violation of any row or bound by `x` (0 when feasible).
double max_violation(const LpProblem& problem, std::span<const double> x);
double objective_value(const LpProblem& problem, std::span<const double> x);

/// Fixed-format text representation; parse_dump(dump(p)) == p.
std::string dump(const LpProblem& problem);
LpProblem parse_dump(std::string_view text);

}  // namespace peakshaver::lp
