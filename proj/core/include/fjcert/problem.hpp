#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fjcert/errors.hpp"
#include "fjcert/expr.hpp"

namespace fjcert {

inline constexpr double kDefaultTolActive = 1e-8;
inline constexpr double kDefaultTolFeas = 1e-9;
inline constexpr double kDefaultTolStat = 1e-6;

struct Constraint {
  std::string label;
  /// g(x) >= 0 or h(x) = 0 after desugaring
  Expr expr;
  /// the constraint as written in the file
  std::string source;
};

/// maximize objective(x)  s.t.  g_i(x) >= 0,  h_j(x) = 0.
/// `minimize` and `<=` inputs are stored already negated into this form.
struct Problem {
  std::vector<std::string> variables;
  Expr objective;
  std::string objective_source;
  bool minimize_input = false;
  std::vector<Constraint> inequalities;
  std::vector<Constraint> equalities;

  std::size_t dimension() const { return variables.size(); }
};

struct LoadedProblem {
  Problem problem;
  std::optional<Point> point;
};

/// Line-oriented problem format:
///
///   vars: x, y
///   maximize: x + y          (or minimize:)
///   g1: 1 - x^2 >= 0         (g-labels take >= or <=)
///   h1: x^2 + y^2 - 2 == 0   (h-labels take ==)
///   point: x = 1, y = 1      (optional)
///
/// '#' starts a comment. Errors carry 1-based line and column.
LoadedProblem load_problem(std::string_view text);
LoadedProblem load_problem_file(const std::filesystem::path& path);

struct FeasibilityReport {
  std::vector<double> inequality_values;
  std::vector<double> equality_values;
  /// max(0, -g_i) over i
  double worst_inequality_violation = 0.0;
  /// max |h_j| over j
  double worst_equality_violation = 0.0;
  double tolerance = 0.0;
  bool feasible = true;
};

FeasibilityReport check_feasibility(const Problem& pr, const Point& x, double tol_feas = kDefaultTolFeas);

class InfeasiblePointError : public Error {
 public:
  explicit InfeasiblePointError(FeasibilityReport report);
  const FeasibilityReport& report() const noexcept { return report_; }

 private:
  FeasibilityReport report_;
};

struct ActiveSet {
  /// 0-based indices into Problem::inequalities, ascending
  std::vector<std::size_t> active;
  std::vector<double> values;
  double tolerance = 0.0;

  bool is_active(std::size_t i) const;
};

/// Saturated inequalities at a feasible point: i is active iff g_i(x) <= tol_act.
/// Throws InfeasiblePointError when x fails check_feasibility.
ActiveSet detect_active_set(const Problem& pr, const Point& x, double tol_act = kDefaultTolActive,
                            double tol_feas = kDefaultTolFeas);

}  // namespace fjcert
