#include "fjcert/problem.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace fjcert {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool is_identifier(std::string_view s) {
  if (s.empty() || !is_ident_start(s.front())) return false;
  return std::all_of(s.begin(), s.end(), is_ident_char);
}

bool is_reserved(std::string_view s) {
  return s == "sin" || s == "cos" || s == "exp" || s == "log" || s == "sqrt";
}

// Trims in place and reports how many leading characters were dropped.
std::string_view trim(std::string_view s, std::size_t* dropped = nullptr) {
  std::size_t lead = 0;
  while (lead < s.size() && std::isspace(static_cast<unsigned char>(s[lead]))) ++lead;
  s.remove_prefix(lead);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (dropped) *dropped = lead;
  return s;
}

bool is_zero_constant(const Expr& e) { return e.root().op == Op::Constant && e.root().value == 0.0; }

class Loader {
 public:
  LoadedProblem load(std::string_view text) {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      ++line_no;
      std::string_view line = text.substr(start, end - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      handle_line(line_no, line);
      if (end == text.size()) break;
      start = end + 1;
    }
    if (!variables_) throw ProblemParseError(line_no, 1, "missing 'vars:' line");
    if (!objective_) throw ProblemParseError(line_no, 1, "missing 'maximize:' or 'minimize:' line");

    LoadedProblem out{Problem{*variables_, *objective_, objective_source_, minimize_,
                              std::move(inequalities_), std::move(equalities_)},
                      std::nullopt};
    if (point_text_) {
      try {
        out.point = Point::parse(*point_text_, *variables_);
      } catch (const InputError& e) {
        throw ProblemParseError(point_line_, point_column_, e.what());
      }
    }
    return out;
  }

 private:
  void handle_line(std::size_t line_no, std::string_view line) {
    std::size_t lead = 0;
    const std::string_view content = trim(line, &lead);
    if (content.empty()) return;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos)
      throw ProblemParseError(line_no, lead + 1, "expected 'key: value'");
    const std::string key(trim(line.substr(0, colon)));
    const std::size_t body_col = colon + 2;  // 1-based column of the first body character
    const std::string_view body = line.substr(colon + 1);

    if (key == "vars") {
      if (variables_) throw ProblemParseError(line_no, lead + 1, "duplicate 'vars:' line");
      parse_vars(line_no, body, body_col);
    } else if (key == "maximize" || key == "minimize") {
      if (objective_) throw ProblemParseError(line_no, lead + 1, "objective declared twice");
      Expr e = expression(line_no, body, body_col);
      minimize_ = key == "minimize";
      objective_source_ = std::string(trim(body));
      objective_ = minimize_ ? Expr::negate(e) : e;
    } else if (key == "point") {
      if (point_text_) throw ProblemParseError(line_no, lead + 1, "duplicate 'point:' line");
      require_vars(line_no, lead);
      point_text_ = std::string(body);
      point_line_ = line_no;
      point_column_ = body_col;
    } else if (is_identifier(key) && (key.front() == 'g' || key.front() == 'h')) {
      require_vars(line_no, lead);
      if (!labels_.insert(key).second)
        throw ProblemParseError(line_no, lead + 1, "duplicate constraint label '" + key + "'");
      if (key.front() == 'g') {
        inequalities_.push_back(inequality(line_no, key, body, body_col));
      } else {
        equalities_.push_back(equality(line_no, key, body, body_col));
      }
    } else {
      throw ProblemParseError(line_no, lead + 1,
                              "unknown key '" + key + "' (constraint labels start with g or h)");
    }
  }

  void require_vars(std::size_t line_no, std::size_t lead) const {
    if (!variables_) throw ProblemParseError(line_no, lead + 1, "'vars:' must come first");
  }

  void parse_vars(std::size_t line_no, std::string_view body, std::size_t body_col) {
    std::vector<std::string> names;
    std::size_t offset = 0;
    for (;;) {
      const std::size_t comma = body.find(',', offset);
      const std::string_view item = body.substr(offset, comma == std::string_view::npos ? body.npos : comma - offset);
      std::size_t lead = 0;
      const std::string_view name = trim(item, &lead);
      const std::size_t col = body_col + offset + lead;
      if (!is_identifier(name) || is_reserved(name))
        throw ProblemParseError(line_no, col, "invalid variable name '" + std::string(name) + "'");
      if (std::find(names.begin(), names.end(), name) != names.end())
        throw ProblemParseError(line_no, col, "variable '" + std::string(name) + "' declared twice");
      names.emplace_back(name);
      if (comma == std::string_view::npos) break;
      offset = comma + 1;
    }
    variables_ = std::move(names);
  }

  Expr expression(std::size_t line_no, std::string_view text, std::size_t col) const {
    if (!variables_) throw ProblemParseError(line_no, col, "'vars:' must come first");
    try {
      return parse_expression(text, *variables_);
    } catch (const UndeclaredVariableError& e) {
      throw ProblemParseError(line_no, col + e.offset(), "undeclared variable '" + e.name() + "'");
    } catch (const ExprSyntaxError& e) {
      throw ProblemParseError(line_no, col + e.offset(), e.what());
    }
  }

  // Splits "lhs OP rhs" on the first occurrence of one of the operators.
  struct Relation {
    std::string_view op;
    std::string_view lhs;
    std::string_view rhs;
    std::size_t rhs_offset;
  };

  Relation split(std::size_t line_no, std::string_view body, std::size_t body_col,
                 std::initializer_list<std::string_view> ops) const {
    std::size_t best = std::string_view::npos;
    std::string_view best_op;
    for (auto op : ops) {
      const auto at = body.find(op);
      if (at < best) {
        best = at;
        best_op = op;
      }
    }
    if (best == std::string_view::npos) {
      std::string list;
      for (auto op : ops) list += (list.empty() ? "'" : " or '") + std::string(op) + "'";
      throw ProblemParseError(line_no, body_col, "expected relation " + list);
    }
    return {best_op, body.substr(0, best), body.substr(best + best_op.size()), best + best_op.size()};
  }

  Constraint inequality(std::size_t line_no, const std::string& label, std::string_view body,
                        std::size_t body_col) const {
    const Relation r = split(line_no, body, body_col, {">=", "<="});
    Expr lhs = expression(line_no, r.lhs, body_col);
    Expr rhs = expression(line_no, r.rhs, body_col + r.rhs_offset);
    if (r.op == "<=") std::swap(lhs, rhs);
    // g: lhs >= rhs  becomes  lhs - rhs >= 0
    Expr g = is_zero_constant(rhs) ? lhs : (is_zero_constant(lhs) ? Expr::negate(rhs) : Expr::sub(lhs, rhs));
    return {label, std::move(g), std::string(trim(body))};
  }

  Constraint equality(std::size_t line_no, const std::string& label, std::string_view body,
                      std::size_t body_col) const {
    const Relation r = split(line_no, body, body_col, {"=="});
    Expr lhs = expression(line_no, r.lhs, body_col);
    Expr rhs = expression(line_no, r.rhs, body_col + r.rhs_offset);
    Expr h = is_zero_constant(rhs) ? lhs : Expr::sub(lhs, rhs);
    return {label, std::move(h), std::string(trim(body))};
  }

  std::optional<std::vector<std::string>> variables_;
  std::optional<Expr> objective_;
  std::string objective_source_;
  bool minimize_ = false;
  std::vector<Constraint> inequalities_;
  std::vector<Constraint> equalities_;
  std::set<std::string> labels_;
  std::optional<std::string> point_text_;
  std::size_t point_line_ = 0;
  std::size_t point_column_ = 0;
};

}  // namespace

LoadedProblem load_problem(std::string_view text) { return Loader().load(text); }

LoadedProblem load_problem_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open problem file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_problem(ss.str());
}

FeasibilityReport check_feasibility(const Problem& pr, const Point& x, double tol_feas) {
  if (!(tol_feas > 0.0)) throw ContractViolation("feasibility tolerance must be positive");
  FeasibilityReport r;
  r.tolerance = tol_feas;
  for (const auto& g : pr.inequalities) {
    const double v = evaluate(g.expr, x);
    r.inequality_values.push_back(v);
    r.worst_inequality_violation = std::max(r.worst_inequality_violation, -v);
  }
  for (const auto& h : pr.equalities) {
    const double v = evaluate(h.expr, x);
    r.equality_values.push_back(v);
    r.worst_equality_violation = std::max(r.worst_equality_violation, std::abs(v));
  }
  r.feasible = r.worst_inequality_violation <= tol_feas && r.worst_equality_violation <= tol_feas;
  return r;
}

namespace {

std::string describe(const FeasibilityReport& r) {
  std::ostringstream os;
  os << "infeasible point: worst inequality violation " << r.worst_inequality_violation
     << ", worst equality violation " << r.worst_equality_violation << " (tolerance " << r.tolerance << ")";
  return os.str();
}

}  // namespace

InfeasiblePointError::InfeasiblePointError(FeasibilityReport report)
    : Error(describe(report)), report_(std::move(report)) {}

bool ActiveSet::is_active(std::size_t i) const { return std::binary_search(active.begin(), active.end(), i); }

ActiveSet detect_active_set(const Problem& pr, const Point& x, double tol_act, double tol_feas) {
  if (!(tol_act > 0.0)) throw ContractViolation("active-set tolerance must be positive");
  FeasibilityReport feas = check_feasibility(pr, x, tol_feas);
  if (!feas.feasible) throw InfeasiblePointError(std::move(feas));
  ActiveSet s;
  s.tolerance = tol_act;
  s.values = feas.inequality_values;
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    if (s.values[i] <= tol_act) s.active.push_back(i);
  }
  return s;
}

}  // namespace fjcert
