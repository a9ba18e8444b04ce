#include "fjcert/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <type_traits>

#include "fjcert/errors.hpp"

namespace fjcert {

// ---------------------------------------------------------------------------
// construction

namespace {

NodePtr make_node(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

void require_same_variables(const Expr& a, const Expr& b) {
  if (a.variables() != b.variables())
    throw DimensionError("cannot combine expressions over different variable lists");
}

}  // namespace

Expr::Expr(NodePtr root, std::vector<std::string> variables)
    : root_(std::move(root)), variables_(std::move(variables)) {
  if (!root_) throw ContractViolation("expression without a root node");
}

Expr Expr::negate(const Expr& e) { return Expr(make_node(Op::Negate, e.root_), e.variables_); }

Expr Expr::sub(const Expr& a, const Expr& b) {
  require_same_variables(a, b);
  return Expr(make_node(Op::Sub, a.root_, b.root_), a.variables_);
}

Expr Expr::mul(const Expr& a, const Expr& b) {
  require_same_variables(a, b);
  return Expr(make_node(Op::Mul, a.root_, b.root_), a.variables_);
}

Expr Expr::constant(double value, std::vector<std::string> variables) {
  if (!std::isfinite(value) || value < 0.0)
    throw ContractViolation("constant nodes hold finite non-negative values");
  auto n = std::make_shared<Node>();
  n->op = Op::Constant;
  n->value = value;
  std::ostringstream os;
  os.precision(17);
  os << value;
  n->literal = os.str();
  return Expr(std::move(n), std::move(variables));
}

std::string Expr::to_string() const { return fjcert::to_string(*root_, variables_); }

bool operator==(const Expr& a, const Expr& b) {
  return a.variables_ == b.variables_ && structurally_equal(*a.root_, *b.root_);
}

// ---------------------------------------------------------------------------
// parsing

namespace {

const char* function_name(Op op) {
  switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    default: return nullptr;
  }
}

bool lookup_function(std::string_view name, Op& op) {
  for (Op candidate : {Op::Sin, Op::Cos, Op::Exp, Op::Log, Op::Sqrt}) {
    if (name == function_name(candidate)) {
      op = candidate;
      return true;
    }
  }
  return false;
}

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& variables)
      : text_(text), variables_(variables) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) throw ExprSyntaxError(pos_, "unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  [[noreturn]] void fail(const std::string& what) {
    skip_ws();
    throw ExprSyntaxError(pos_, pos_ == text_.size() ? what + " (unexpected end of input)" : what);
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (char c = peek(); c == '+' || c == '-'; c = peek()) {
      ++pos_;
      lhs = make_node(c == '+' ? Op::Add : Op::Sub, lhs, term());
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (char c = peek(); c == '*' || c == '/'; c = peek()) {
      ++pos_;
      lhs = make_node(c == '*' ? Op::Mul : Op::Div, lhs, factor());
    }
    return lhs;
  }

  NodePtr factor() {
    if (peek() == '-') {
      ++pos_;
      return make_node(Op::Negate, factor());
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (peek() != '^') return base;
    ++pos_;
    skip_ws();
    const std::size_t start = pos_;
    bool negative = false;
    if (pos_ < text_.size() && text_[pos_] == '-') {
      negative = true;
      ++pos_;
    }
    const std::size_t digits = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == digits) {
      pos_ = start;
      fail("expected integer exponent");
    }
    if (pos_ - digits > 6) throw ExprSyntaxError(digits, "exponent too large");
    int k = std::stoi(std::string(text_.substr(digits, pos_ - digits)));
    auto n = std::make_shared<Node>();
    n->op = Op::IntPow;
    n->lhs = std::move(base);
    n->exponent = negative ? -k : k;
    return n;
  }

  NodePtr atom() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("expected number, identifier or '('");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      const std::size_t from = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return pos_ - from;
    };
    std::size_t count = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      count += digits();
    }
    if (count == 0) throw ExprSyntaxError(start, "malformed number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      const std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = mark;  // "2e" followed by something else: not an exponent
    }
    auto n = std::make_shared<Node>();
    n->op = Op::Constant;
    n->literal = std::string(text_.substr(start, pos_ - start));
    n->value = std::strtod(n->literal.c_str(), nullptr);
    if (!std::isfinite(n->value)) throw ExprSyntaxError(start, "number out of range");
    return n;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (peek() == '(') {
      Op op;
      if (!lookup_function(name, op))
        throw ExprSyntaxError(start, "unknown function '" + std::string(name) + "'");
      ++pos_;
      NodePtr arg = expr();
      if (peek() != ')') fail("expected ')' after function argument");
      ++pos_;
      return make_node(op, std::move(arg));
    }
    const auto it = std::find(variables_.begin(), variables_.end(), name);
    if (it == variables_.end()) throw UndeclaredVariableError(start, std::string(name));
    auto n = std::make_shared<Node>();
    n->op = Op::Variable;
    n->var = static_cast<std::size_t>(it - variables_.begin());
    return n;
  }

  std::string_view text_;
  const std::vector<std::string>& variables_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expression(std::string_view text, const std::vector<std::string>& variables) {
  return Expr(Parser(text, variables).parse(), variables);
}

// ---------------------------------------------------------------------------
// printing and structural comparison

namespace {

void print(std::ostream& os, const Node& n, const std::vector<std::string>& vars) {
  auto binary = [&](const char* sym) {
    os << '(';
    print(os, *n.lhs, vars);
    os << ' ' << sym << ' ';
    print(os, *n.rhs, vars);
    os << ')';
  };
  switch (n.op) {
    case Op::Constant: os << n.literal; break;
    case Op::Variable: os << vars.at(n.var); break;
    case Op::Negate:
      os << "(-";
      print(os, *n.lhs, vars);
      os << ')';
      break;
    case Op::Add: binary("+"); break;
    case Op::Sub: binary("-"); break;
    case Op::Mul: binary("*"); break;
    case Op::Div: binary("/"); break;
    case Op::IntPow:
      if (n.lhs->op == Op::IntPow) {
        os << '(';
        print(os, *n.lhs, vars);
        os << ')';
      } else {
        print(os, *n.lhs, vars);
      }
      os << '^' << n.exponent;
      break;
    default:
      os << function_name(n.op) << '(';
      print(os, *n.lhs, vars);
      os << ')';
  }
}

}  // namespace

std::string to_string(const Node& node, const std::vector<std::string>& variables) {
  std::ostringstream os;
  print(os, node, variables);
  return os.str();
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.op != b.op) return false;
  switch (a.op) {
    case Op::Constant: return a.value == b.value;
    case Op::Variable: return a.var == b.var;
    case Op::IntPow: return a.exponent == b.exponent && structurally_equal(*a.lhs, *b.lhs);
    default: break;
  }
  if (!structurally_equal(*a.lhs, *b.lhs)) return false;
  if (a.rhs || b.rhs) return a.rhs && b.rhs && structurally_equal(*a.rhs, *b.rhs);
  return true;
}

// ---------------------------------------------------------------------------
// evaluation (plain doubles and forward-mode duals share one walker)

namespace {

struct Dual {
  double v = 0.0;
  double d = 0.0;
};

double value_of(double x) { return x; }
double value_of(const Dual& x) { return x.v; }

template <class S>
S lift(double c);
template <>
double lift<double>(double c) { return c; }
template <>
Dual lift<Dual>(double c) { return {c, 0.0}; }

double neg(double a) { return -a; }
Dual neg(const Dual& a) { return {-a.v, -a.d}; }
double add(double a, double b) { return a + b; }
Dual add(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
double sub(double a, double b) { return a - b; }
Dual sub(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
double mul(double a, double b) { return a * b; }
Dual mul(const Dual& a, const Dual& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
double divide(double a, double b) { return a / b; }
Dual divide(const Dual& a, const Dual& b) {
  return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
}
double ipow(double a, int k) { return std::pow(a, k); }
Dual ipow(const Dual& a, int k) {
  if (k == 0) return {1.0, 0.0};
  return {std::pow(a.v, k), k * std::pow(a.v, k - 1) * a.d};
}
double fsin(double a) { return std::sin(a); }
Dual fsin(const Dual& a) { return {std::sin(a.v), std::cos(a.v) * a.d}; }
double fcos(double a) { return std::cos(a); }
Dual fcos(const Dual& a) { return {std::cos(a.v), -std::sin(a.v) * a.d}; }
double fexp(double a) { return std::exp(a); }
Dual fexp(const Dual& a) {
  const double e = std::exp(a.v);
  return {e, e * a.d};
}
double flog(double a) { return std::log(a); }
Dual flog(const Dual& a) { return {std::log(a.v), a.d / a.v}; }
double fsqrt(double a) { return std::sqrt(a); }
Dual fsqrt(const Dual& a) {
  const double s = std::sqrt(a.v);
  return {s, a.d / (2.0 * s)};
}

bool finite(double x) { return std::isfinite(x); }
bool finite(const Dual& x) { return std::isfinite(x.v) && std::isfinite(x.d); }

template <class S>
class Evaluator {
 public:
  Evaluator(std::span<const S> x, const std::vector<std::string>& vars) : x_(x), vars_(vars) {}

  S eval(const Node& n) const {
    S r = eval_raw(n);
    if (!finite(r)) throw DomainError(to_string(n, vars_), "result is not finite");
    return r;
  }

 private:
  [[noreturn]] void domain(const Node& n, const std::string& what) const {
    throw DomainError(to_string(n, vars_), what);
  }

  S eval_raw(const Node& n) const {
    switch (n.op) {
      case Op::Constant: return lift<S>(n.value);
      case Op::Variable: return x_[n.var];
      case Op::Negate: return neg(eval(*n.lhs));
      case Op::Add: return add(eval(*n.lhs), eval(*n.rhs));
      case Op::Sub: return sub(eval(*n.lhs), eval(*n.rhs));
      case Op::Mul: return mul(eval(*n.lhs), eval(*n.rhs));
      case Op::Div: {
        S a = eval(*n.lhs);
        S b = eval(*n.rhs);
        if (value_of(b) == 0.0) domain(n, "division by zero");
        return divide(a, b);
      }
      case Op::IntPow: {
        S a = eval(*n.lhs);
        if (n.exponent < 0 && value_of(a) == 0.0) domain(n, "zero raised to a negative power");
        return ipow(a, n.exponent);
      }
      case Op::Sin: return fsin(eval(*n.lhs));
      case Op::Cos: return fcos(eval(*n.lhs));
      case Op::Exp: return fexp(eval(*n.lhs));
      case Op::Log: {
        S a = eval(*n.lhs);
        if (!(value_of(a) > 0.0)) domain(n, "log of a non-positive argument");
        return flog(a);
      }
      case Op::Sqrt: {
        S a = eval(*n.lhs);
        if (value_of(a) < 0.0) domain(n, "sqrt of a negative argument");
        if constexpr (std::is_same_v<S, Dual>) {
          if (value_of(a) == 0.0 && a.d != 0.0) domain(n, "sqrt is not differentiable at 0");
          if (value_of(a) == 0.0) return Dual{0.0, 0.0};
        }
        return fsqrt(a);
      }
    }
    domain(n, "unknown node");
  }

  std::span<const S> x_;
  const std::vector<std::string>& vars_;
};

void require_dimension(const Expr& e, std::size_t n, const char* what) {
  if (n != e.dimension())
    throw DimensionError(std::string(what) + " has dimension " + std::to_string(n) +
                         ", expression expects " + std::to_string(e.dimension()));
}

void require_point(const Expr& e, const Point& p) {
  if (p.names() != e.variables())
    throw DimensionError("point variables do not match the expression's variable list");
}

}  // namespace

double evaluate(const Expr& e, std::span<const double> x) {
  require_dimension(e, x.size(), "point");
  return Evaluator<double>(x, e.variables()).eval(e.root());
}

double evaluate(const Expr& e, const Point& p) {
  require_point(e, p);
  return evaluate(e, std::span<const double>(p.values()));
}

double directional_derivative(const Expr& e, std::span<const double> x, std::span<const double> v) {
  require_dimension(e, x.size(), "point");
  require_dimension(e, v.size(), "direction");
  std::vector<Dual> seeded(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) seeded[i] = {x[i], v[i]};
  return Evaluator<Dual>(seeded, e.variables()).eval(e.root()).d;
}

double directional_derivative(const Expr& e, const Point& p, std::span<const double> v) {
  require_point(e, p);
  return directional_derivative(e, std::span<const double>(p.values()), v);
}

std::vector<double> gradient(const Expr& e, std::span<const double> x) {
  std::vector<double> g(x.size());
  std::vector<double> unit(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    unit[i] = 1.0;
    g[i] = directional_derivative(e, x, unit);
    unit[i] = 0.0;
  }
  return g;
}

std::vector<double> gradient(const Expr& e, const Point& p) {
  require_point(e, p);
  return gradient(e, std::span<const double>(p.values()));
}

double fd_directional(const Expr& e, std::span<const double> x, std::span<const double> v, double h) {
  require_dimension(e, x.size(), "point");
  require_dimension(e, v.size(), "direction");
  if (!(h > 0.0)) throw ContractViolation("finite-difference step must be positive");
  std::vector<double> plus(x.begin(), x.end());
  std::vector<double> minus(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    plus[i] += h * v[i];
    minus[i] -= h * v[i];
  }
  return (evaluate(e, plus) - evaluate(e, minus)) / (2.0 * h);
}

std::vector<double> fd_gradient(const Expr& e, std::span<const double> x, double h) {
  std::vector<double> g(x.size());
  std::vector<double> unit(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    unit[i] = 1.0;
    g[i] = fd_directional(e, x, unit, h);
    unit[i] = 0.0;
  }
  return g;
}

FrechetReport frechet_probe(const Expr& e, std::span<const double> x,
                            std::span<const double> candidate_gradient,
                            std::span<const double> radii, int samples_per_radius,
                            std::uint64_t seed, double tolerance) {
  require_dimension(e, x.size(), "point");
  require_dimension(e, candidate_gradient.size(), "candidate gradient");
  if (radii.empty()) throw ContractViolation("frechet_probe needs at least one radius");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw ContractViolation("probe radii must be positive");
    if (i > 0 && !(radii[i] < radii[i - 1]))
      throw ContractViolation("probe radii must be strictly decreasing");
  }
  if (samples_per_radius < 1) throw ContractViolation("frechet_probe needs at least one sample");

  const std::size_t n = x.size();
  const double f0 = evaluate(e, x);
  double gnorm = 0.0;
  for (double g : candidate_gradient) gnorm += g * g;
  gnorm = std::sqrt(gnorm);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  FrechetReport report;
  report.radii.assign(radii.begin(), radii.end());
  report.tolerance = tolerance;
  std::vector<double> u(n);
  std::vector<double> y(n);
  for (double r : radii) {
    double worst = 0.0;
    for (int s = 0; s < samples_per_radius; ++s) {
      double norm = 0.0;
      do {
        norm = 0.0;
        for (auto& ui : u) {
          ui = normal(rng);
          norm += ui * ui;
        }
        norm = std::sqrt(norm);
      } while (norm == 0.0);
      double lin = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        u[i] /= norm;
        y[i] = x[i] + r * u[i];
        lin += candidate_gradient[i] * r * u[i];
      }
      const double ratio = std::abs(evaluate(e, y) - f0 - lin) / r;
      worst = std::max(worst, ratio);
    }
    report.worst_ratio.push_back(worst);
    report.noise_floor.push_back(1e3 * std::numeric_limits<double>::epsilon() *
                                 (1.0 + std::abs(f0) + r * gnorm) / r);
  }

  bool decreasing = true;
  for (std::size_t i = 1; i < report.worst_ratio.size(); ++i) {
    if (report.worst_ratio[i] > report.worst_ratio[i - 1] + report.noise_floor[i]) decreasing = false;
  }
  report.pass = decreasing && report.worst_ratio.back() <= tolerance;
  return report;
}

// ---------------------------------------------------------------------------
// points

Point::Point(std::vector<std::string> names, std::vector<double> values)
    : names_(std::move(names)), values_(std::move(values)) {
  if (names_.size() != values_.size())
    throw DimensionError("point has " + std::to_string(names_.size()) + " names but " +
                         std::to_string(values_.size()) + " values");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw InputError("coordinate '" + names_[i] + "' is not finite");
  }
}

Point Point::parse(std::string_view text, const std::vector<std::string>& variables) {
  std::vector<double> values(variables.size(), 0.0);
  std::vector<bool> seen(variables.size(), false);
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  std::vector<std::string_view> items;
  for (std::size_t start = 0;;) {
    const std::size_t comma = text.find(',', start);
    items.push_back(trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  for (const std::string_view item : items) {
    if (item.empty()) throw InputError("empty coordinate in point '" + std::string(text) + "'");
    const auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw InputError("expected 'name = value' in point, got '" + std::string(item) + "'");
    const std::string name(trim(item.substr(0, eq)));
    const std::string value_text(trim(item.substr(eq + 1)));
    const auto it = std::find(variables.begin(), variables.end(), name);
    if (it == variables.end()) throw InputError("point assigns undeclared variable '" + name + "'");
    const auto idx = static_cast<std::size_t>(it - variables.begin());
    if (seen[idx]) throw InputError("point assigns '" + name + "' twice");
    char* end = nullptr;
    const double v = std::strtod(value_text.c_str(), &end);
    if (value_text.empty() || end != value_text.c_str() + value_text.size() || !std::isfinite(v))
      throw InputError("invalid value '" + value_text + "' for '" + name + "'");
    values[idx] = v;
    seen[idx] = true;
  }
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (!seen[i]) throw InputError("point does not assign variable '" + variables[i] + "'");
  }
  return Point(variables, std::move(values));
}

std::string Point::to_string() const {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (i) os << ", ";
    os << names_[i] << " = " << values_[i];
  }
  return os.str();
}

}  // namespace fjcert
