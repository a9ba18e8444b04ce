#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fjcert {

enum class Op {
  Constant,
  Variable,
  Negate,
  Add,
  Sub,
  Mul,
  Div,
  IntPow,
  Sin,
  Cos,
  Exp,
  Log,
  Sqrt,
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// One immutable node of an expression tree. Which fields are meaningful
/// depends on `op`: constants carry `value`/`literal`, variables carry
/// `var`, IntPow carries `exponent`, unary nodes use `lhs` only.
struct Node {
  Op op = Op::Constant;
  double value = 0.0;
  std::string literal;
  std::size_t var = 0;
  int exponent = 0;
  NodePtr lhs;
  NodePtr rhs;
};

/// A scalar function of the declared variables, parsed from text.
class Expr {
 public:
  Expr(NodePtr root, std::vector<std::string> variables);

  const Node& root() const { return *root_; }
  const NodePtr& root_ptr() const { return root_; }
  const std::vector<std::string>& variables() const { return variables_; }
  std::size_t dimension() const { return variables_.size(); }

  /// Fully parenthesized text that parses back to the same tree.
  std::string to_string() const;

  static Expr negate(const Expr& e);
  static Expr sub(const Expr& a, const Expr& b);
  static Expr mul(const Expr& a, const Expr& b);
  static Expr constant(double value, std::vector<std::string> variables);

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  NodePtr root_;
  std::vector<std::string> variables_;
};

/// Named coordinates of a point in R^n, ordered like the owning problem's
/// variable list.
class Point {
 public:
  Point(std::vector<std::string> names, std::vector<double> values);

  /// Parses "x = 1, y = -2.5" against the declared variable list; every
  /// variable must be assigned exactly once.
  static Point parse(std::string_view text, const std::vector<std::string>& variables);

  const std::vector<std::string>& names() const { return names_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t dimension() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  std::string to_string() const;

 private:
  std::vector<std::string> names_;
  std::vector<double> values_;
};

Expr parse_expression(std::string_view text, const std::vector<std::string>& variables);

std::string to_string(const Node& node, const std::vector<std::string>& variables);
bool structurally_equal(const Node& a, const Node& b);

double evaluate(const Expr& e, std::span<const double> x);
double evaluate(const Expr& e, const Point& p);

/// d/dt e(p + t v) at t = 0 by forward-mode dual numbers (no truncation error).
double directional_derivative(const Expr& e, std::span<const double> x, std::span<const double> v);
double directional_derivative(const Expr& e, const Point& p, std::span<const double> v);

std::vector<double> gradient(const Expr& e, std::span<const double> x);
std::vector<double> gradient(const Expr& e, const Point& p);

inline constexpr double kDefaultFdStep = 1e-5;

/// Central difference (e(p + h v) - e(p - h v)) / 2h.
double fd_directional(const Expr& e, std::span<const double> x, std::span<const double> v,
                      double h = kDefaultFdStep);
std::vector<double> fd_gradient(const Expr& e, std::span<const double> x, double h = kDefaultFdStep);

struct FrechetReport {
  std::vector<double> radii;
  /// max over sampled ||v|| = r of |e(p+v) - e(p) - g.v| / r
  std::vector<double> worst_ratio;
  /// rounding noise level expected at each radius; increases below it are ignored
  std::vector<double> noise_floor;
  double tolerance = 0.0;
  bool pass = false;
};

inline constexpr double kDefaultProbeTolerance = 1e-3;

/// Empirical check that the first-order remainder vanishes faster than ||v||
/// along pseudo-random directions. Evidence only, never a proof.
FrechetReport frechet_probe(const Expr& e, std::span<const double> x,
                            std::span<const double> candidate_gradient,
                            std::span<const double> radii, int samples_per_radius,
                            std::uint64_t seed, double tolerance = kDefaultProbeTolerance);

}  // namespace fjcert
