#include <algorithm>
#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "fjcert/errors.hpp"
#include "fjcert/problem.hpp"
#include "generators.hpp"

namespace fjcert {
namespace {

const std::string kData = FJCERT_TEST_DATA_DIR;

TEST(Load, CircleFile) {
  const auto lp = load_problem_file(kData + "/circle.fj");
  EXPECT_EQ(lp.problem.dimension(), 2u);
  EXPECT_TRUE(lp.problem.inequalities.empty());
  ASSERT_EQ(lp.problem.equalities.size(), 1u);
  EXPECT_EQ(lp.problem.equalities[0].label, "h1");
  ASSERT_TRUE(lp.point.has_value());
  EXPECT_EQ(lp.point->values(), (std::vector<double>{1.0, 1.0}));
}

TEST(Load, CircleWithBoundFile) {
  const auto lp = load_problem_file(kData + "/circle_with_bound.fj");
  EXPECT_EQ(lp.problem.inequalities.size(), 1u);
  EXPECT_EQ(lp.problem.equalities.size(), 1u);
}

TEST(Load, DuplicateLabel) {
  EXPECT_THROW(load_problem("vars: x, y\nmaximize: x\ng1: x >= 0\ng1: y >= 0\n"), ProblemParseError);
}

TEST(Load, UndeclaredVariableNamed) {
  try {
    load_problem("vars: x, y\nmaximize: x\ng1: x + z >= 0\n");
    FAIL() << "expected a parse error";
  } catch (const ProblemParseError& err) {
    EXPECT_NE(std::string(err.what()).find("'z'"), std::string::npos) << err.what();
    EXPECT_EQ(err.line(), 3u);
  }
}

TEST(Load, StructuralErrors) {
  EXPECT_THROW(load_problem("maximize: x\nvars: x\n"), ProblemParseError);
  EXPECT_THROW(load_problem("vars: x\nmaximize: x\nmaximize: x\n"), ProblemParseError);
  EXPECT_THROW(load_problem("vars: x\ng1: x >= 0\n"), ProblemParseError);
  EXPECT_THROW(load_problem("vars: x\nmaximize: x\nh1: x >= 0\n"), ProblemParseError);
  EXPECT_THROW(load_problem("vars: x\nmaximize: x\ng1: x == 0\n"), ProblemParseError);
  EXPECT_THROW(load_problem("vars: x\nmaximize: x\nfoo: x\n"), ProblemParseError);
  EXPECT_THROW(load_problem("vars: x, x\nmaximize: x\n"), ProblemParseError);
  EXPECT_THROW(load_problem("vars: sin\nmaximize: 1\n"), ProblemParseError);
}

TEST(Load, SugarIsDesugaredByNegation) {
  const auto lp = load_problem(
      "vars: x, y  # two variables\n"
      "minimize: x + 2*y\n"
      "g1: x <= 3\n"
      "g2: 0 <= y\n"
      "point: x = 1, y = 2\n");
  const Point& p = *lp.point;
  EXPECT_TRUE(lp.problem.minimize_input);
  EXPECT_EQ(evaluate(lp.problem.objective, p), -5.0);
  EXPECT_EQ(evaluate(lp.problem.inequalities[0].expr, p), 2.0);
  EXPECT_EQ(evaluate(lp.problem.inequalities[1].expr, p), 2.0);
}

Problem one_dim(const std::string& constraints) {
  return load_problem("vars: x\nmaximize: x\n" + constraints).problem;
}

TEST(ActiveSet, Examples) {
  const Problem pr = one_dim("g1: 1 - x >= 0\n");
  EXPECT_EQ(detect_active_set(pr, Point({"x"}, {1.0}), 1e-8).active, (std::vector<std::size_t>{0}));
  EXPECT_TRUE(detect_active_set(pr, Point({"x"}, {0.0}), 1e-8).active.empty());

  // constraint values 3e-9 and 2e-7 at x = 0
  const Problem shifted = one_dim("g1: x + 3e-9 >= 0\ng2: x + 2e-7 >= 0\n");
  const auto a = detect_active_set(shifted, Point({"x"}, {0.0}), 1e-8);
  EXPECT_EQ(a.active, (std::vector<std::size_t>{0}));
  EXPECT_TRUE(a.is_active(0));
  EXPECT_FALSE(a.is_active(1));
}

TEST(ActiveSet, InfeasiblePointAborts) {
  const Problem pr = one_dim("g1: 1 - x >= 0\n");
  EXPECT_THROW(detect_active_set(pr, Point({"x"}, {2.0})), InfeasiblePointError);
}

TEST(ActiveSet, MonotoneInTolerance) {
  testing::Gen g(41);
  for (int i = 0; i < 50; ++i) {
    std::string text;
    for (int k = 1; k <= 6; ++k) {
      const double offset = std::pow(10.0, g.uniform(-12, -3));
      text += "g" + std::to_string(k) + ": x + " + std::to_string(offset) + " >= 0\n";
    }
    const Problem pr = one_dim(text);
    const Point p({"x"}, {0.0});
    double tau = 1e-13;
    std::vector<std::size_t> prev;
    while (tau < 1e-2) {
      const auto cur = detect_active_set(pr, p, tau).active;
      EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
      prev = cur;
      tau *= 7.0;
    }
  }
}

TEST(ActiveSet, PermutingConstraintsPermutesIndices) {
  testing::Gen g(42);
  for (int i = 0; i < 30; ++i) {
    std::vector<std::string> rows;
    for (int k = 0; k < 5; ++k)
      rows.push_back(g.coin() ? "x*y + 1 - y" : "x + " + std::to_string(g.uniform_int(1, 3)) + " - y");
    std::vector<std::size_t> perm{0, 1, 2, 3, 4};
    std::shuffle(perm.begin(), perm.end(), g.engine());
    std::string original = "vars: x, y\nmaximize: x\n", permuted = original;
    for (std::size_t k = 0; k < 5; ++k) {
      original += "g" + std::to_string(k + 1) + ": " + rows[k] + " >= 0\n";
      permuted += "g" + std::to_string(k + 1) + ": " + rows[perm[k]] + " >= 0\n";
    }
    const Point p({"x", "y"}, {0.0, 1.0});
    const auto a = detect_active_set(load_problem(original).problem, p);
    const auto b = detect_active_set(load_problem(permuted).problem, p);
    std::vector<std::size_t> mapped;
    for (std::size_t k = 0; k < 5; ++k)
      if (a.is_active(perm[k])) mapped.push_back(k);
    EXPECT_EQ(b.active, mapped);
    for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(b.values[k], a.values[perm[k]]);
  }
}

TEST(Feasibility, Examples) {
  const Problem circle = load_problem_file(kData + "/circle.fj").problem;
  auto r = check_feasibility(circle, Point({"x", "y"}, {1.0, 1.0}));
  EXPECT_TRUE(r.feasible);
  EXPECT_EQ(r.worst_equality_violation, 0.0);
  r = check_feasibility(circle, Point({"x", "y"}, {2.0, 0.0}));
  EXPECT_FALSE(r.feasible);
  EXPECT_EQ(r.worst_equality_violation, 2.0);

  const Problem nonneg = one_dim("g1: x >= 0\n");
  EXPECT_TRUE(check_feasibility(nonneg, Point({"x"}, {-1e-12}), 1e-9).feasible);
  EXPECT_FALSE(check_feasibility(nonneg, Point({"x"}, {-1e-6}), 1e-9).feasible);
}

}  // namespace
}  // namespace fjcert
