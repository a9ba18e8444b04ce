#pragma once

#include <cstddef>
#include <vector>

#include "fjcert/rational.hpp"

namespace fjcert {

enum class LpStatus { Optimal, Unbounded };

/// Dense exact simplex tableau for
///
///   minimize c.x  subject to  A x = b,  x >= 0,
///
/// started from a feasible basis whose columns in A form an identity and
/// with b >= 0. Pivoting follows Bland's smallest-index rule, so it
/// terminates on degenerate problems without perturbation.
class SimplexTableau {
 public:
  SimplexTableau(std::vector<RVec> a, RVec b, RVec c, std::vector<std::size_t> basis);

  LpStatus solve();

  std::size_t rows() const { return a_.size(); }
  std::size_t cols() const { return c_.size(); }
  std::size_t iterations() const { return iterations_; }

  const Rational& objective() const { return z_; }
  const Rational& reduced_cost(std::size_t j) const { return rc_[j]; }
  const std::vector<std::size_t>& basis() const { return basis_; }
  RVec primal() const;

  /// Upper bound on pivots before the solver declares a fault: 2^(rows+cols),
  /// saturated at 2^62.
  std::size_t iteration_bound() const;

 private:
  void pivot(std::size_t row, std::size_t col);

  std::vector<RVec> a_;
  RVec b_;
  RVec c_;
  RVec rc_;
  Rational z_;
  std::vector<std::size_t> basis_;
  std::size_t iterations_ = 0;
};

}  // namespace fjcert
