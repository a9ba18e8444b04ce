#include "fjcert/simplex.hpp"

#include <limits>
#include <string>

#include "fjcert/errors.hpp"

namespace fjcert {

SimplexTableau::SimplexTableau(std::vector<RVec> a, RVec b, RVec c, std::vector<std::size_t> basis)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), basis_(std::move(basis)) {
  const std::size_t m = a_.size();
  const std::size_t n = c_.size();
  if (b_.size() != m || basis_.size() != m)
    throw DimensionError("simplex: rhs and basis must have one entry per row");
  for (std::size_t r = 0; r < m; ++r) {
    if (a_[r].size() != n) throw DimensionError("simplex: ragged constraint matrix");
    if (b_[r].sign() < 0) throw ContractViolation("simplex: initial basis is not feasible");
    if (basis_[r] >= n) throw DimensionError("simplex: basis column out of range");
    for (std::size_t k = 0; k < m; ++k) {
      if (a_[k][basis_[r]] != Rational(k == r ? 1 : 0))
        throw ContractViolation("simplex: basis columns do not form an identity");
    }
  }
  rc_ = c_;
  for (std::size_t r = 0; r < m; ++r) {
    const Rational& cb = c_[basis_[r]];
    if (cb.is_zero()) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (!a_[r][j].is_zero()) rc_[j] -= cb * a_[r][j];
    }
    z_ += cb * b_[r];
  }
}

std::size_t SimplexTableau::iteration_bound() const {
  const std::size_t e = rows() + cols();
  return e >= 62 ? (std::size_t{1} << 62) : (std::size_t{1} << e);
}

void SimplexTableau::pivot(std::size_t row, std::size_t col) {
  const std::size_t m = rows();
  const std::size_t n = cols();
  const Rational inv = Rational(1) / a_[row][col];
  for (std::size_t j = 0; j < n; ++j) {
    if (!a_[row][j].is_zero()) a_[row][j] *= inv;
  }
  b_[row] *= inv;
  for (std::size_t r = 0; r < m; ++r) {
    if (r == row || a_[r][col].is_zero()) continue;
    const Rational f = a_[r][col];
    for (std::size_t j = 0; j < n; ++j) {
      if (!a_[row][j].is_zero()) a_[r][j] -= f * a_[row][j];
    }
    b_[r] -= f * b_[row];
  }
  if (!rc_[col].is_zero()) {
    const Rational f = rc_[col];
    for (std::size_t j = 0; j < n; ++j) {
      if (!a_[row][j].is_zero()) rc_[j] -= f * a_[row][j];
    }
    z_ += f * b_[row];
  }
  basis_[row] = col;
}

LpStatus SimplexTableau::solve() {
  const std::size_t m = rows();
  const std::size_t n = cols();
  const std::size_t bound = iteration_bound();
  for (;;) {
    std::size_t enter = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (rc_[j].sign() < 0) {
        enter = j;
        break;
      }
    }
    if (enter == n) return LpStatus::Optimal;

    std::size_t leave = m;
    Rational best;
    for (std::size_t r = 0; r < m; ++r) {
      if (a_[r][enter].sign() <= 0) continue;
      Rational ratio = b_[r] / a_[r][enter];
      if (leave == m || ratio < best || (ratio == best && basis_[r] < basis_[leave])) {
        leave = r;
        best = std::move(ratio);
      }
    }
    if (leave == m) return LpStatus::Unbounded;

    pivot(leave, enter);
    if (++iterations_ >= bound)
      throw EngineFault("simplex exceeded its iteration bound (" + std::to_string(bound) + ")");
  }
}

RVec SimplexTableau::primal() const {
  RVec x(cols());
  for (std::size_t r = 0; r < rows(); ++r) x[basis_[r]] = b_[r];
  return x;
}

}  // namespace fjcert
