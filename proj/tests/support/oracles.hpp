#pragma once

// Test-only oracles. None of these share code paths with the routines they
// check: determinants come from permutation expansion, combinations from
// Caratheodory subset enumeration with Cramer's rule, separators from a box
// LP that is formulated differently from the phase-1 Farkas problem.

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

#include "fjcert/linalg_cone.hpp"
#include "fjcert/simplex.hpp"

namespace fjcert::testing {

/// Leibniz expansion; fine for k <= 5.
inline Rational leibniz_det(const RMatrix& m) {
  const std::size_t k = m.size();
  if (k == 0) return Rational(1);
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  Rational det;
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j)
        if (perm[i] > perm[j]) ++inversions;
    Rational term(inversions % 2 ? -1 : 1);
    for (std::size_t i = 0; i < k && !term.is_zero(); ++i) term *= m[i][perm[i]];
    det += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return det;
}

inline std::vector<std::vector<std::size_t>> subsets_of_size(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> mask(n, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(std::min(k, n)), true);
  if (k > n) return out;
  do {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask[i]) s.push_back(i);
    out.push_back(std::move(s));
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return out;
}

/// Rank as the size of the largest nonzero minor.
inline std::size_t minor_rank(const RMatrix& rows, std::size_t n) {
  const std::size_t r = rows.size();
  for (std::size_t k = std::min(r, n); k > 0; --k) {
    for (const auto& rs : subsets_of_size(r, k)) {
      for (const auto& cs : subsets_of_size(n, k)) {
        RMatrix m(k, RVec(k));
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) m[i][j] = rows[rs[i]][cs[j]];
        if (!leibniz_det(m).is_zero()) return k;
      }
    }
  }
  return 0;
}

/// Cramer's rule on a nonsingular square system.
inline RVec cramer(const RMatrix& m, const RVec& b) {
  const Rational d = leibniz_det(m);
  RVec x(m.size());
  for (std::size_t j = 0; j < m.size(); ++j) {
    RMatrix mj = m;
    for (std::size_t i = 0; i < m.size(); ++i) mj[i][j] = b[i];
    x[j] = leibniz_det(mj) / d;
  }
  return x;
}

/// a = sum lambda_i phi_i with lambda >= 0, searched over linearly
/// independent subfamilies (Caratheodory). nullopt when none exists.
inline std::optional<RVec> brute_force_combination(const std::vector<LinFunc>& phis, const LinFunc& a) {
  const std::size_t n = a.dim();
  const std::size_t m = phis.size();
  if (a.is_zero()) return RVec(m);
  for (std::size_t k = 1; k <= std::min(n, m); ++k) {
    for (const auto& s : subsets_of_size(m, k)) {
      for (const auto& rows : subsets_of_size(n, k)) {
        RMatrix sys(k, RVec(k));
        RVec rhs(k);
        for (std::size_t i = 0; i < k; ++i) {
          for (std::size_t j = 0; j < k; ++j) sys[i][j] = phis[s[j]][rows[i]];
          rhs[i] = a[rows[i]];
        }
        if (leibniz_det(sys).is_zero()) continue;
        const RVec coef = cramer(sys, rhs);
        if (std::any_of(coef.begin(), coef.end(), [](const Rational& r) { return r.sign() < 0; })) break;
        RVec lambda(m);
        for (std::size_t j = 0; j < k; ++j) lambda[s[j]] = coef[j];
        if (verify_combination(phis, a, lambda)) return lambda;
        break;  // subfamily fixed; another row choice gives the same solution
      }
    }
  }
  return std::nullopt;
}

/// minimize a.x  s.t.  phi_i.x >= 0, -1 <= x <= 1. A negative optimum gives a separator.
inline std::optional<RVec> lp_separator(const std::vector<LinFunc>& phis, const LinFunc& a) {
  const std::size_t n = a.dim();
  const std::size_t m = phis.size();
  // columns: p[0,n) q[n,2n) t[2n,2n+m) wp, wq
  const std::size_t ct = 2 * n, cwp = ct + m, cwq = cwp + n, cols = cwq + n;
  RMatrix rows(m + 2 * n, RVec(cols));
  RVec rhs(m + 2 * n);
  std::vector<std::size_t> basis(m + 2 * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      rows[i][j] = -phis[i][j];
      rows[i][n + j] = phis[i][j];
    }
    rows[i][ct + i] = Rational(1);
    basis[i] = ct + i;
  }
  for (std::size_t j = 0; j < n; ++j) {
    rows[m + j][j] = Rational(1);
    rows[m + j][cwp + j] = Rational(1);
    rhs[m + j] = Rational(1);
    basis[m + j] = cwp + j;
    rows[m + n + j][n + j] = Rational(1);
    rows[m + n + j][cwq + j] = Rational(1);
    rhs[m + n + j] = Rational(1);
    basis[m + n + j] = cwq + j;
  }
  RVec cost(cols);
  for (std::size_t j = 0; j < n; ++j) {
    cost[j] = a[j];
    cost[n + j] = -a[j];
  }
  SimplexTableau lp(std::move(rows), std::move(rhs), std::move(cost), std::move(basis));
  if (lp.solve() != LpStatus::Optimal || lp.objective().sign() >= 0) return std::nullopt;
  const RVec x = lp.primal();
  RVec sep(n);
  for (std::size_t j = 0; j < n; ++j) sep[j] = x[j] - x[n + j];
  return sep;
}

}  // namespace fjcert::testing
