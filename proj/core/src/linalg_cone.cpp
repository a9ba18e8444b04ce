#include "fjcert/linalg_cone.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "fjcert/errors.hpp"
#include "fjcert/simplex.hpp"

namespace fjcert {

LinFunc LinFunc::scaled(const Rational& s) const {
  LinFunc out(*this);
  for (auto& c : out.coeffs_) c *= s;
  return out;
}

LinFunc& LinFunc::add_scaled(const LinFunc& other, const Rational& s) {
  if (other.dim() != dim()) throw DimensionError("add_scaled: dimension mismatch");
  if (s.is_zero()) return *this;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (!other.coeffs_[i].is_zero()) coeffs_[i] += s * other.coeffs_[i];
  }
  return *this;
}

namespace {

void require_dimension(std::span<const LinFunc> phis, std::size_t n, const char* op) {
  for (const auto& phi : phis) {
    if (phi.dim() != n)
      throw DimensionError(std::string(op) + ": functional of dimension " + std::to_string(phi.dim()) +
                           " in a family of dimension " + std::to_string(n));
  }
}

}  // namespace

bool verify_combination(std::span<const LinFunc> phis, const LinFunc& a, std::span<const Rational> lambda) {
  if (lambda.size() != phis.size()) return false;
  LinFunc sum = LinFunc::zero(a.dim());
  for (std::size_t i = 0; i < phis.size(); ++i) {
    if (lambda[i].sign() < 0 || phis[i].dim() != a.dim()) return false;
    sum.add_scaled(phis[i], lambda[i]);
  }
  return sum == a;
}

bool verify_separator(std::span<const LinFunc> phis, const LinFunc& a, std::span<const Rational> x) {
  if (x.size() != a.dim()) return false;
  for (const auto& phi : phis) {
    if (phi.dim() != x.size() || phi.apply(x).sign() < 0) return false;
  }
  return a.apply(x).sign() < 0;
}

bool verify_certificate(std::span<const LinFunc> phis, const LinFunc& a, const ConeCertificate& cert) {
  if (const auto* c = std::get_if<Combination>(&cert)) return verify_combination(phis, a, c->lambda);
  return verify_separator(phis, a, std::get<Separator>(cert).x);
}

ConeCertificate farkas_decide(std::span<const LinFunc> phis, const LinFunc& a) {
  const std::size_t n = a.dim();
  const std::size_t m = phis.size();
  require_dimension(phis, n, "farkas_decide");

  // Phase 1 on  sum_i lambda_i (d_j phi_ij) + s_j = d_j a_j,  lambda, s >= 0,
  // with d_j = sign flip making the right-hand side non-negative.
  std::vector<int> flip(n, 1);
  RMatrix rows(n, RVec(m + n));
  RVec rhs(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (a[j].sign() < 0) flip[j] = -1;
    const Rational d(flip[j]);
    for (std::size_t i = 0; i < m; ++i) rows[j][i] = d * phis[i][j];
    rows[j][m + j] = Rational(1);
    rhs[j] = d * a[j];
  }
  RVec cost(m + n);
  std::vector<std::size_t> basis(n);
  for (std::size_t j = 0; j < n; ++j) {
    cost[m + j] = Rational(1);
    basis[j] = m + j;
  }

  SimplexTableau lp(std::move(rows), std::move(rhs), std::move(cost), std::move(basis));
  if (lp.solve() != LpStatus::Optimal) throw EngineFault("farkas_decide: phase-1 problem reported unbounded");

  if (lp.objective().is_zero()) {
    RVec x = lp.primal();
    Combination c{RVec(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(m))};
    if (!verify_combination(phis, a, c.lambda)) throw EngineFault("farkas_decide: combination fails exact check");
    return c;
  }

  // Optimal dual y_j = 1 - reduced cost of s_j satisfies y.(D phi_i) <= 0 and
  // y.(D a) > 0, so x = -D y separates.
  Separator sep{RVec(n)};
  for (std::size_t j = 0; j < n; ++j) {
    const Rational y = Rational(1) - lp.reduced_cost(m + j);
    sep.x[j] = flip[j] > 0 ? -y : y;
  }
  if (!verify_separator(phis, a, sep.x)) throw EngineFault("farkas_decide: separator fails exact check");
  return sep;
}

bool verify_strict_witness(std::span<const LinFunc> phis, const StrictWitness& w) {
  if (w.vacuous) return phis.empty();
  if (w.margin.sign() <= 0) return false;
  for (const auto& c : w.v) {
    if (c.abs() > Rational(1)) return false;
  }
  for (const auto& phi : phis) {
    if (phi.dim() != w.v.size() || phi.apply(w.v) < w.margin) return false;
  }
  return true;
}

std::optional<StrictWitness> strict_feasibility(std::span<const LinFunc> phis, std::size_t n) {
  require_dimension(phis, n, "strict_feasibility");
  const std::size_t m = phis.size();
  if (m == 0) return StrictWitness{RVec(n), Rational(), true};

  // columns: p[0,n) q[n,2n) s[2n] r[2n+1, 2n+1+m) wp, wq (n each); v = p - q
  const std::size_t col_s = 2 * n;
  const std::size_t col_r = col_s + 1;
  const std::size_t col_wp = col_r + m;
  const std::size_t col_wq = col_wp + n;
  const std::size_t cols = col_wq + n;
  const std::size_t rows_count = m + 2 * n;

  RMatrix rows(rows_count, RVec(cols));
  RVec rhs(rows_count);
  std::vector<std::size_t> basis(rows_count);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      rows[i][j] = -phis[i][j];
      rows[i][n + j] = phis[i][j];
    }
    rows[i][col_s] = Rational(1);
    rows[i][col_r + i] = Rational(1);
    basis[i] = col_r + i;
  }
  for (std::size_t j = 0; j < n; ++j) {
    rows[m + j][j] = Rational(1);
    rows[m + j][col_wp + j] = Rational(1);
    rhs[m + j] = Rational(1);
    basis[m + j] = col_wp + j;
    rows[m + n + j][n + j] = Rational(1);
    rows[m + n + j][col_wq + j] = Rational(1);
    rhs[m + n + j] = Rational(1);
    basis[m + n + j] = col_wq + j;
  }
  RVec cost(cols);
  cost[col_s] = Rational(-1);

  SimplexTableau lp(std::move(rows), std::move(rhs), std::move(cost), std::move(basis));
  if (lp.solve() != LpStatus::Optimal) throw EngineFault("strict_feasibility: margin problem reported unbounded");
  if (lp.objective().sign() >= 0) return std::nullopt;

  const RVec x = lp.primal();
  StrictWitness w;
  w.v.resize(n);
  for (std::size_t j = 0; j < n; ++j) w.v[j] = x[j] - x[n + j];
  w.margin = phis[0].apply(w.v);
  for (std::size_t i = 1; i < m; ++i) w.margin = std::min(w.margin, phis[i].apply(w.v));
  if (!verify_strict_witness(phis, w)) throw EngineFault("strict_feasibility: witness fails exact check");
  return w;
}

NullspaceResult nullspace_basis(std::span<const LinFunc> rows, std::size_t n) {
  require_dimension(rows, n, "nullspace_basis");
  RMatrix r;
  r.reserve(rows.size());
  for (const auto& row : rows) r.push_back(row.coeffs());

  NullspaceResult out;
  std::size_t pivot_row = 0;
  for (std::size_t col = 0; col < n && pivot_row < r.size(); ++col) {
    std::size_t found = pivot_row;
    while (found < r.size() && r[found][col].is_zero()) ++found;
    if (found == r.size()) continue;
    std::swap(r[pivot_row], r[found]);
    const Rational inv = Rational(1) / r[pivot_row][col];
    for (auto& c : r[pivot_row]) c *= inv;
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (k == pivot_row || r[k][col].is_zero()) continue;
      const Rational f = r[k][col];
      for (std::size_t j = col; j < n; ++j) {
        if (!r[pivot_row][j].is_zero()) r[k][j] -= f * r[pivot_row][j];
      }
    }
    out.pivots.push_back(col);
    ++pivot_row;
  }
  out.rank = out.pivots.size();

  std::vector<bool> is_pivot(n, false);
  for (auto p : out.pivots) is_pivot[p] = true;
  for (std::size_t f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    RVec v(n);
    v[f] = Rational(1);
    for (std::size_t k = 0; k < out.pivots.size(); ++k) v[out.pivots[k]] = -r[k][f];
    out.basis.push_back(std::move(v));
  }
  return out;
}

RankResult rank_independent(std::span<const LinFunc> rows) {
  if (rows.empty()) return {true, 0};
  const auto ns = nullspace_basis(rows, rows.front().dim());
  return {ns.rank == rows.size(), ns.rank};
}

RVec solve_square(const RMatrix& matrix, std::span<const Rational> rhs) {
  const std::size_t q = matrix.size();
  if (rhs.size() != q) throw DimensionError("solve_square: rhs size does not match matrix");
  RMatrix aug(matrix);
  for (std::size_t i = 0; i < q; ++i) {
    if (aug[i].size() != q) throw DimensionError("solve_square: matrix is not square");
    aug[i].push_back(rhs[i]);
  }
  for (std::size_t col = 0; col < q; ++col) {
    std::size_t found = col;
    while (found < q && aug[found][col].is_zero()) ++found;
    if (found == q) {
      std::vector<LinFunc> rows;
      for (const auto& row : matrix) rows.emplace_back(row);
      throw SingularMatrixError(q, rank_independent(rows).rank);
    }
    std::swap(aug[col], aug[found]);
    const Rational inv = Rational(1) / aug[col][col];
    for (auto& c : aug[col]) c *= inv;
    for (std::size_t k = 0; k < q; ++k) {
      if (k == col || aug[k][col].is_zero()) continue;
      const Rational f = aug[k][col];
      for (std::size_t j = col; j <= q; ++j) {
        if (!aug[col][j].is_zero()) aug[k][j] -= f * aug[col][j];
      }
    }
  }
  RVec x(q);
  for (std::size_t i = 0; i < q; ++i) x[i] = aug[i][q];
  return x;
}

// ---------------------------------------------------------------------------
// Fourier-Motzkin oracle over homogeneous systems  c.x >= 0  /  c.x > 0

namespace {

struct Inequality {
  RVec c;
  bool strict = false;
};

// Scales to max |c_j| = 1. Returns false when the row is all zero.
bool normalize(Inequality& ineq) {
  const Rational m = max_abs(ineq.c);
  if (m.is_zero()) return false;
  for (auto& x : ineq.c) x /= m;
  return true;
}

// true iff the system has no solution
bool fm_infeasible(std::vector<Inequality> system, std::size_t n) {
  auto admit = [](std::vector<Inequality>& out, std::set<std::string>& seen, Inequality ineq) {
    if (!normalize(ineq)) return !ineq.strict;  // 0 >= 0 holds, 0 > 0 does not
    std::string key = join(ineq.c, ",") + (ineq.strict ? ">" : ">=");
    if (seen.insert(std::move(key)).second) out.push_back(std::move(ineq));
    return true;
  };

  std::vector<Inequality> current;
  {
    std::set<std::string> seen;
    for (auto& ineq : system) {
      if (!admit(current, seen, std::move(ineq))) return true;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<const Inequality*> pos;
    std::vector<const Inequality*> neg;
    std::vector<Inequality> next;
    std::set<std::string> seen;
    for (const auto& ineq : current) {
      const int s = ineq.c[k].sign();
      if (s > 0) {
        pos.push_back(&ineq);
      } else if (s < 0) {
        neg.push_back(&ineq);
      } else if (!admit(next, seen, ineq)) {
        return true;
      }
    }
    for (const auto* p : pos) {
      for (const auto* q : neg) {
        Inequality combined{RVec(n), p->strict || q->strict};
        const Rational wp = -q->c[k];
        const Rational wq = p->c[k];
        for (std::size_t j = 0; j < n; ++j) combined.c[j] = wp * p->c[j] + wq * q->c[j];
        combined.c[k] = Rational();
        if (!admit(next, seen, std::move(combined))) return true;
      }
    }
    current = std::move(next);
  }
  return false;
}

void guard_dimension(std::size_t n) {
  if (n > kFourierMotzkinMaxDimension)
    throw DimensionError("Fourier-Motzkin oracle limited to dimension " +
                         std::to_string(kFourierMotzkinMaxDimension) + ", got " + std::to_string(n));
}

}  // namespace

bool fm_oracle(std::span<const LinFunc> phis, const LinFunc& a) {
  const std::size_t n = a.dim();
  guard_dimension(n);
  require_dimension(phis, n, "fm_oracle");
  std::vector<Inequality> system;
  for (const auto& phi : phis) system.push_back({phi.coeffs(), false});
  system.push_back({a.scaled(Rational(-1)).coeffs(), true});
  return fm_infeasible(std::move(system), n);
}

bool fm_oracle_strict(std::span<const LinFunc> phis, std::size_t n) {
  guard_dimension(n);
  require_dimension(phis, n, "fm_oracle_strict");
  std::vector<Inequality> system;
  for (const auto& phi : phis) system.push_back({phi.coeffs(), true});
  return fm_infeasible(std::move(system), n);
}

}  // namespace fjcert
