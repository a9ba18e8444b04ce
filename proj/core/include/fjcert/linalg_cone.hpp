#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "fjcert/rational.hpp"

namespace fjcert {

/// A row functional in the dual of R^n.
class LinFunc {
 public:
  LinFunc() = default;
  explicit LinFunc(RVec coeffs) : coeffs_(std::move(coeffs)) {}

  static LinFunc zero(std::size_t n) { return LinFunc(RVec(n)); }
  static LinFunc from_doubles(std::span<const double> values) { return LinFunc(rationalize(values)); }

  std::size_t dim() const { return coeffs_.size(); }
  const RVec& coeffs() const { return coeffs_; }
  const Rational& operator[](std::size_t i) const { return coeffs_[i]; }
  Rational& operator[](std::size_t i) { return coeffs_[i]; }

  Rational apply(std::span<const Rational> v) const { return dot(coeffs_, v); }
  bool is_zero() const { return all_zero(coeffs_); }

  LinFunc scaled(const Rational& s) const;
  LinFunc& add_scaled(const LinFunc& other, const Rational& s);

  friend bool operator==(const LinFunc&, const LinFunc&) = default;

 private:
  RVec coeffs_;
};

using RMatrix = std::vector<RVec>;

/// a is the non-negative combination sum_i lambda_i phi_i.
struct Combination {
  RVec lambda;
};

/// phi_i . x >= 0 for every i while a . x < 0.
struct Separator {
  RVec x;
};

/// The two mutually exclusive alternatives for cone membership of a.
using ConeCertificate = std::variant<Combination, Separator>;

inline bool is_combination(const ConeCertificate& c) { return std::holds_alternative<Combination>(c); }

bool verify_combination(std::span<const LinFunc> phis, const LinFunc& a, std::span<const Rational> lambda);
bool verify_separator(std::span<const LinFunc> phis, const LinFunc& a, std::span<const Rational> x);
bool verify_certificate(std::span<const LinFunc> phis, const LinFunc& a, const ConeCertificate& cert);

/// Decides whether a lies in the cone generated by `phis`, in exact
/// arithmetic. A phase-1 simplex either finds the combination or its optimal
/// dual yields a separating vector. An empty family gives a Combination iff
/// a = 0.
ConeCertificate farkas_decide(std::span<const LinFunc> phis, const LinFunc& a);

struct StrictWitness {
  RVec v;
  /// min_i phi_i . v; meaningless when `vacuous`.
  Rational margin;
  /// set for the empty family, where every v qualifies
  bool vacuous = false;
};

bool verify_strict_witness(std::span<const LinFunc> phis, const StrictWitness& w);

/// Finds v with phi_i . v > 0 for all i, or proves none exists, by maximizing
/// s subject to phi_i . v >= s, 0 <= s, -1 <= v_j <= 1. `n` fixes the
/// dimension for the empty family.
std::optional<StrictWitness> strict_feasibility(std::span<const LinFunc> phis, std::size_t n);

struct NullspaceResult {
  std::vector<RVec> basis;
  /// pivot columns of the reduced row echelon form, ascending
  std::vector<std::size_t> pivots;
  std::size_t rank = 0;
};

/// Basis of { v : row . v = 0 for every row } by exact Gauss-Jordan
/// elimination. One basis vector per free column, with a 1 in that column.
NullspaceResult nullspace_basis(std::span<const LinFunc> rows, std::size_t n);

struct RankResult {
  bool independent = true;
  std::size_t rank = 0;
};

RankResult rank_independent(std::span<const LinFunc> rows);

/// Exact solve of a square system. Throws SingularMatrixError.
RVec solve_square(const RMatrix& matrix, std::span<const Rational> rhs);

inline constexpr std::size_t kFourierMotzkinMaxDimension = 6;

/// Fourier-Motzkin oracle: true iff { x : phi_i . x >= 0, a . x < 0 } is empty.
bool fm_oracle(std::span<const LinFunc> phis, const LinFunc& a);

/// Fourier-Motzkin oracle: true iff { v : phi_i . v > 0 for all i } is empty.
bool fm_oracle_strict(std::span<const LinFunc> phis, std::size_t n);

}  // namespace fjcert
