#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fjcert/linalg_cone.hpp"
#include "fjcert/problem.hpp"

namespace fjcert {

/// How a multiplier vector was obtained.
enum class Regime {
  DependentEqualities,  ///< equality gradients are dependent; lambda = 0, mu spans their relation
  Interior,             ///< no active inequality; the objective gradient vanishes
  Degenerate,           ///< the last active gradient is zero; it alone carries the multiplier
  Staircase,            ///< minimal nonempty strict set A_k plus a Farkas step
  Direct,               ///< one exact LP over the simplex of multipliers
};

enum class Normalization { MaxNormOne, Lambda0One };

std::string_view to_string(Regime r);
std::string_view to_string(Normalization n);

/// Which Fritz John / KKT conclusions a certificate satisfies:
/// (a) multipliers not all zero, (b) complementary slackness, (c) stationarity,
/// (d) inequality-side multipliers not all zero, (e) objective multiplier one.
struct Conclusions {
  bool a = false;
  bool b = false;
  bool c = false;
  bool d = false;
  bool e = false;
};

// ---------------------------------------------------------------------------
// Inequality-only problems: gradients at the candidate point of the
// objective (index 0) and of the active constraints (indices 1..e).

struct InequalityGradients {
  LinFunc objective;
  std::vector<LinFunc> active;

  std::size_t dim() const { return objective.dim(); }
  /// objective followed by the active gradients
  std::vector<LinFunc> all() const;
};

struct InequalityMultipliers {
  /// length e+1, index 0 is the objective
  RVec lambda;
  Regime regime = Regime::Direct;
  /// minimal index with A_k nonempty, staircase regime only
  std::optional<std::size_t> k;
};

/// sum_i lambda_i grad_i == 0, exactly.
bool exact_stationarity(const InequalityGradients& g, std::span<const Rational> lambda);

/// lambda >= 0 with sum lambda = 1 and sum lambda_i grad_i = 0, found by one
/// exact phase-1 LP. nullopt means no Fritz John multipliers exist.
std::optional<InequalityMultipliers> fj_inequality_direct(const InequalityGradients& g);

/// A_k nonemptiness for k = 0..e, where
/// A_k = { v : grad_i . v > 0 for i = k..e }.
std::vector<bool> a_set_nonemptiness(const InequalityGradients& g);

/// Multipliers assembled from the nested strict sets A_k: refutes when A_0 is
/// nonempty, puts the whole weight on the last constraint when A_e is empty,
/// otherwise applies Farkas to the auxiliary linear problem at the minimal
/// nonempty index k and sets lambda_{k-1} = 1.
std::optional<InequalityMultipliers> fj_inequality_staircase(const InequalityGradients& g);

/// w with grad_i . w > 0 for every active i (vacuous when none is active).
std::optional<StrictWitness> mfcq_witness_inequality(const InequalityGradients& g);

/// Multipliers with lambda_0 = 1. Throws ContractViolation when no strict
/// witness exists for the active gradients; returns nullopt when the Farkas
/// step fails, which only happens if no Fritz John multipliers exist at all.
std::optional<InequalityMultipliers> normalize_lambda0(const InequalityGradients& g);

// ---------------------------------------------------------------------------
// Problems with equality constraints.

/// Gradients at the candidate point, rationalized exactly from the AD values.
struct GradientTable {
  std::size_t n = 0;
  LinFunc objective;
  std::vector<LinFunc> active;
  /// index into Problem::inequalities of each entry of `active`
  std::vector<std::size_t> active_index;
  /// total number of inequalities p
  std::size_t inequality_count = 0;
  std::vector<LinFunc> equality;
};

GradientTable gradient_table(const Problem& pr, const Point& x, const ActiveSet& active);

/// Restriction to E1 = Ker Dh, with the complement E2 spanned by the pivot
/// coordinate axes of the elimination of Dh.
struct ReducedProblem {
  std::vector<RVec> kernel_basis;
  std::vector<std::size_t> complement_pivots;
  /// gradients in kernel coordinates: entry k is grad . kernel_basis[k]
  LinFunc objective;
  std::vector<LinFunc> active;

  std::size_t dim() const { return kernel_basis.size(); }
  InequalityGradients as_inequality() const { return {objective, active}; }
};

RankResult licq_check(std::span<const LinFunc> equality_gradients);

/// Throws ContractViolation when the equality gradients are dependent.
ReducedProblem reduce_equalities(const GradientTable& t);

/// Equality multipliers completing reduced multipliers `lambda` (length e+1)
/// to full stationarity. Throws ContractViolation if `lambda` does not solve
/// the reduced stationarity equation.
RVec recover_mu(std::span<const Rational> lambda, const GradientTable& t, const ReducedProblem& red);

/// w in Ker Dh with grad_i . w > 0 for every active i. Throws
/// ContractViolation when the equality gradients are dependent.
std::optional<StrictWitness> mfcq_witness_equality(std::span<const LinFunc> active,
                                                   std::span<const LinFunc> equality, std::size_t n);

enum class MfcqForm { InequalityOnly, WithEqualities };

struct QualificationReport {
  bool licq = true;
  std::size_t equality_rank = 0;
  std::size_t equality_count = 0;
  /// false when LICQ fails (the kernel form is then undefined)
  bool mfcq_evaluated = false;
  bool mfcq = false;
  MfcqForm mfcq_form = MfcqForm::InequalityOnly;
  std::optional<StrictWitness> witness;
};

QualificationReport qualify(const GradientTable& t);

struct FJCertificate {
  /// length p+1, index 0 is the objective
  RVec lambda;
  /// length q
  RVec mu;
  Normalization normalization = Normalization::MaxNormOne;
  Regime regime = Regime::Direct;
  Conclusions flags;
  std::optional<std::size_t> staircase_k;
};

/// lambda_0 grad f + sum lambda_i grad g_i + sum mu_j grad h_j over the
/// table's exact gradients. Inactive inequalities contribute nothing, so a
/// nonzero lambda on one of them is reported by `exact_complementarity`.
LinFunc stationarity_residual(const FJCertificate& c, const GradientTable& t);
bool exact_complementarity(const FJCertificate& c, const GradientTable& t);

struct EngineResult {
  bool certified = false;
  /// max-norm scaled certificate (reported)
  std::optional<FJCertificate> certificate;
  /// lambda_0 = 1 form, present when MFCQ holds
  std::optional<FJCertificate> kkt;
  QualificationReport qualifications;
  /// raw outputs of both inequality algorithms on the reduced problem
  std::optional<InequalityMultipliers> direct;
  std::optional<InequalityMultipliers> staircase;
};

/// The certification pipeline on precomputed gradients. Both inequality
/// algorithms run and must agree; disagreement raises EngineFault.
EngineResult certify_gradients(const GradientTable& t);

struct Tolerances {
  double active = kDefaultTolActive;
  double feas = kDefaultTolFeas;
  double stat = kDefaultTolStat;
};

struct Certification {
  EngineResult result;
  FeasibilityReport feasibility;
  ActiveSet active_set;
  GradientTable gradients;
};

/// feasibility -> active set -> AD gradients -> exact certification.
/// Throws InfeasiblePointError, DomainError, EngineFault.
Certification full_certify(const Problem& pr, const Point& x, const Tolerances& tol = {});

struct VerificationReport {
  bool well_formed = false;
  bool a = false;
  bool b = false;
  bool c = false;
  double stationarity_residual = 0.0;
  /// max |g_i(x)| over inequalities carrying a nonzero multiplier
  double worst_complementarity = 0.0;

  bool pass() const { return well_formed && a && b && c; }
};

/// Re-checks (a)(b)(c) using central-difference gradients, independent of the
/// AD path. Stationarity passes when ||residual||_inf <= tol.stat * max(1, max|multiplier|).
VerificationReport verify_certificate(const Problem& pr, const Point& x, const FJCertificate& cert,
                                      const Tolerances& tol = {});

}  // namespace fjcert
