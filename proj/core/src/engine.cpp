#include "fjcert/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fjcert/errors.hpp"

namespace fjcert {

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::DependentEqualities: return "dependent-equalities";
    case Regime::Interior: return "interior";
    case Regime::Degenerate: return "degenerate";
    case Regime::Staircase: return "staircase";
    case Regime::Direct: return "direct";
  }
  return "unknown";
}

std::string_view to_string(Normalization n) {
  return n == Normalization::MaxNormOne ? "maxnorm-one" : "lambda0-one";
}

// ---------------------------------------------------------------------------
// inequality-only engine

std::vector<LinFunc> InequalityGradients::all() const {
  std::vector<LinFunc> out;
  out.reserve(active.size() + 1);
  out.push_back(objective);
  out.insert(out.end(), active.begin(), active.end());
  return out;
}

namespace {

void require_common_dimension(const InequalityGradients& g) {
  for (const auto& a : g.active) {
    if (a.dim() != g.dim()) throw DimensionError("gradient table mixes dimensions");
  }
}

}  // namespace

bool exact_stationarity(const InequalityGradients& g, std::span<const Rational> lambda) {
  if (lambda.size() != g.active.size() + 1) return false;
  LinFunc sum = g.objective.scaled(lambda[0]);
  for (std::size_t i = 0; i < g.active.size(); ++i) sum.add_scaled(g.active[i], lambda[i + 1]);
  return sum.is_zero();
}

std::optional<InequalityMultipliers> fj_inequality_direct(const InequalityGradients& g) {
  require_common_dimension(g);
  const std::size_t n = g.dim();
  if (g.active.empty()) {
    if (!g.objective.is_zero()) return std::nullopt;
    return InequalityMultipliers{{Rational(1)}, Regime::Interior, std::nullopt};
  }
  // sum lambda_i (grad_i, 1) = (0, 1)  with lambda >= 0
  std::vector<LinFunc> columns;
  for (const auto& grad : g.all()) {
    RVec c = grad.coeffs();
    c.emplace_back(1);
    columns.emplace_back(std::move(c));
  }
  RVec target(n + 1);
  target[n] = Rational(1);
  const auto cert = farkas_decide(columns, LinFunc(std::move(target)));
  if (!is_combination(cert)) return std::nullopt;
  return InequalityMultipliers{std::get<Combination>(cert).lambda, Regime::Direct, std::nullopt};
}

std::vector<bool> a_set_nonemptiness(const InequalityGradients& g) {
  require_common_dimension(g);
  const auto all = g.all();
  std::vector<bool> nonempty(all.size());
  for (std::size_t k = 0; k < all.size(); ++k) {
    nonempty[k] = strict_feasibility(std::span<const LinFunc>(all).subspan(k), g.dim()).has_value();
  }
  return nonempty;
}

std::optional<InequalityMultipliers> fj_inequality_staircase(const InequalityGradients& g) {
  require_common_dimension(g);
  const std::size_t e = g.active.size();
  if (e == 0) {
    if (!g.objective.is_zero()) return std::nullopt;
    return InequalityMultipliers{{Rational(1)}, Regime::Interior, std::nullopt};
  }

  const std::vector<bool> nonempty = a_set_nonemptiness(g);
  for (std::size_t k = 0; k < e; ++k) {
    if (nonempty[k] && !nonempty[k + 1])
      throw EngineFault("strict sets violate A_k subset A_{k+1} at k = " + std::to_string(k));
  }
  // A_0 nonempty: a direction improves the objective and every active constraint
  if (nonempty[0]) return std::nullopt;

  InequalityMultipliers out;
  out.lambda.assign(e + 1, Rational());
  if (!nonempty[e]) {
    out.lambda[e] = Rational(1);
    out.regime = Regime::Degenerate;
    return out;
  }

  std::size_t k = 1;
  while (!nonempty[k]) ++k;

  // 0 maximizes grad_{k-1} . v over { grad_i . v >= 0, i = k..e }, hence
  // -grad_{k-1} lies in the cone of grad_k..grad_e.
  const auto all = g.all();
  const auto cert = farkas_decide(std::span<const LinFunc>(all).subspan(k), all[k - 1].scaled(Rational(-1)));
  if (!is_combination(cert))
    throw EngineFault("auxiliary problem at k = " + std::to_string(k) + " has a positive value");
  const RVec& alpha = std::get<Combination>(cert).lambda;
  out.lambda[k - 1] = Rational(1);
  for (std::size_t i = k; i <= e; ++i) out.lambda[i] = alpha[i - k];
  out.regime = Regime::Staircase;
  out.k = k;
  return out;
}

std::optional<StrictWitness> mfcq_witness_inequality(const InequalityGradients& g) {
  require_common_dimension(g);
  return strict_feasibility(g.active, g.dim());
}

std::optional<InequalityMultipliers> normalize_lambda0(const InequalityGradients& g) {
  if (!mfcq_witness_inequality(g))
    throw ContractViolation("normalize_lambda0 requires a strict witness for the active gradients");
  const auto cert = farkas_decide(g.active, g.objective.scaled(Rational(-1)));
  if (!is_combination(cert)) return std::nullopt;
  InequalityMultipliers out;
  out.lambda.push_back(Rational(1));
  const RVec& alpha = std::get<Combination>(cert).lambda;
  out.lambda.insert(out.lambda.end(), alpha.begin(), alpha.end());
  out.regime = Regime::Direct;
  return out;
}

// ---------------------------------------------------------------------------
// equality constraints

GradientTable gradient_table(const Problem& pr, const Point& x, const ActiveSet& active) {
  GradientTable t;
  t.n = pr.dimension();
  t.objective = LinFunc::from_doubles(gradient(pr.objective, x));
  t.inequality_count = pr.inequalities.size();
  for (std::size_t i : active.active) {
    t.active.push_back(LinFunc::from_doubles(gradient(pr.inequalities.at(i).expr, x)));
    t.active_index.push_back(i);
  }
  for (const auto& h : pr.equalities) t.equality.push_back(LinFunc::from_doubles(gradient(h.expr, x)));
  return t;
}

RankResult licq_check(std::span<const LinFunc> equality_gradients) {
  return rank_independent(equality_gradients);
}

namespace {

LinFunc project(const LinFunc& grad, const std::vector<RVec>& basis) {
  RVec coords;
  coords.reserve(basis.size());
  for (const auto& b : basis) coords.push_back(grad.apply(b));
  return LinFunc(std::move(coords));
}

void require_table(const GradientTable& t) {
  if (t.objective.dim() != t.n) throw DimensionError("objective gradient has the wrong dimension");
  if (t.active.size() != t.active_index.size()) throw DimensionError("active index bookkeeping mismatch");
  for (const auto& a : t.active) {
    if (a.dim() != t.n) throw DimensionError("inequality gradient has the wrong dimension");
  }
  for (const auto& h : t.equality) {
    if (h.dim() != t.n) throw DimensionError("equality gradient has the wrong dimension");
  }
}

}  // namespace

ReducedProblem reduce_equalities(const GradientTable& t) {
  require_table(t);
  if (!licq_check(t.equality).independent)
    throw ContractViolation("reduce_equalities requires linearly independent equality gradients");
  auto ns = nullspace_basis(t.equality, t.n);
  for (const auto& h : t.equality) {
    for (const auto& b : ns.basis) {
      if (!h.apply(b).is_zero()) throw EngineFault("kernel basis vector not annihilated by Dh");
    }
  }
  ReducedProblem red;
  red.kernel_basis = std::move(ns.basis);
  red.complement_pivots = std::move(ns.pivots);
  red.objective = project(t.objective, red.kernel_basis);
  for (const auto& a : t.active) red.active.push_back(project(a, red.kernel_basis));
  return red;
}

RVec recover_mu(std::span<const Rational> lambda, const GradientTable& t, const ReducedProblem& red) {
  if (lambda.size() != t.active.size() + 1) throw DimensionError("recover_mu: lambda has the wrong length");
  LinFunc r = t.objective.scaled(lambda[0]);
  for (std::size_t i = 0; i < t.active.size(); ++i) r.add_scaled(t.active[i], lambda[i + 1]);

  // On the E2 axes:  sum_j mu_j Dh_j[p] = -r[p]  for every pivot coordinate p.
  const std::size_t q = t.equality.size();
  if (red.complement_pivots.size() != q) throw ContractViolation("recover_mu: reduction does not match the table");
  RMatrix m(q, RVec(q));
  RVec rhs(q);
  for (std::size_t c = 0; c < q; ++c) {
    const std::size_t p = red.complement_pivots[c];
    for (std::size_t j = 0; j < q; ++j) m[c][j] = t.equality[j][p];
    rhs[c] = -r[p];
  }
  RVec mu;
  try {
    mu = solve_square(m, rhs);
  } catch (const SingularMatrixError& e) {
    throw EngineFault(std::string("recover_mu: D2h not invertible on the pivot axes: ") + e.what());
  }
  for (std::size_t j = 0; j < q; ++j) r.add_scaled(t.equality[j], mu[j]);
  if (!r.is_zero()) throw ContractViolation("recover_mu: lambda does not solve the reduced stationarity equation");
  return mu;
}

std::optional<StrictWitness> mfcq_witness_equality(std::span<const LinFunc> active,
                                                   std::span<const LinFunc> equality, std::size_t n) {
  for (const auto& a : active) {
    if (a.dim() != n) throw DimensionError("mfcq_witness_equality: dimension mismatch");
  }
  if (!licq_check(equality).independent)
    throw ContractViolation("mfcq_witness_equality requires linearly independent equality gradients");
  if (active.empty()) return StrictWitness{RVec(n), Rational(), true};

  const auto ns = nullspace_basis(equality, n);
  std::vector<LinFunc> projected;
  for (const auto& a : active) projected.push_back(project(a, ns.basis));
  const auto reduced = strict_feasibility(projected, ns.basis.size());
  if (!reduced) return std::nullopt;

  StrictWitness w;
  w.v.assign(n, Rational());
  for (std::size_t k = 0; k < ns.basis.size(); ++k) {
    for (std::size_t j = 0; j < n; ++j) w.v[j] += reduced->v[k] * ns.basis[k][j];
  }
  const Rational scale = std::max(Rational(1), max_abs(w.v));
  for (auto& c : w.v) c /= scale;
  w.margin = active[0].apply(w.v);
  for (const auto& a : active) w.margin = std::min(w.margin, a.apply(w.v));
  for (const auto& h : equality) {
    if (!h.apply(w.v).is_zero()) throw EngineFault("lifted witness leaves Ker Dh");
  }
  if (!verify_strict_witness(active, w)) throw EngineFault("lifted witness fails exact check");
  return w;
}

QualificationReport qualify(const GradientTable& t) {
  require_table(t);
  QualificationReport q;
  const auto rank = licq_check(t.equality);
  q.licq = rank.independent;
  q.equality_rank = rank.rank;
  q.equality_count = t.equality.size();
  q.mfcq_form = t.equality.empty() ? MfcqForm::InequalityOnly : MfcqForm::WithEqualities;
  if (!q.licq) return q;
  q.mfcq_evaluated = true;
  q.witness = mfcq_witness_equality(t.active, t.equality, t.n);
  q.mfcq = q.witness.has_value();
  return q;
}

LinFunc stationarity_residual(const FJCertificate& c, const GradientTable& t) {
  require_table(t);
  if (c.lambda.size() != t.inequality_count + 1 || c.mu.size() != t.equality.size())
    throw DimensionError("certificate does not match the gradient table");
  LinFunc r = t.objective.scaled(c.lambda[0]);
  for (std::size_t k = 0; k < t.active.size(); ++k) r.add_scaled(t.active[k], c.lambda[t.active_index[k] + 1]);
  for (std::size_t j = 0; j < t.equality.size(); ++j) r.add_scaled(t.equality[j], c.mu[j]);
  return r;
}

bool exact_complementarity(const FJCertificate& c, const GradientTable& t) {
  if (c.lambda.size() != t.inequality_count + 1) return false;
  for (std::size_t i = 0; i < t.inequality_count; ++i) {
    const bool active = std::find(t.active_index.begin(), t.active_index.end(), i) != t.active_index.end();
    if (!active && !c.lambda[i + 1].is_zero()) return false;
  }
  return true;
}

namespace {

void scale_to_maxnorm(FJCertificate& c) {
  Rational m = std::max(max_abs(c.lambda), max_abs(c.mu));
  if (m.is_zero()) throw EngineFault("certificate with all multipliers zero");
  for (auto& x : c.lambda) x /= m;
  for (auto& x : c.mu) x /= m;
}

void set_flags(FJCertificate& c, const GradientTable& t) {
  c.flags.a = !all_zero(c.lambda) || !all_zero(c.mu);
  c.flags.b = exact_complementarity(c, t);
  c.flags.c = stationarity_residual(c, t).is_zero();
  c.flags.d = !all_zero(c.lambda);
  if (!c.flags.a || !c.flags.b || !c.flags.c)
    throw EngineFault("emitted certificate fails its exact invariants");
}

FJCertificate assemble(const GradientTable& t, std::span<const Rational> reduced_lambda, RVec mu, Regime regime,
                       Normalization norm) {
  FJCertificate c;
  c.lambda.assign(t.inequality_count + 1, Rational());
  c.lambda[0] = reduced_lambda[0];
  for (std::size_t k = 0; k < t.active.size(); ++k) c.lambda[t.active_index[k] + 1] = reduced_lambda[k + 1];
  c.mu = std::move(mu);
  c.regime = regime;
  c.normalization = norm;
  return c;
}

EngineResult dependent_equalities(const GradientTable& t, QualificationReport quals) {
  // mu in the kernel of the n x q matrix whose columns are Dh_j
  const std::size_t q = t.equality.size();
  std::vector<LinFunc> rows;
  for (std::size_t i = 0; i < t.n; ++i) {
    RVec row(q);
    for (std::size_t j = 0; j < q; ++j) row[j] = t.equality[j][i];
    rows.emplace_back(std::move(row));
  }
  auto ns = nullspace_basis(rows, q);
  if (ns.basis.empty()) throw EngineFault("dependent equality gradients without a kernel combination");
  RVec mu = std::move(ns.basis.front());
  const auto lead = std::find_if(mu.begin(), mu.end(), [](const Rational& r) { return !r.is_zero(); });
  const Rational s = *lead;
  for (auto& x : mu) x /= s;

  FJCertificate c;
  c.lambda.assign(t.inequality_count + 1, Rational());
  c.mu = std::move(mu);
  c.regime = Regime::DependentEqualities;
  c.normalization = Normalization::MaxNormOne;
  scale_to_maxnorm(c);
  set_flags(c, t);

  EngineResult r;
  r.certified = true;
  r.certificate = std::move(c);
  r.qualifications = std::move(quals);
  return r;
}

}  // namespace

EngineResult certify_gradients(const GradientTable& t) {
  require_table(t);
  QualificationReport quals = qualify(t);
  if (!quals.licq) return dependent_equalities(t, std::move(quals));

  const ReducedProblem red = reduce_equalities(t);
  const InequalityGradients reduced = red.as_inequality();

  EngineResult r;
  r.direct = fj_inequality_direct(reduced);
  r.staircase = fj_inequality_staircase(reduced);
  if (r.direct.has_value() != r.staircase.has_value())
    throw EngineFault("direct and staircase algorithms disagree on certificate existence");
  r.qualifications = std::move(quals);
  if (!r.direct) return r;

  for (const auto* m : {&*r.direct, &*r.staircase}) {
    if (!exact_stationarity(reduced, m->lambda)) throw EngineFault("reduced multipliers fail exact stationarity");
  }

  RVec lambda = r.direct->lambda;
  if (red.dim() == 0) {
    // Ker Dh = {0}: every lambda solves the reduced problem; pin lambda_0 = 1.
    std::fill(lambda.begin(), lambda.end(), Rational());
    lambda[0] = Rational(1);
  }
  RVec mu = recover_mu(lambda, t, red);
  (void)recover_mu(r.staircase->lambda, t, red);

  FJCertificate cert = assemble(t, lambda, std::move(mu), r.direct->regime, Normalization::MaxNormOne);
  cert.staircase_k = r.staircase->k;
  scale_to_maxnorm(cert);
  set_flags(cert, t);
  if (!cert.flags.d) throw EngineFault("independent equality gradients but all inequality multipliers vanish");

  if (r.qualifications.mfcq) {
    const auto kkt = normalize_lambda0(reduced);
    if (!kkt) throw EngineFault("strict witness exists but lambda_0 = 1 normalization failed");
    FJCertificate k = assemble(t, kkt->lambda, recover_mu(kkt->lambda, t, red), cert.regime,
                               Normalization::Lambda0One);
    k.staircase_k = cert.staircase_k;
    set_flags(k, t);
    k.flags.e = true;
    cert.flags.e = true;
    r.kkt = std::move(k);
  }
  r.certified = true;
  r.certificate = std::move(cert);
  return r;
}

Certification full_certify(const Problem& pr, const Point& x, const Tolerances& tol) {
  Certification c;
  c.feasibility = check_feasibility(pr, x, tol.feas);
  if (!c.feasibility.feasible) throw InfeasiblePointError(c.feasibility);
  c.active_set = detect_active_set(pr, x, tol.active, tol.feas);
  c.gradients = gradient_table(pr, x, c.active_set);
  c.result = certify_gradients(c.gradients);
  return c;
}

VerificationReport verify_certificate(const Problem& pr, const Point& x, const FJCertificate& cert,
                                      const Tolerances& tol) {
  VerificationReport v;
  const std::size_t p = pr.inequalities.size();
  const std::size_t q = pr.equalities.size();
  v.well_formed = cert.lambda.size() == p + 1 && cert.mu.size() == q &&
                  std::all_of(cert.lambda.begin(), cert.lambda.end(), [](const Rational& r) { return r.sign() >= 0; });
  if (!v.well_formed) return v;

  v.a = !all_zero(cert.lambda) || !all_zero(cert.mu);

  v.b = true;
  for (std::size_t i = 0; i < p; ++i) {
    if (cert.lambda[i + 1].is_zero()) continue;
    const double g = std::abs(evaluate(pr.inequalities[i].expr, x));
    v.worst_complementarity = std::max(v.worst_complementarity, g);
    if (g > tol.active) v.b = false;
  }

  const std::size_t n = pr.dimension();
  std::vector<double> residual(n, 0.0);
  auto accumulate = [&](const Expr& e, const Rational& m) {
    if (m.is_zero()) return;
    const double w = m.to_double();
    const auto g = fd_gradient(e, x.values());
    for (std::size_t i = 0; i < n; ++i) residual[i] += w * g[i];
  };
  accumulate(pr.objective, cert.lambda[0]);
  for (std::size_t i = 0; i < p; ++i) accumulate(pr.inequalities[i].expr, cert.lambda[i + 1]);
  for (std::size_t j = 0; j < q; ++j) accumulate(pr.equalities[j].expr, cert.mu[j]);
  for (double r : residual) v.stationarity_residual = std::max(v.stationarity_residual, std::abs(r));
  const double scale = std::max({1.0, max_abs(cert.lambda).to_double(), max_abs(cert.mu).to_double()});
  v.c = v.stationarity_residual <= tol.stat * scale;
  return v;
}

}  // namespace fjcert
