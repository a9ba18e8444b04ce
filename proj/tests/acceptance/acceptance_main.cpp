// Acceptance gate: each criterion prints one PASS/FAIL line; the exit status
// is nonzero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "fjcert/engine.hpp"
#include "fjcert/errors.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace {

using namespace fjcert;
using fjcert::testing::Gen;

struct Outcome {
  bool pass = true;
  std::string detail;
};

const std::string kData = FJCERT_TEST_DATA_DIR;

void collect_ops(const Node& n, std::set<Op>& ops) {
  ops.insert(n.op);
  if (n.lhs) collect_ops(*n.lhs, ops);
  if (n.rhs) collect_ops(*n.rhs, ops);
}

LinFunc lambda_combination(const GradientTable& t, const RVec& lambda, const RVec& mu) {
  // independent restatement of the full stationarity sum over active rows
  LinFunc s = t.objective.scaled(lambda[0]);
  for (std::size_t i = 0; i < t.active.size(); ++i) s.add_scaled(t.active[i], lambda[i + 1]);
  for (std::size_t j = 0; j < t.equality.size(); ++j) s.add_scaled(t.equality[j], mu[j]);
  return s;
}

// 1 -------------------------------------------------------------------------
Outcome farkas_equivalence() {
  Gen g(1001);
  int mismatches = 0, bad_certs = 0, combos = 0;
  const int count = 600;
  for (int i = 0; i < count; ++i) {
    const auto inst = fjcert::testing::random_farkas_instance(g);
    const auto cert = farkas_decide(inst.phis, inst.a);
    const bool combo = is_combination(cert);
    combos += combo;
    if (combo != fm_oracle(inst.phis, inst.a)) ++mismatches;
    if (combo) {
      const auto& lambda = std::get<Combination>(cert).lambda;
      LinFunc r = inst.a.scaled(Rational(-1));
      for (std::size_t k = 0; k < inst.phis.size(); ++k) r.add_scaled(inst.phis[k], lambda[k]);
      const bool nonneg = std::all_of(lambda.begin(), lambda.end(), [](const Rational& l) { return l.sign() >= 0; });
      if (!r.is_zero() || !nonneg) ++bad_certs;
    } else {
      const auto& x = std::get<Separator>(cert).x;
      bool ok = inst.a.apply(x).sign() < 0;
      for (const auto& phi : inst.phis) ok = ok && phi.apply(x).sign() >= 0;
      if (!ok) ++bad_certs;
    }
  }
  return {mismatches == 0 && bad_certs == 0,
          std::to_string(count) + " instances (" + std::to_string(combos) + " combinations), " +
              std::to_string(mismatches) + " oracle mismatches, " + std::to_string(bad_certs) + " inexact certificates"};
}

// 2 -------------------------------------------------------------------------
Outcome certificate_exclusivity() {
  Gen g(1001);  // same suite as criterion 1
  int violations = 0;
  const int count = 600;
  for (int i = 0; i < count; ++i) {
    const auto inst = fjcert::testing::random_farkas_instance(g);
    const auto cert = farkas_decide(inst.phis, inst.a);
    if (is_combination(cert)) {
      if (fjcert::testing::lp_separator(inst.phis, inst.a)) ++violations;
    } else {
      if (fjcert::testing::brute_force_combination(inst.phis, inst.a)) ++violations;
    }
  }
  return {violations == 0, std::to_string(count) + " instances, " + std::to_string(violations) + " violations"};
}

// 3 -------------------------------------------------------------------------
Outcome ad_fd_agreement() {
  Gen g(1003);
  const std::vector<std::string> vars{"x", "y", "z"};
  std::vector<std::string> corpus{
      "x^2 + y*z - 3", "sin(x)*cos(y) + exp(z)", "log(2 + x^2) / (1 + y^2)", "sqrt(4 + x*y*z)",
      "-(x - y)^3 + z^2", "exp(-x^2) * sin(3*y)", "(x + y + z)^2 / (5 + cos(x))", "log(exp(x) + exp(y))",
  };
  while (corpus.size() < 64) corpus.push_back(fjcert::testing::random_expression_text(g, vars, 3));

  std::set<Op> ops;
  double worst = 0.0;
  std::size_t evaluations = 0;
  for (const auto& text : corpus) {
    const Expr e = parse_expression(text, vars);
    collect_ops(e.root(), ops);
    for (int k = 0; k < 6; ++k) {
      const std::vector<double> p{g.uniform(-1, 1), g.uniform(-1, 1), g.uniform(-1, 1)};
      const std::vector<double> v{g.uniform(-1, 1), g.uniform(-1, 1), g.uniform(-1, 1)};
      const double ad = directional_derivative(e, p, v);
      const double fd = fd_directional(e, p, v, 1e-5);
      worst = std::max(worst, std::abs(ad - fd) / (1.0 + std::abs(fd)));
      ++evaluations;
    }
  }
  const bool all_ops = ops.size() == 13;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu expressions, %zu evaluations, %zu node kinds, max relative gap %.3e",
                corpus.size(), evaluations, ops.size(), worst);
  return {all_ops && worst <= 1e-6, buf};
}

// 4 -------------------------------------------------------------------------
Outcome dual_path_agreement() {
  Gen g(1004);
  int disagreements = 0, certified = 0, failures = 0, staircase = 0, degenerate = 0, zero_grads = 0;
  const int count = 300;
  for (int i = 0; i < count; ++i) {
    const auto t = fjcert::testing::random_inequality_table(g, 5, 4);
    for (const auto& a : t.active) zero_grads += a.is_zero();
    const auto d = fj_inequality_direct(t);
    const auto s = fj_inequality_staircase(t);
    if (d.has_value() != s.has_value()) {
      ++disagreements;
      continue;
    }
    if (!d) continue;
    ++certified;
    const Problem pr = fjcert::testing::linear_problem(t);
    const Point origin(pr.variables, std::vector<double>(t.dim(), 0.0));
    for (const auto* m : {&*d, &*s}) {
      if (!exact_stationarity(t, m->lambda)) ++failures;
      FJCertificate cert;
      cert.lambda = m->lambda;
      if (!verify_certificate(pr, origin, cert).pass()) ++failures;
    }
    if (s->regime == Regime::Degenerate) ++degenerate;
    if (s->regime == Regime::Staircase) {
      ++staircase;
      const std::size_t k = *s->k;
      if (s->lambda[k - 1] != Rational(1)) ++failures;
      for (std::size_t j = 0; j + 1 < k; ++j)
        if (!s->lambda[j].is_zero()) ++failures;
    }
  }
  return {disagreements == 0 && failures == 0 && zero_grads > 0 && degenerate > 0,
          std::to_string(count) + " tables, " + std::to_string(certified) + " certified (" +
              std::to_string(staircase) + " staircase, " + std::to_string(degenerate) + " degenerate), " +
              std::to_string(disagreements) + " disagreements, " + std::to_string(failures) + " failed checks"};
}

// 5 -------------------------------------------------------------------------
Outcome textbook_recovery() {
  std::vector<std::string> problems;
  auto certify = [](const std::string& file) {
    const auto lp = load_problem_file(kData + "/" + file);
    return full_certify(lp.problem, *lp.point);
  };

  const auto circle = certify("circle.fj");
  const bool circle_ok = circle.result.certified && circle.result.kkt &&
                         circle.result.kkt->lambda == RVec{Rational(1)} &&
                         circle.result.kkt->mu == RVec{Rational(-1, 2)} &&
                         circle.result.certificate->mu == RVec{Rational(-1, 2)};
  if (!circle_ok) problems.push_back("circle");

  const auto bound = certify("bound.fj");
  const bool bound_ok = bound.result.certified && bound.result.qualifications.mfcq && bound.result.kkt &&
                        bound.result.kkt->lambda == (RVec{Rational(1), Rational(1)});
  if (!bound_ok) problems.push_back("upper bound");

  const auto dep = certify("dependent.fj");
  bool dep_ok = dep.result.certified && dep.result.certificate->regime == Regime::DependentEqualities;
  if (dep_ok) {
    const auto& c = *dep.result.certificate;
    dep_ok = all_zero(c.lambda) && c.mu.size() == 2 && !c.mu[0].is_zero() &&
             c.mu[0] * Rational(-1) == c.mu[1] * Rational(2);
  }
  if (!dep_ok) problems.push_back("dependent equalities");

  std::string detail = "circle lambda0=1 mu=-1/2, bound lambda=(1,1) under MFCQ, dependent mu ~ (2,-1)";
  if (!problems.empty()) {
    detail = "failed:";
    for (const auto& p : problems) detail += " " + p;
  }
  return {problems.empty(), detail};
}

// 6 -------------------------------------------------------------------------
Outcome reduction_consistency() {
  Gen g(1006);
  int instances = 0, nonzero_residual = 0, attempts = 0;
  while (instances < 150 && attempts < 2000) {
    ++attempts;
    const auto t = fjcert::testing::random_licq_table(g, g.coin(0.7));
    const auto red = reduce_equalities(t);
    const auto reduced = red.as_inequality();
    for (const auto& m : {fj_inequality_direct(reduced), fj_inequality_staircase(reduced)}) {
      if (!m) continue;
      const RVec mu = recover_mu(m->lambda, t, red);
      if (!lambda_combination(t, m->lambda, mu).is_zero()) ++nonzero_residual;
      ++instances;
    }
  }
  return {instances >= 100 && nonzero_residual == 0,
          std::to_string(instances) + " reduced certificates, " + std::to_string(nonzero_residual) +
              " with nonzero full residual"};
}

// 7 -------------------------------------------------------------------------
GradientTable planted_mfcq_table(Gen& g) {
  for (;;) {
    GradientTable t;
    t.n = static_cast<std::size_t>(g.uniform_int(2, 5));
    const auto q = static_cast<std::size_t>(g.uniform_int(0, static_cast<int>(std::min<std::size_t>(2, t.n - 1))));
    t.equality = g.family(q, t.n);
    if (!rank_independent(t.equality).independent) continue;
    const auto kernel = nullspace_basis(t.equality, t.n).basis;
    RVec w(t.n);
    for (const auto& b : kernel) {
      const Rational c = g.small_rational();
      for (std::size_t k = 0; k < t.n; ++k) w[k] += c * b[k];
    }
    if (all_zero(w)) continue;
    const auto e = static_cast<std::size_t>(g.uniform_int(1, 3));
    for (std::size_t i = 0; i < e; ++i) {
      LinFunc a = g.linfunc(t.n);
      const Rational aw = a.apply(w);
      if (aw.sign() <= 0) a.add_scaled(LinFunc(w), (Rational(1) - aw) / dot(w, w));
      t.active.push_back(std::move(a));
      t.active_index.push_back(i);
    }
    t.inequality_count = e;
    LinFunc s = LinFunc::zero(t.n);
    for (const auto& a : t.active) s.add_scaled(a, g.small_nonneg_rational());
    for (const auto& h : t.equality) s.add_scaled(h, g.small_rational());
    t.objective = s.scaled(Rational(-1));
    return t;
  }
}

Outcome qualification_behavior() {
  Gen g(1007);
  int planted = 0, normalized = 0, opposite = 0, refuted = 0;
  for (int i = 0; i < 150; ++i) {
    const auto t = planted_mfcq_table(g);
    ++planted;
    const auto q = qualify(t);
    const auto r = certify_gradients(t);
    if (q.mfcq && r.kkt && r.kkt->lambda[0] == Rational(1) && stationarity_residual(*r.kkt, t).is_zero() &&
        normalize_lambda0(reduce_equalities(t).as_inequality()))
      ++normalized;
  }
  for (int i = 0; i < 150; ++i) {
    auto t = planted_mfcq_table(g);
    // a negative multiple of the first active gradient kills every witness
    t.active.push_back(t.active[0].scaled(-g.small_nonneg_rational() - Rational(1)));
    t.active_index.push_back(t.inequality_count++);
    ++opposite;
    bool ok = !mfcq_witness_equality(t.active, t.equality, t.n) && !qualify(t).mfcq;
    if (t.equality.empty()) ok = ok && !mfcq_witness_inequality({t.objective, t.active});
    if (ok) ++refuted;
  }
  return {normalized == planted && refuted == opposite,
          std::to_string(normalized) + "/" + std::to_string(planted) + " planted witnesses normalized to lambda0=1, " +
              std::to_string(refuted) + "/" + std::to_string(opposite) + " opposite-gradient instances refuted"};
}

// 8 -------------------------------------------------------------------------
Outcome rescaling() {
  Gen g(1008);
  const Rational scales[] = {Rational(1, 3), Rational(2), Rational(7)};
  int certified = 0, failures = 0, attempts = 0;
  while (certified < 50 && attempts < 2000) {
    ++attempts;
    const auto t = fjcert::testing::random_licq_table(g, true);
    if (t.active.empty()) continue;
    const auto r = certify_gradients(t);
    if (!r.certified) continue;
    ++certified;
    const auto j = static_cast<std::size_t>(g.uniform_int(0, static_cast<int>(t.active.size()) - 1));
    const Rational c = scales[g.uniform_int(0, 2)];
    GradientTable scaled = t;
    scaled.active[j] = t.active[j].scaled(c);
    FJCertificate cert = *r.certificate;
    cert.lambda[t.active_index[j] + 1] /= c;
    const bool a = !(all_zero(cert.lambda) && all_zero(cert.mu));
    const bool b = exact_complementarity(cert, scaled);
    const bool cc = stationarity_residual(cert, scaled).is_zero();
    if (!(a && b && cc)) ++failures;
  }
  return {certified == 50 && failures == 0,
          std::to_string(certified) + " certified instances rescaled, " + std::to_string(failures) + " failures"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 Farkas oracle equivalence", farkas_equivalence},
      {"2 certificate exclusivity", certificate_exclusivity},
      {"3 AD/FD agreement", ad_fd_agreement},
      {"4 dual-path agreement", dual_path_agreement},
      {"5 textbook KKT recovery", textbook_recovery},
      {"6 reduction consistency", reduction_consistency},
      {"7 qualification behavior", qualification_behavior},
      {"8 rescaling property", rescaling},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    failed += !o.pass;
    std::printf("%s  criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
