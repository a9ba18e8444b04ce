#include "fjcert_cli/report.hpp"

#include "fjcert/errors.hpp"

namespace fjcert::cli {

Json rational_array(std::span<const Rational> values) {
  Json a = Json::array();
  for (const auto& v : values) a.push_back(v.to_string());
  return a;
}

Json float_array(std::span<const Rational> values) {
  Json a = Json::array();
  for (const auto& v : values) a.push_back(v.to_double());
  return a;
}

Json problem_json(const Problem& pr, const std::string& source) {
  Json j;
  j["source"] = source;
  j["variables"] = pr.variables;
  j["sense"] = pr.minimize_input ? "minimize" : "maximize";
  j["objective"] = pr.objective_source;
  Json ineq = Json::array();
  for (const auto& g : pr.inequalities) ineq.push_back({{"label", g.label}, {"constraint", g.source}});
  Json eq = Json::array();
  for (const auto& h : pr.equalities) eq.push_back({{"label", h.label}, {"constraint", h.source}});
  j["inequalities"] = std::move(ineq);
  j["equalities"] = std::move(eq);
  return j;
}

Json point_json(const Point& x) {
  Json j = Json::object();
  for (std::size_t i = 0; i < x.dimension(); ++i) j[x.names()[i]] = x[i];
  return j;
}

Json certificate_json(const FJCertificate& c) {
  Json j;
  j["regime"] = std::string(to_string(c.regime));
  j["normalization"] = std::string(to_string(c.normalization));
  j["lambda"] = rational_array(c.lambda);
  j["mu"] = rational_array(c.mu);
  j["lambda_approx"] = float_array(c.lambda);
  j["mu_approx"] = float_array(c.mu);
  j["flags"] = {{"a", c.flags.a}, {"b", c.flags.b}, {"c", c.flags.c}, {"d", c.flags.d}, {"e", c.flags.e}};
  j["staircase_k"] = c.staircase_k ? Json(*c.staircase_k) : Json(nullptr);
  return j;
}

Json qualification_json(const QualificationReport& q) {
  Json j;
  j["licq"] = q.licq;
  j["equality_rank"] = q.equality_rank;
  j["equality_count"] = q.equality_count;
  j["mfcq_evaluated"] = q.mfcq_evaluated;
  j["mfcq"] = q.mfcq;
  j["mfcq_form"] = q.mfcq_form == MfcqForm::InequalityOnly ? "inequality-only" : "with-equalities";
  if (q.witness) {
    j["witness"] = q.witness->vacuous ? Json("vacuous") : rational_array(q.witness->v);
    j["witness_margin"] = q.witness->vacuous ? Json(nullptr) : Json(q.witness->margin.to_string());
  } else {
    j["witness"] = nullptr;
    j["witness_margin"] = nullptr;
  }
  return j;
}

Json certification_json(const Problem& pr, const std::string& source, const Point& x, const Certification& c,
                        const VerificationReport* verification) {
  const EngineResult& r = c.result;
  Json j;
  j["problem"] = problem_json(pr, source);
  j["point"] = point_json(x);
  j["status"] = r.certified ? "certified" : "refuted";

  Json active = Json::array();
  Json values = Json::object();
  for (std::size_t i = 0; i < pr.inequalities.size(); ++i) {
    values[pr.inequalities[i].label] = c.active_set.values[i];
    if (c.active_set.is_active(i)) active.push_back(pr.inequalities[i].label);
  }
  j["active_set"] = {{"tolerance", c.active_set.tolerance}, {"active", active}, {"values", values}};

  Json lambda_labels = Json::array({"objective"});
  for (const auto& g : pr.inequalities) lambda_labels.push_back(g.label);
  Json mu_labels = Json::array();
  for (const auto& h : pr.equalities) mu_labels.push_back(h.label);
  j["lambda_labels"] = lambda_labels;
  j["mu_labels"] = mu_labels;

  if (r.certificate) {
    const Json cert = certificate_json(*r.certificate);
    for (const auto& [key, value] : cert.items()) j[key] = value;
  } else {
    for (const char* key : {"regime", "normalization", "lambda", "mu", "lambda_approx", "mu_approx", "flags",
                            "staircase_k"})
      j[key] = nullptr;
  }
  j["kkt"] = r.kkt ? certificate_json(*r.kkt) : Json(nullptr);
  j["qualifications"] = qualification_json(r.qualifications);

  Json cross;
  cross["direct"] = r.direct ? Json{{"regime", std::string(to_string(r.direct->regime))},
                                    {"lambda", rational_array(r.direct->lambda)}}
                             : Json(nullptr);
  cross["staircase"] = r.staircase ? Json{{"regime", std::string(to_string(r.staircase->regime))},
                                          {"k", r.staircase->k ? Json(*r.staircase->k) : Json(nullptr)},
                                          {"lambda", rational_array(r.staircase->lambda)}}
                                   : Json(nullptr);
  j["reduced_multipliers"] = std::move(cross);

  Json res;
  res["feasibility"] = {{"worst_inequality_violation", c.feasibility.worst_inequality_violation},
                        {"worst_equality_violation", c.feasibility.worst_equality_violation},
                        {"tolerance", c.feasibility.tolerance}};
  if (r.certificate) {
    res["stationarity_exact"] = max_abs(stationarity_residual(*r.certificate, c.gradients).coeffs()).to_string();
  } else {
    res["stationarity_exact"] = nullptr;
  }
  if (verification) {
    res["stationarity_fd"] = verification->stationarity_residual;
    res["complementarity"] = verification->worst_complementarity;
    res["verified"] = verification->pass();
  }
  j["residuals"] = std::move(res);
  return j;
}

namespace {

RVec parse_rationals(const Json& a, const char* key) {
  if (!a.is_array()) throw InputError(std::string("certificate JSON: '") + key + "' must be an array");
  RVec out;
  for (const auto& v : a) {
    if (!v.is_string()) throw InputError(std::string("certificate JSON: '") + key + "' entries must be strings");
    out.push_back(Rational::parse(v.get<std::string>()));
  }
  return out;
}

Regime parse_regime(const std::string& s) {
  for (Regime r : {Regime::DependentEqualities, Regime::Interior, Regime::Degenerate, Regime::Staircase,
                   Regime::Direct}) {
    if (s == to_string(r)) return r;
  }
  throw InputError("certificate JSON: unknown regime '" + s + "'");
}

}  // namespace

FJCertificate certificate_from_json(const Json& report) {
  if (!report.contains("lambda") || report["lambda"].is_null())
    throw InputError("certificate JSON: report carries no certificate");
  FJCertificate c;
  c.lambda = parse_rationals(report["lambda"], "lambda");
  c.mu = parse_rationals(report["mu"], "mu");
  c.regime = parse_regime(report.value("regime", "direct"));
  c.normalization =
      report.value("normalization", "maxnorm-one") == "lambda0-one" ? Normalization::Lambda0One : Normalization::MaxNormOne;
  if (report.contains("flags") && report["flags"].is_object()) {
    const auto& f = report["flags"];
    c.flags = {f.value("a", false), f.value("b", false), f.value("c", false), f.value("d", false), f.value("e", false)};
  }
  if (report.contains("staircase_k") && report["staircase_k"].is_number_unsigned())
    c.staircase_k = report["staircase_k"].get<std::size_t>();
  return c;
}

}  // namespace fjcert::cli
