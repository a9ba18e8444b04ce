#include "fjcert_cli/commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "fjcert/errors.hpp"
#include "fjcert_cli/report.hpp"

namespace fjcert::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Loaded {
  Problem problem;
  Point point;
};

Loaded load_with_point(const RunConfig& config) {
  LoadedProblem lp = load_problem(read_file(config.input));
  if (config.point) lp.point = Point::parse(*config.point, lp.problem.variables);
  if (!lp.point) throw InputError("no candidate point: add a 'point:' line or pass --point");
  return {std::move(lp.problem), std::move(*lp.point)};
}

std::string labelled(std::span<const Rational> values, const std::vector<std::string>& labels) {
  std::ostringstream os;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os << ", ";
    os << labels[i] << " = " << values[i];
  }
  return os.str();
}

std::vector<std::string> lambda_labels(const Problem& pr) {
  std::vector<std::string> out{"objective"};
  for (const auto& g : pr.inequalities) out.push_back(g.label);
  return out;
}

std::vector<std::string> mu_labels(const Problem& pr) {
  std::vector<std::string> out;
  for (const auto& h : pr.equalities) out.push_back(h.label);
  return out;
}

void print_qualifications(std::ostream& out, const QualificationReport& q) {
  out << "licq: " << (q.licq ? "holds" : "fails") << " (rank " << q.equality_rank << " of " << q.equality_count
      << " equality gradients)\n";
  if (!q.mfcq_evaluated) {
    out << "mfcq: not evaluated (equality gradients dependent)\n";
    return;
  }
  out << "mfcq (" << (q.mfcq_form == MfcqForm::InequalityOnly ? "inequality-only" : "with-equalities")
      << "): " << (q.mfcq ? "holds" : "fails");
  if (q.witness) {
    if (q.witness->vacuous) {
      out << ", vacuous (no active inequality)";
    } else {
      out << ", witness w = (" << join(q.witness->v) << "), margin " << q.witness->margin;
    }
  }
  out << "\n";
}

void print_certificate(std::ostream& out, const FJCertificate& c, const Problem& pr) {
  out << "regime: " << to_string(c.regime) << "\n";
  out << "normalization: " << to_string(c.normalization) << "\n";
  out << "lambda: " << labelled(c.lambda, lambda_labels(pr)) << "\n";
  if (!c.mu.empty()) out << "mu: " << labelled(c.mu, mu_labels(pr)) << "\n";
  out << "flags:";
  for (auto [name, value] : {std::pair{"a", c.flags.a}, {"b", c.flags.b}, {"c", c.flags.c}, {"d", c.flags.d},
                             {"e", c.flags.e}})
    out << ' ' << name << '=' << (value ? "yes" : "no");
  out << "\n";
  if (c.staircase_k) out << "staircase k: " << *c.staircase_k << "\n";
}

void print_infeasible(std::ostream& out, const RunConfig& config, const InfeasiblePointError& e) {
  const auto& r = e.report();
  if (config.format == Format::Json) {
    Json j;
    j["status"] = "infeasible";
    j["residuals"] = {{"feasibility",
                       {{"worst_inequality_violation", r.worst_inequality_violation},
                        {"worst_equality_violation", r.worst_equality_violation},
                        {"tolerance", r.tolerance}}}};
    out << j.dump(2) << "\n";
  } else {
    out << "status: infeasible\n" << e.what() << "\n";
  }
}

template <class Body>
int guarded(const RunConfig& config, std::ostream& out, std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const InfeasiblePointError& e) {
    print_infeasible(out, config, e);
    return kExitInfeasible;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace

int cmd_certify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(config, out, err, [&] {
    const Loaded in = load_with_point(config);
    const Certification c = full_certify(in.problem, in.point, config.tol);
    std::optional<VerificationReport> verification;
    if (c.result.certificate) verification = verify_certificate(in.problem, in.point, *c.result.certificate, config.tol);

    if (config.format == Format::Json) {
      out << certification_json(in.problem, config.input, in.point, c, verification ? &*verification : nullptr).dump(2)
          << "\n";
    } else {
      const EngineResult& r = c.result;
      out << "point: " << in.point.to_string() << "\n";
      out << "status: " << (r.certified ? "certified" : "refuted (first-order necessary condition fails)") << "\n";
      out << "active set:";
      if (c.active_set.active.empty()) out << " (none)";
      for (auto i : c.active_set.active) out << ' ' << in.problem.inequalities[i].label;
      out << "\n";
      if (r.certificate) print_certificate(out, *r.certificate, in.problem);
      if (r.kkt) {
        out << "kkt form:\n";
        out << "  lambda: " << labelled(r.kkt->lambda, lambda_labels(in.problem)) << "\n";
        if (!r.kkt->mu.empty()) out << "  mu: " << labelled(r.kkt->mu, mu_labels(in.problem)) << "\n";
      }
      print_qualifications(out, r.qualifications);
      if (verification) {
        out << "stationarity residual: exact "
            << max_abs(stationarity_residual(*r.certificate, c.gradients).coeffs()) << ", finite-difference "
            << std::setprecision(3) << verification->stationarity_residual << " ("
            << (verification->pass() ? "verified" : "NOT verified") << ")\n";
      }
    }
    return c.result.certified ? kExitOk : kExitRefuted;
  });
}

int cmd_qualify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(config, out, err, [&] {
    const Loaded in = load_with_point(config);
    const ActiveSet active = detect_active_set(in.problem, in.point, config.tol.active, config.tol.feas);
    const GradientTable t = gradient_table(in.problem, in.point, active);
    const QualificationReport q = qualify(t);
    if (config.format == Format::Json) {
      Json j;
      j["problem"] = problem_json(in.problem, config.input);
      j["point"] = point_json(in.point);
      Json labels = Json::array();
      for (auto i : active.active) labels.push_back(in.problem.inequalities[i].label);
      j["active_set"] = {{"tolerance", active.tolerance}, {"active", labels}};
      j["qualifications"] = qualification_json(q);
      out << j.dump(2) << "\n";
    } else {
      print_qualifications(out, q);
    }
    return q.licq && q.mfcq ? kExitOk : kExitRefuted;
  });
}

int cmd_gradcheck(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(config, out, err, [&] {
    const Loaded in = load_with_point(config);
    const std::vector<double> radii{1e-2, 1e-3, 1e-4};
    const std::vector<double>& x = in.point.values();

    struct Row {
      std::string label;
      double discrepancy;
      bool agree;
      FrechetReport probe;
    };
    std::vector<Row> rows;
    auto check = [&](const std::string& label, const Expr& e) {
      const auto ad = gradient(e, x);
      const auto fd = fd_gradient(e, x);
      double worst = 0.0;
      for (std::size_t i = 0; i < ad.size(); ++i) worst = std::max(worst, std::abs(ad[i] - fd[i]) / (1.0 + std::abs(fd[i])));
      rows.push_back({label, worst, worst <= config.grad_tol,
                      frechet_probe(e, x, ad, radii, 16, config.seed + rows.size(), config.probe_tol)});
    };
    check("objective", in.problem.objective);
    for (const auto& g : in.problem.inequalities) check(g.label, g.expr);
    for (const auto& h : in.problem.equalities) check(h.label, h.expr);

    bool ok = true;
    for (const auto& r : rows) ok = ok && r.agree && r.probe.pass;

    if (config.format == Format::Json) {
      Json j;
      j["point"] = point_json(in.point);
      j["tolerance"] = config.grad_tol;
      j["probe_tolerance"] = config.probe_tol;
      Json list = Json::array();
      for (const auto& r : rows) {
        list.push_back({{"function", r.label},
                        {"ad_fd_discrepancy", r.discrepancy},
                        {"ad_fd_agree", r.agree},
                        {"probe_radii", r.probe.radii},
                        {"probe_ratios", r.probe.worst_ratio},
                        {"probe_pass", r.probe.pass}});
      }
      j["functions"] = std::move(list);
      j["pass"] = ok;
      out << j.dump(2) << "\n";
    } else {
      out << std::left << std::setw(12) << "function" << std::setw(14) << "ad-fd" << std::setw(8) << "agree"
          << "frechet ratios (r = 1e-2, 1e-3, 1e-4)\n";
      for (const auto& r : rows) {
        std::ostringstream ratios;
        ratios << std::setprecision(3);
        for (double v : r.probe.worst_ratio) ratios << v << ' ';
        out << std::left << std::setw(12) << r.label << std::setw(14) << std::setprecision(3) << r.discrepancy
            << std::setw(8) << (r.agree ? "yes" : "NO") << ratios.str() << (r.probe.pass ? "pass" : "FAIL") << "\n";
      }
      out << (ok ? "all checks pass" : "some checks fail") << "\n";
    }
    return ok ? kExitOk : kExitRefuted;
  });
}

FarkasInput parse_farkas_input(std::string_view text) {
  FarkasInput in;
  bool have_target = false;
  std::istringstream lines{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ProblemParseError(line_no, 1, "expected 'phi:' or 'a:'");
    std::string key = line.substr(0, colon);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    RVec row;
    std::istringstream items(line.substr(colon + 1));
    std::string item;
    while (std::getline(items, item, ',')) {
      try {
        row.push_back(Rational::parse(item));
      } catch (const InputError& e) {
        throw ProblemParseError(line_no, colon + 2, e.what());
      }
    }
    if (row.empty()) throw ProblemParseError(line_no, colon + 2, "empty vector");
    if (key == "phi") {
      in.phis.emplace_back(std::move(row));
    } else if (key == "a") {
      if (have_target) throw ProblemParseError(line_no, 1, "target 'a:' given twice");
      in.target = LinFunc(std::move(row));
      have_target = true;
    } else {
      throw ProblemParseError(line_no, 1, "unknown key '" + key + "'");
    }
  }
  if (!have_target) throw InputError("missing target line 'a: ...'");
  for (std::size_t i = 0; i < in.phis.size(); ++i) {
    if (in.phis[i].dim() != in.target.dim())
      throw InputError("phi " + std::to_string(i + 1) + " has " + std::to_string(in.phis[i].dim()) +
                       " entries, target has " + std::to_string(in.target.dim()));
  }
  return in;
}

int cmd_farkas(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(config, out, err, [&] {
    const FarkasInput in = parse_farkas_input(read_file(config.input));
    const ConeCertificate cert = farkas_decide(in.phis, in.target);
    const bool combination = is_combination(cert);
    const RVec& values = combination ? std::get<Combination>(cert).lambda : std::get<Separator>(cert).x;
    if (config.format == Format::Json) {
      Json j;
      j["result"] = combination ? "combination" : "separator";
      j[combination ? "lambda" : "x"] = rational_array(values);
      j["verified"] = verify_certificate(in.phis, in.target, cert);
      out << j.dump(2) << "\n";
    } else {
      out << (combination ? "combination: " : "separator: ") << join(values) << "\n";
    }
    return kExitOk;
  });
}

int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err) {
  switch (config.subcommand) {
    case Subcommand::Certify: return cmd_certify(config, out, err);
    case Subcommand::Qualify: return cmd_qualify(config, out, err);
    case Subcommand::Gradcheck: return cmd_gradcheck(config, out, err);
    case Subcommand::Farkas: return cmd_farkas(config, out, err);
  }
  return kExitInputError;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fritz John / KKT multiplier certificates at a candidate point"};
  app.require_subcommand(1);

  RunConfig config;
  std::string format = "text";
  std::string point;

  auto common = [&](CLI::App* sub, bool with_point) {
    sub->add_option("input", config.input, "input file")->required();
    sub->add_option("--format", format, "output format")->check(CLI::IsMember({"text", "json"}));
    if (with_point) {
      sub->add_option("--point", point, "candidate point, e.g. \"x=1,y=1\"");
      sub->add_option("--tol-active", config.tol.active, "active-set band")->check(CLI::PositiveNumber);
      sub->add_option("--tol-feas", config.tol.feas, "feasibility band")->check(CLI::PositiveNumber);
      sub->add_option("--tol-stat", config.tol.stat, "finite-difference stationarity tolerance")
          ->check(CLI::PositiveNumber);
      sub->add_option("--seed", config.seed, "seed for randomized probes");
    }
  };

  auto* certify = app.add_subcommand("certify", "compute and verify a multiplier certificate");
  common(certify, true);
  auto* qualify_cmd = app.add_subcommand("qualify", "check LICQ and MFCQ at the point");
  common(qualify_cmd, true);
  auto* gradcheck = app.add_subcommand("gradcheck", "compare AD and finite-difference gradients");
  common(gradcheck, true);
  gradcheck->add_option("--tol", config.grad_tol, "relative AD/FD tolerance")->check(CLI::PositiveNumber);
  gradcheck->add_option("--probe-tol", config.probe_tol, "Frechet remainder tolerance")->check(CLI::PositiveNumber);
  auto* farkas = app.add_subcommand("farkas", "decide cone membership with an exact certificate");
  common(farkas, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  config.format = format == "json" ? Format::Json : Format::Text;
  if (!point.empty()) config.point = point;
  if (certify->parsed()) config.subcommand = Subcommand::Certify;
  if (qualify_cmd->parsed()) config.subcommand = Subcommand::Qualify;
  if (gradcheck->parsed()) config.subcommand = Subcommand::Gradcheck;
  if (farkas->parsed()) config.subcommand = Subcommand::Farkas;
  return dispatch(config, out, err);
}

}  // namespace fjcert::cli
