#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fjcert_cli/commands.hpp"
#include "fjcert_cli/report.hpp"

namespace fjcert::cli {
namespace {

const std::string kData = FJCERT_TEST_DATA_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fjcert");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return kData + "/" + name; }

TEST(Certify, CircleJson) {
  const auto r = run_cli({"certify", data("circle.fj"), "--format", "json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["status"], "certified");
  EXPECT_EQ(j["mu"][0], "-1/2");
  EXPECT_EQ(j["lambda"][0], "1");
  for (const char* f : {"a", "b", "c", "d", "e"}) EXPECT_TRUE(j["flags"][f].get<bool>()) << f;
  EXPECT_TRUE(j["qualifications"]["licq"].get<bool>());
  for (const char* key : {"problem", "point", "active_set", "regime", "residuals"}) EXPECT_TRUE(j.contains(key)) << key;
}

TEST(Certify, JsonRoundTripVerifies) {
  for (const char* file : {"circle.fj", "circle_with_bound.fj", "bound.fj", "dependent.fj", "transcendental.fj"}) {
    const auto r = run_cli({"certify", data(file), "--format", "json"});
    if (r.code != kExitOk) continue;
    const auto cert = certificate_from_json(Json::parse(r.out));
    const auto lp = load_problem_file(data(file));
    EXPECT_TRUE(verify_certificate(lp.problem, *lp.point, cert).pass()) << file;
  }
}

TEST(Certify, ReportsAreDeterministic) {
  for (const char* fmt : {"json", "text"}) {
    const auto a = run_cli({"certify", data("circle_with_bound.fj"), "--format", fmt, "--seed", "5"});
    const auto b = run_cli({"certify", data("circle_with_bound.fj"), "--format", fmt, "--seed", "5"});
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.code, b.code);
  }
  const auto a = run_cli({"gradcheck", data("transcendental.fj"), "--seed", "9"});
  const auto b = run_cli({"gradcheck", data("transcendental.fj"), "--seed", "9"});
  EXPECT_EQ(a.out, b.out);
}

TEST(Certify, InteriorPointWithNonzeroGradientRefutes) {
  EXPECT_EQ(run_cli({"certify", data("interior.fj")}).code, kExitRefuted);
}

TEST(Certify, MissingPointIsInputError) {
  const auto r = run_cli({"certify", data("no_point.fj")});
  EXPECT_EQ(r.code, kExitInputError);
  EXPECT_NE(r.err.find("point"), std::string::npos);
}

TEST(Certify, PointOverride) {
  EXPECT_EQ(run_cli({"certify", data("no_point.fj"), "--point", "x=1"}).code, kExitOk);
  EXPECT_EQ(run_cli({"certify", data("no_point.fj"), "--point", "x=0"}).code, kExitRefuted);
}

TEST(Certify, InfeasiblePoint) {
  EXPECT_EQ(run_cli({"certify", data("infeasible.fj")}).code, kExitInfeasible);
}

TEST(Certify, BadInputs) {
  EXPECT_EQ(run_cli({"certify", data("does_not_exist.fj")}).code, kExitInputError);
  EXPECT_EQ(run_cli({"certify", data("circle.fj"), "--tol-active", "-1"}).code, kExitInputError);
  EXPECT_EQ(run_cli({"certify"}).code, kExitInputError);
  EXPECT_EQ(run_cli({}).code, kExitInputError);
}

TEST(Qualify, ExitReflectsQualifications) {
  EXPECT_EQ(run_cli({"qualify", data("circle.fj")}).code, kExitOk);
  EXPECT_EQ(run_cli({"qualify", data("dependent.fj")}).code, kExitRefuted);
  const auto r = run_cli({"qualify", data("bound.fj"), "--format", "json"});
  ASSERT_EQ(r.code, kExitOk);
  const Json j = Json::parse(r.out);
  EXPECT_TRUE(j["qualifications"]["mfcq"].get<bool>());
}

TEST(Farkas, Examples) {
  auto r = run_cli({"farkas", data("farkas_combination.txt")});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("combination: 1, 1"), std::string::npos) << r.out;
  r = run_cli({"farkas", data("farkas_separator.txt")});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("separator: 0, -1"), std::string::npos) << r.out;
  EXPECT_EQ(run_cli({"farkas", data("farkas_ragged.txt")}).code, kExitInputError);
}

TEST(Farkas, ParserRejectsMalformedRows) {
  EXPECT_THROW(parse_farkas_input("phi: 1, x\na: 1, 1\n"), InputError);
  EXPECT_THROW(parse_farkas_input("phi: 1, 0\n"), InputError);
  EXPECT_THROW(parse_farkas_input("phi: 1, 0\na: 1\n"), InputError);
  const auto in = parse_farkas_input("# comment\nphi: 1/2, 0.25\na: 1, -3\n");
  EXPECT_EQ(in.phis.size(), 1u);
  EXPECT_EQ(in.phis[0][1], Rational(1, 4));
}

TEST(Gradcheck, CirclePasses) {
  const auto r = run_cli({"gradcheck", data("circle_with_bound.fj")});
  EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
}

TEST(Gradcheck, LeavingTheDomainExitsTwo) {
  EXPECT_EQ(run_cli({"gradcheck", data("log_tiny.fj")}).code, kExitInfeasible);
}

TEST(Gradcheck, ToleranceBelowRoundoffFails) {
  EXPECT_EQ(run_cli({"gradcheck", data("transcendental.fj")}).code, kExitOk);
  EXPECT_EQ(run_cli({"gradcheck", data("transcendental.fj"), "--tol", "1e-15"}).code, kExitRefuted);
}

}  // namespace
}  // namespace fjcert::cli
