#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fjcert/engine.hpp"

namespace fjcert::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRefuted = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitInputError = 3;

enum class Subcommand { Certify, Qualify, Gradcheck, Farkas };
enum class Format { Text, Json };

struct RunConfig {
  Subcommand subcommand = Subcommand::Certify;
  std::string input;
  Tolerances tol;
  Format format = Format::Text;
  std::uint64_t seed = 1;
  std::optional<std::string> point;
  /// gradcheck: AD/FD agreement |ad - fd| <= grad_tol * (1 + |fd|)
  double grad_tol = 1e-6;
  /// gradcheck: Frechet probe tolerance at the smallest radius
  double probe_tol = kDefaultProbeTolerance;
};

struct FarkasInput {
  std::vector<LinFunc> phis;
  LinFunc target;
};

/// Lines "phi: r1, r2, ..." (repeated) and one "a: r1, r2, ..."; entries are
/// integers, p/q fractions or decimals; '#' starts a comment.
FarkasInput parse_farkas_input(std::string_view text);

int cmd_certify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_qualify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_gradcheck(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_farkas(const RunConfig& config, std::ostream& out, std::ostream& err);

int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv with CLI11 and dispatches. Usage errors exit with kExitInputError.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fjcert::cli
