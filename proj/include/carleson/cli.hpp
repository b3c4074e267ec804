#pragma once
// Batch front end shared by the `carleson` executable and the tests.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "carleson/rational.hpp"

namespace carleson::cli {

enum class Mode { analyze, extrapolate, sawtooth, christ, oracle, generate };

Mode mode_from_string(const std::string& name);

struct RunConfig {
  Mode mode = Mode::analyze;
  int d = 1;
  int depth = 1;
  std::optional<Rational> delta;
  std::optional<Rational> C;
  // analyze: measure. extrapolate / oracle: mu, nu measures.
  std::string mu;
  std::string nu;
  // sawtooth: atom files and an optional cube family (default: empty family).
  std::string mu_atoms;
  std::string nu_atoms;
  std::string family;
  // christ: metric space file and scale exponent.
  std::string space;
  int N = 1;
  // generate
  std::string kind = "product";
  Rational target = 1;
  std::optional<std::string> focus;  // "level:j1,j2,..." or a node id
  bool symmetric = false;
  std::uint64_t seed = 0;
  bool trace = false;
  std::string out;  // empty: write to `out` stream
};

/// Exit codes.
inline constexpr int kPass = 0;
inline constexpr int kInputError = 1;
inline constexpr int kHypothesisViolation = 2;
inline constexpr int kAuditFailure = 3;

/// Runs one mode. The report goes to config.out (or `out` when empty);
/// diagnostics go to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace carleson::cli
