#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nkcert/audit.hpp"
#include "nkcert/moduli.hpp"
#include "nkcert/operator_model.hpp"
#include "nkcert/problems.hpp"

namespace nkcert::cli {

/// Exit codes shared by all subcommands.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitNotCertified = 2,  // certificate failed, or audit found violations
  kExitBoundViolation = 3,
  kExitIterationFailure = 4,
};

struct AuditSettings {
  std::size_t samples = 10000;
  std::uint64_t seed = kDefaultSeed;
};

struct OutputPaths {
  std::string report;
  std::string csv;
};

/// One run, loaded from a JSON document and then overridden by flags.
struct RunConfig {
  std::string problem;  // corpus name; may be empty for `majorant`
  Overrides overrides;
  NormKind norm = NormKind::Euclidean;
  std::optional<double> h;  // replaces the problem's declared h
  double tol = 1e-10;
  std::size_t max_iter = 100;
  AuditSettings audit;
  OutputPaths outputs;
  bool force = false;

  // Direct majorant inputs; the moduli also replace a problem's declarations.
  std::optional<double> a;
  std::optional<Modulus> modulus;
  std::optional<PsiRate> psi;

  /// Throws ValidationError for tol <= 0 or max_iter < 1.
  void validate() const;
};

Modulus modulus_from_json(const nlohmann::json& j);
PsiRate psi_from_json(const nlohmann::json& j);

/// Parse a RunConfig document. Throws ValidationError on schema errors.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Parse a `key=value` override; the value must be a number.
std::pair<std::string, double> parse_override(const std::string& text);

/// Format with 17 significant digits.
std::string format_number(double v);

int cmd_certify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_picard(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_audit(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_majorant(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_corpus(std::ostream& out);

/// Entry point: args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

inline constexpr const char* kSolveCsvHeader =
    "n,t_n,delta_t,step_norm,residual,error_bound,bound_ok";

} // namespace nkcert::cli
