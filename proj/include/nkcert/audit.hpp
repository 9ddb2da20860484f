#pragma once

// Empirical checks of the hypotheses behind a certificate and of the bounds a
// certified run promises. Sampling can falsify a declared modulus, it can
// never prove one.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nkcert/moduli.hpp"
#include "nkcert/operator_model.hpp"
#include "nkcert/solver.hpp"

namespace nkcert {

inline constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;
inline constexpr double kSampleTolerance = 1e-10;
inline constexpr std::size_t kMaxRecordedViolations = 16;

inline constexpr const char* kSamplingDisclaimer =
    "sampling can only falsify the declared hypotheses; passing checks do not prove them";

/// Deterministic sampler of points uniformly distributed in a ball (rejection
/// from the bounding cube). Uses its own uniform mapping so the stream does
/// not depend on the standard library's distribution implementation.
class BallSampler {
public:
  BallSampler(std::uint64_t seed, NormKind norm) : state_(seed), norm_(norm) {}

  double uniform();  // [0, 1)
  Vector point(const Vector& center, double radius);

private:
  std::uint64_t next();

  std::uint64_t state_;
  NormKind norm_;
};

struct Violation {
  std::size_t sample = 0;
  Vector x1;
  Vector x2;
  double lhs = 0.0;
  double rhs = 0.0;
  double deficit = 0.0;  // lhs - rhs
};

struct CheckReport {
  std::string name;
  bool skipped = false;
  std::size_t pairs_checked = 0;
  std::size_t violation_count = 0;
  std::vector<Violation> violations;  // first kMaxRecordedViolations
  double max_deficit = -std::numeric_limits<double>::infinity();
  /// Pairs where min ||F'|| - h < 0: the declared h exceeds the sampled h(f).
  std::size_t h_exceeded_count = 0;
  std::string note;

  bool passed() const { return violation_count == 0 && h_exceeded_count == 0; }
  void record(std::size_t sample, const Vector& x1, const Vector& x2, double lhs, double rhs);
};

struct SmoothnessSampleReport : CheckReport {
  double h_used = 0.0;
  double xi_min = std::numeric_limits<double>::infinity();
  double xi_max = 0.0;
  double xi_mean = 0.0;
  /// Pairs where xi(x', x'') >= omega^-1(||F'(x')|| - h) - ||x'' - x'|| failed.
  std::size_t xi_bound_failures = 0;
};

/// ||F'(x'') - F'(x')|| <= omega(xi + ||x'' - x'||) - omega(xi),
/// xi = omega^-1(min(||F'(x')||, ||F'(x'')||) - h).
SmoothnessSampleReport check_regular_smoothness(const PreconditionedProblem& pp, const Modulus& m,
                                                double h, std::size_t samples,
                                                std::uint64_t seed = kDefaultSeed);

/// |omega^-1(||F'(x'')|| - h) - omega^-1(||F'(x')|| - h)| <= ||x'' - x'||
CheckReport check_norm_variation(const PreconditionedProblem& pp, const Modulus& m, double h,
                                 std::size_t samples, std::uint64_t seed = kDefaultSeed);

/// For a sampled radius t and x', x'' in B(x0, t):
///   ||G(x'') - G(x')|| <= psi(t) ||x'' - x'||  and
///   ||G(x'') - G(x')|| <= Psi(t + ||x'' - x'||) - Psi(t).
/// Violations of either inequality count; the two are reported separately.
struct PsiReport {
  CheckReport pointwise;
  CheckReport integral;
  bool passed() const { return pointwise.passed() && integral.passed(); }
};
PsiReport check_psi_condition(const PreconditionedProblem& pp, const PsiRate& p,
                              std::size_t samples, std::uint64_t seed = kDefaultSeed);

struct ResidualAuditReport {
  std::vector<double> measured;  // r(x_{n-1}, x_n), n = 1..N
  std::vector<double> bound;     // a - Omega(chi) + Omega(chi - t_n) - t_n h + Psi(t_{n-1})
  std::vector<double> slack;     // bound - measured
  double worst_slack = std::numeric_limits<double>::infinity();
  std::size_t violation_count = 0;
  bool passed() const { return violation_count == 0; }
};

/// Linearization residual ||F(x_n) - F(x_{n-1}) - F'(x_{n-1})(x_n - x_{n-1})||
/// against its majorant estimate, for every step of a solve.
ResidualAuditReport audit_residual_estimate(const PreconditionedProblem& pp,
                                            const SolveResult& result);

struct ErrorBoundReport {
  bool skipped = false;
  std::string note;
  std::vector<double> error;  // ||x_oracle - x_n||
  std::vector<double> bound;  // t* - t_n
  std::size_t violation_count = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  bool passed() const { return violation_count == 0; }
};

/// ||x_oracle - x_n|| <= t* - t_n + slack for every iterate of a certified run.
ErrorBoundReport audit_error_bound(const PreconditionedProblem& pp, const SolveResult& result,
                                   const Vector& oracle);

/// High-precision reference root: Newton to residual < tol with 4x the default
/// iteration budget, and in one dimension bisection on a sign bracket when
/// one is supplied. Throws OracleUnavailable.
Vector oracle_solution(const PreconditionedProblem& pp, double tol = 1e-14,
                       const std::optional<std::pair<double, double>>& bracket = std::nullopt);

} // namespace nkcert
