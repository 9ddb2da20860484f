#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nkcert/majorant.hpp"
#include "nkcert/operator_model.hpp"

namespace nkcert {

enum class SolveStatus {
  Converged,
  MaxIter,
  CertificateFailed,
  DomainExit,
  SingularJacobian,
  BoundViolation,
  Stagnated,
};

std::string to_string(SolveStatus status);

/// One iteration x_n -> x_{n+1} paired with the same-index majorant increment.
/// For the Picard iteration the majorant column holds rho_n instead of t_n.
struct StepRecord {
  std::size_t n = 0;
  Vector x;       // x_n
  Vector x_next;  // x_{n+1}
  double t_n = 0.0;
  double majorant_delta = 0.0;  // t_{n+1} - t_n
  double step_norm = 0.0;       // ||x_{n+1} - x_n||
  double residual_norm = 0.0;   // ||F(x_n) + G(x_n)||
  double error_bound = 0.0;     // t* - t_n
  double jacobian_inverse_bound = 1.0;
  bool certified = true;
  bool bound_ok = true;
};

struct SolveResult {
  SolveStatus status = SolveStatus::MaxIter;
  Vector final_x;
  double final_residual = 0.0;
  std::vector<StepRecord> steps;
  Certificate certificate;
  MajorantTrace majorant;  // t_n (or rho_n) used in lockstep with the steps
  std::optional<MajorantConfig> config;
  std::string diagnostic;

  bool certified() const { return certificate.certified(); }
};

struct SolveOptions {
  double tol = 1e-10;
  std::size_t max_iter = 100;
  /// Run even when the certificate fails; rows are then marked uncertified.
  bool force = false;
};

/// Majorant configuration built from the problem's declared moduli and a.
MajorantConfig majorant_config(const PreconditionedProblem& pp);

/// x_n - F'(x_n)^-1 (F(x_n) + G(x_n)). Throws DomainError outside the ball
/// and SingularMatrixError for a singular Jacobian.
Vector newton_step(const PreconditionedProblem& pp, const Vector& x_n);

/// 1 / (1 - [omega(chi) - omega(chi - t_n)]), the Neumann bound on ||F'(x_n)^-1||.
double inverse_bound(const MajorantConfig& cfg, double t_n);

/// Slack allowed on every audited inequality: 1e-10 max(1, t*).
double audit_slack(double t_star);

SolveResult solve_certified(const PreconditionedProblem& pp, const SolveOptions& options = {});
SolveResult solve_picard(const PreconditionedProblem& pp, const SolveOptions& options = {});

/// Plain Newton iteration with no majorant bookkeeping; used by oracles and
/// the uniqueness probe. Returns nullopt if it leaves the domain or fails.
std::optional<Vector> plain_newton(const PreconditionedProblem& pp, const Vector& start,
                                   double tol, std::size_t max_iter);

} // namespace nkcert
