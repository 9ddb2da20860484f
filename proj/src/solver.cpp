#include "nkcert/solver.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "nkcert/errors.hpp"

namespace nkcert {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class Iteration { Newton, Picard };

// Shared state machine for both iterations. The Newton variant pairs step n
// with t_{n+1} - t_n from the majorant recurrence, the Picard variant with
// rho_{n+1} - rho_n from d(rho) = rho + W(rho).
SolveResult run(const PreconditionedProblem& pp, const SolveOptions& options, Iteration kind) {
  SolveResult result;
  result.final_x = pp.x0();

  try {
    result.config = majorant_config(pp);
  } catch (const std::exception& e) {
    result.status = SolveStatus::CertificateFailed;
    result.diagnostic = std::string("majorant setup failed: ") + e.what();
    return result;
  }
  const MajorantConfig& cfg = *result.config;
  result.certificate = check_conditions(cfg, pp.radius());

  bool certified = result.certificate.certified();
  if (certified && !pp.exact_jacobian()) {
    certified = false;
    result.diagnostic = "finite-difference Jacobian: certified runs need an exact derivative";
  } else if (!certified) {
    result.diagnostic = result.certificate.failure_reason();
  }
  if (!certified && !options.force) {
    result.status = SolveStatus::CertificateFailed;
    return result;
  }

  const double t_star = certified ? result.certificate.t_star : kNaN;
  const double slack = audit_slack(t_star);

  Vector x = pp.x0();
  double t = 0.0;
  bool small_step = false;
  result.majorant.t.push_back(t);

  auto finish = [&](SolveStatus status, const Vector& final_x) {
    result.status = status;
    result.final_x = final_x;
    result.majorant.t_star = t_star;
    result.majorant.iterations = result.majorant.t.size() - 1;
    result.majorant.converged = status == SolveStatus::Converged;
    return result;
  };

  for (std::size_t n = 0;; ++n) {
    if (!in_domain(pp.base(), x)) {
      result.diagnostic = fmt::format("iterate {} left the domain ball", n);
      return finish(SolveStatus::DomainExit, x);
    }
    Vector r = pp.residual(x);
    double residual_norm = pp.norm_of(r);
    result.final_residual = residual_norm;
    if (residual_norm <= options.tol) return finish(SolveStatus::Converged, x);
    if (small_step) {
      result.diagnostic = fmt::format(
          "step below tol but residual {:.17g} above tol at iterate {}", residual_norm, n);
      return finish(SolveStatus::Stagnated, x);
    }
    if (n >= options.max_iter) return finish(SolveStatus::MaxIter, x);

    Vector x_next;
    if (kind == Iteration::Newton) {
      try {
        x_next = x - LuFactorization(pp.jacobian(x)).solve(r);
      } catch (const SingularMatrixError& e) {
        result.diagnostic = fmt::format("iterate {}: {}", n, e.what());
        return finish(SolveStatus::SingularJacobian, x);
      }
    } else {
      x_next = x - r;
    }

    double t_next = kNaN;
    if (kind == Iteration::Newton) {
      if (t >= 0.0 && t < cfg.chi()) t_next = next_t(cfg, t);
    } else {
      if (t >= 0.0 && t <= cfg.chi()) t_next = next_rho(cfg, t);
    }

    StepRecord rec;
    rec.n = n;
    rec.x = x;
    rec.x_next = x_next;
    rec.t_n = t;
    rec.majorant_delta = t_next - t;
    rec.step_norm = pp.norm_of(x_next - x);
    rec.residual_norm = residual_norm;
    rec.error_bound = t_star - t;
    rec.jacobian_inverse_bound =
        kind == Iteration::Picard ? 1.0 : (t < cfg.chi() ? inverse_bound(cfg, t) : kNaN);
    rec.certified = certified;
    rec.bound_ok = std::isfinite(rec.majorant_delta) &&
                   rec.step_norm <= rec.majorant_delta + slack;
    result.steps.push_back(rec);
    result.majorant.t.push_back(t_next);

    if (certified) {
      if (!rec.bound_ok) {
        result.diagnostic = fmt::format(
            "step {}: ||x_(n+1) - x_n|| = {:.17g} exceeds majorant increment {:.17g}; "
            "the declared moduli do not hold for this problem",
            n, rec.step_norm, rec.majorant_delta);
        return finish(SolveStatus::BoundViolation, x_next);
      }
      double distance = pp.norm_of(x_next - pp.x0());
      if (distance > t_star + slack) {
        result.diagnostic = fmt::format(
            "step {}: iterate at distance {:.17g} left the ball of radius t* = {:.17g}", n,
            distance, t_star);
        return finish(SolveStatus::BoundViolation, x_next);
      }
    }

    small_step = rec.step_norm < options.tol;
    x = std::move(x_next);
    t = t_next;
  }
}

} // namespace

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIter: return "max_iter";
    case SolveStatus::CertificateFailed: return "certificate_failed";
    case SolveStatus::DomainExit: return "domain_exit";
    case SolveStatus::SingularJacobian: return "singular_jacobian";
    case SolveStatus::BoundViolation: return "bound_violation";
    case SolveStatus::Stagnated: return "stagnated";
  }
  return "unknown";
}

MajorantConfig majorant_config(const PreconditionedProblem& pp) {
  const Problem& p = pp.base();
  return MajorantConfig::make(pp.a(), p.h, p.modulus, p.psi);
}

Vector newton_step(const PreconditionedProblem& pp, const Vector& x_n) {
  if (!in_domain(pp.base(), x_n)) throw DomainError("newton_step: point outside the domain");
  return x_n - LuFactorization(pp.jacobian(x_n)).solve(pp.residual(x_n));
}

double inverse_bound(const MajorantConfig& cfg, double t_n) {
  if (!(t_n >= 0.0 && t_n < cfg.chi()))
    throw DomainError(fmt::format("inverse_bound: t_n = {:.17g} outside [0, chi)", t_n));
  const Modulus& m = cfg.modulus();
  return 1.0 / (1.0 - (m.value(cfg.chi()) - m.value(cfg.chi() - t_n)));
}

double audit_slack(double t_star) {
  if (!std::isfinite(t_star)) return kAuditSlack;
  return kAuditSlack * std::max(1.0, t_star);
}

SolveResult solve_certified(const PreconditionedProblem& pp, const SolveOptions& options) {
  return run(pp, options, Iteration::Newton);
}

SolveResult solve_picard(const PreconditionedProblem& pp, const SolveOptions& options) {
  return run(pp, options, Iteration::Picard);
}

std::optional<Vector> plain_newton(const PreconditionedProblem& pp, const Vector& start,
                                   double tol, std::size_t max_iter) {
  Vector x = start;
  for (std::size_t n = 0; n <= max_iter; ++n) {
    if (!in_domain(pp.base(), x)) return std::nullopt;
    Vector r = pp.residual(x);
    if (pp.norm_of(r) < tol) return x;
    if (n == max_iter) break;
    try {
      x = x - LuFactorization(pp.jacobian(x)).solve(r);
    } catch (const SingularMatrixError&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

} // namespace nkcert
