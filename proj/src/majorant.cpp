#include "nkcert/majorant.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nkcert/errors.hpp"

namespace nkcert {

namespace {

void require_in_horizon(const MajorantConfig& cfg, double t, const char* what) {
  if (!(t >= 0.0 && t <= cfg.chi()))
    throw DomainError(fmt::format("{}: t = {:.17g} outside [0, chi = {:.17g}]", what, t, cfg.chi()));
}

bool w_convex_on_grid(const MajorantConfig& cfg) {
  constexpr int kPoints = 257;
  const double chi = cfg.chi();
  std::vector<double> w(kPoints);
  for (int i = 0; i < kPoints; ++i) w[i] = w_eval(cfg, chi * i / (kPoints - 1));
  for (int i = 1; i + 1 < kPoints; ++i) {
    double second = w[i - 1] - 2.0 * w[i] + w[i + 1];
    double scale = std::abs(w[i - 1]) + 2.0 * std::abs(w[i]) + std::abs(w[i + 1]);
    if (second < -1e-13 * std::max(1.0, scale)) return false;
  }
  return true;
}

} // namespace

MajorantConfig MajorantConfig::make(double a, double h, Modulus modulus, PsiRate psi) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw ValidationError("majorant: residual bound a must be positive and finite");
  if (!(h >= 0.0 && h < 1.0))
    throw ValidationError("majorant: h must lie in [0, 1)");
  ValidationReport report = validate(modulus);
  if (!report.valid)
    throw ValidationError("majorant: invalid modulus: " + report.first_violation);
  if (1.0 - h > modulus.sup_value())
    throw RangeError("majorant: 1 - h lies above the range of omega, chi undefined");
  double chi = modulus.inverse(1.0 - h);
  MajorantConfig cfg(a, h, std::move(modulus), std::move(psi), chi);
  if (!std::isfinite(cfg.critical_value()))
    throw ValidationError("majorant: Omega(chi) + h chi - Psi(chi) is not finite");
  return cfg;
}

double MajorantConfig::critical_value() const {
  return modulus_.integral(chi_) + h_ * chi_ - psi_.integral(chi_);
}

std::string Certificate::failure_reason() const {
  if (!condition_holds)
    return fmt::format(
        "majorant condition a < Omega(chi) + h*chi - Psi(chi) violated, slack = {:.17g}",
        condition_slack);
  if (!unique_zero_found)
    return fmt::format("no unique zero of W in (0, chi): W(0) = {:.17g}, W(chi) = {:.17g}",
                       w_at_0, w_at_chi);
  if (!ball_radius_ok)
    return fmt::format("ball of radius t* = {:.17g} not contained in domain of radius {:.17g}",
                       t_star, domain_radius);
  return {};
}

double phi_h(const MajorantConfig& cfg, double t) {
  require_in_horizon(cfg, t, "Phi_h");
  const Modulus& m = cfg.modulus();
  return cfg.a() - m.integral(cfg.chi()) + m.integral(cfg.chi() - t) - t * cfg.h();
}

double phi_h_derivative(const MajorantConfig& cfg, double t) {
  require_in_horizon(cfg, t, "Phi_h'");
  return -cfg.modulus().value(cfg.chi() - t) - cfg.h();
}

double w_eval(const MajorantConfig& cfg, double t) {
  return phi_h(cfg, t) + cfg.psi().integral(t);
}

Certificate check_conditions(const MajorantConfig& cfg, double domain_radius) {
  Certificate c;
  c.a = cfg.a();
  c.h = cfg.h();
  c.chi = cfg.chi();
  c.omega_integral_chi = cfg.modulus().integral(cfg.chi());
  c.psi_integral_chi = cfg.psi().integral(cfg.chi());
  c.domain_radius = domain_radius;
  c.condition_slack = c.omega_integral_chi + c.h * c.chi - c.psi_integral_chi - c.a;
  c.condition_holds = c.a < c.omega_integral_chi + c.h * c.chi - c.psi_integral_chi;
  c.w_at_0 = w_eval(cfg, 0.0);
  c.w_at_chi = w_eval(cfg, cfg.chi());
  c.convex_on_grid = w_convex_on_grid(cfg);

  if (c.condition_holds && c.w_at_0 > 0.0 && c.w_at_chi < 0.0) {
    c.t_star = find_t_star(cfg);
    c.unique_zero_found = c.convex_on_grid && c.t_star > 0.0 && c.t_star < c.chi;
    c.ball_radius_ok = c.t_star <= domain_radius;
  }
  return c;
}

double find_t_star(const MajorantConfig& cfg) {
  double lo = 0.0;
  double hi = cfg.chi();
  if (!(w_eval(cfg, lo) > 0.0 && w_eval(cfg, hi) < 0.0))
    throw PreconditionError("find_t_star: W does not change sign on [0, chi]");
  const double width = 1e-14 * cfg.chi();
  while (hi - lo > width) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (w_eval(cfg, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double next_t(const MajorantConfig& cfg, double t_n) {
  if (!(t_n >= 0.0 && t_n < cfg.chi()))
    throw DomainError(fmt::format("next_t: t_n = {:.17g} outside [0, chi)", t_n));
  const Modulus& m = cfg.modulus();
  const double chi = cfg.chi();
  double numerator = cfg.a() - m.integral(chi) + m.integral(chi - t_n) - t_n * cfg.h() +
                     cfg.psi().integral(t_n);
  double denominator = cfg.h() + m.value(chi - t_n);
  return t_n + numerator / denominator;
}

double next_t_newton_form(const MajorantConfig& cfg, double t_n) {
  if (!(t_n >= 0.0 && t_n < cfg.chi()))
    throw DomainError(fmt::format("next_t: t_n = {:.17g} outside [0, chi)", t_n));
  return t_n - w_eval(cfg, t_n) / phi_h_derivative(cfg, t_n);
}

MajorantTrace run_majorant(const MajorantConfig& cfg, double tol, std::size_t max_iter) {
  MajorantTrace trace;
  trace.t.push_back(0.0);
  for (std::size_t it = 0; it < max_iter; ++it) {
    double t_n = trace.t.back();
    if (!(t_n < cfg.chi())) break;  // only reachable when the certificate fails
    double t_next = next_t(cfg, t_n);
    trace.t.push_back(t_next);
    if (t_next - t_n < tol) {
      trace.converged = true;
      break;
    }
  }
  trace.iterations = trace.t.size() - 1;
  trace.t_star = trace.t.back();
  return trace;
}

double next_rho(const MajorantConfig& cfg, double rho_n) {
  require_in_horizon(cfg, rho_n, "next_rho");
  return rho_n + w_eval(cfg, rho_n);
}

IdentityReport residual_identity_check(const MajorantConfig& cfg, const MajorantTrace& trace,
                                       double tolerance) {
  IdentityReport report;
  const Modulus& m = cfg.modulus();
  const double chi = cfg.chi();
  const double rhs = cfg.a() - m.integral(chi);
  for (std::size_t n = 0; n + 1 < trace.t.size(); ++n) {
    double t_n = trace.t[n];
    double t_next = trace.t[n + 1];
    double lhs = m.value(chi - t_n) * (t_next - t_n) - m.integral(chi - t_n) +
                 t_next * cfg.h() - cfg.psi().integral(t_n);
    double deviation = lhs - rhs;
    report.deviations.push_back(deviation);
    if (std::abs(deviation) > std::abs(report.worst) || n == 0) {
      report.worst = deviation;
      report.worst_index = n;
    }
  }
  report.ok = std::abs(report.worst) <= tolerance;
  return report;
}

} // namespace nkcert
