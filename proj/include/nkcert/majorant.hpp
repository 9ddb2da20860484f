#pragma once

// Scalar majorant side of the generalized Newton-Kantorovich analysis.
//
// With chi = omega^-1(1 - h):
//   Phi_h(t) = a - Omega(chi) + Omega(chi - t) - t h,   t in [0, chi]
//   W(t)     = Phi_h(t) + Psi(t)
//   t_{n+1}  = t_n - W(t_n) / Phi_h'(t_n),  t_0 = 0
//   rho_{n+1} = rho_n + W(rho_n),           rho_0 = 0
// The recurrence for t_n majorizes the Newton steps; rho_n majorizes the
// simplified (Picard) iteration u_{n+1} = u_n - (F + G)(u_n).

#include <cstddef>
#include <string>
#include <vector>

#include "nkcert/moduli.hpp"

namespace nkcert {

class MajorantConfig {
public:
  /// Throws ValidationError unless a > 0, 0 <= h < 1, the modulus validates
  /// and 1 - h lies in the range of omega.
  static MajorantConfig make(double a, double h, Modulus modulus, PsiRate psi);

  double a() const { return a_; }
  double h() const { return h_; }
  double chi() const { return chi_; }
  const Modulus& modulus() const { return modulus_; }
  const PsiRate& psi() const { return psi_; }

  /// Omega(chi) + h chi - Psi(chi); the certificate needs a below this.
  double critical_value() const;

private:
  MajorantConfig(double a, double h, Modulus modulus, PsiRate psi, double chi)
      : a_(a), h_(h), chi_(chi), modulus_(std::move(modulus)), psi_(std::move(psi)) {}

  double a_;
  double h_;
  double chi_;
  Modulus modulus_;
  PsiRate psi_;
};

struct MajorantTrace {
  std::vector<double> t;  // t_0 = 0, t_1 = a, ...
  double t_star = 0.0;    // last computed term
  bool converged = false;
  std::size_t iterations = 0;

  /// chi - t_n
  double alpha(const MajorantConfig& cfg, std::size_t n) const { return cfg.chi() - t.at(n); }
  /// t_{n+1} - t_n
  double delta(std::size_t n) const { return t.at(n + 1) - t.at(n); }
};

struct Certificate {
  double a = 0.0;
  double h = 0.0;
  double chi = 0.0;
  double omega_integral_chi = 0.0;  // Omega(chi)
  double psi_integral_chi = 0.0;    // Psi(chi)
  double domain_radius = 0.0;

  bool condition_holds = false;  // a < Omega(chi) + h chi - Psi(chi), strict
  double condition_slack = 0.0;  // Omega(chi) + h chi - Psi(chi) - a
  bool unique_zero_found = false;
  bool convex_on_grid = false;
  double t_star = 0.0;
  bool ball_radius_ok = false;  // t_star <= R
  double w_at_0 = 0.0;
  double w_at_chi = 0.0;

  bool certified() const { return condition_holds && unique_zero_found && ball_radius_ok; }
  /// Human-readable reason for the first failed hypothesis, empty if certified.
  std::string failure_reason() const;
};

double phi_h(const MajorantConfig& cfg, double t);
/// Phi_h'(t) = -omega(chi - t) - h
double phi_h_derivative(const MajorantConfig& cfg, double t);
double w_eval(const MajorantConfig& cfg, double t);

Certificate check_conditions(const MajorantConfig& cfg, double domain_radius);

/// Bisection for the zero of W on [0, chi] down to width 1e-14 chi.
/// Throws PreconditionError when W(0) > 0 > W(chi) fails.
double find_t_star(const MajorantConfig& cfg);

/// One step of the majorant recurrence in its explicit form.
double next_t(const MajorantConfig& cfg, double t_n);
/// Same step written as t_n - W(t_n) / Phi_h'(t_n).
double next_t_newton_form(const MajorantConfig& cfg, double t_n);

MajorantTrace run_majorant(const MajorantConfig& cfg, double tol = 1e-12,
                           std::size_t max_iter = 500);

/// d(rho) = rho + W(rho)
double next_rho(const MajorantConfig& cfg, double rho_n);

struct IdentityReport {
  std::vector<double> deviations;  // per n, LHS - (a - Omega(chi))
  double worst = 0.0;
  std::size_t worst_index = 0;
  bool ok = true;
};

/// omega(chi - t_n)(t_{n+1} - t_n) - Omega(chi - t_n) + t_{n+1} h - Psi(t_n)
///   == a - Omega(chi)  at every n of the trace.
IdentityReport residual_identity_check(const MajorantConfig& cfg, const MajorantTrace& trace,
                                       double tolerance = 1e-10);

inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kAuditSlack = 1e-10;

} // namespace nkcert
