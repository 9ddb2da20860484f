#include "nkcert/audit.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nkcert/errors.hpp"

namespace nkcert {

std::uint64_t BallSampler::next() {
  // splitmix64
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double BallSampler::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

Vector BallSampler::point(const Vector& center, double radius) {
  Vector offset(center.size());
  for (;;) {
    for (Eigen::Index i = 0; i < offset.size(); ++i)
      offset(i) = (2.0 * uniform() - 1.0) * radius;
    if (vector_norm(offset, norm_) <= radius) return center + offset;
  }
}

void CheckReport::record(std::size_t sample, const Vector& x1, const Vector& x2, double lhs,
                         double rhs) {
  ++pairs_checked;
  double deficit = lhs - rhs;
  max_deficit = std::max(max_deficit, deficit);
  if (deficit > kSampleTolerance) {
    ++violation_count;
    if (violations.size() < kMaxRecordedViolations)
      violations.push_back(Violation{sample, x1, x2, lhs, rhs, deficit});
  }
}

SmoothnessSampleReport check_regular_smoothness(const PreconditionedProblem& pp, const Modulus& m,
                                                double h, std::size_t samples,
                                                std::uint64_t seed) {
  SmoothnessSampleReport report;
  report.name = "regular_smoothness";
  report.h_used = h;
  if (samples == 0) {
    report.skipped = true;
    report.note = "no samples requested";
    return report;
  }
  BallSampler sampler(seed, pp.norm());
  double xi_sum = 0.0;
  std::size_t xi_count = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    Vector x1 = sampler.point(pp.x0(), pp.radius());
    Vector x2 = sampler.point(pp.x0(), pp.radius());
    Matrix j1 = pp.jacobian(x1);
    Matrix j2 = pp.jacobian(x2);
    double n1 = operator_norm(j1, pp.norm());
    double n2 = operator_norm(j2, pp.norm());
    double s = pp.norm_of(x2 - x1);

    double hf = std::min(n1, n2) - h;
    if (hf < -kSampleTolerance) {
      ++report.h_exceeded_count;
      continue;
    }
    hf = std::max(hf, 0.0);
    double xi;
    double rhs;
    try {
      xi = m.inverse(hf);
      rhs = m.value(xi + s) - m.value(xi);
    } catch (const std::range_error&) {
      // The modulus cannot even represent this Jacobian variation.
      report.record(i, x1, x2, std::numeric_limits<double>::infinity(), 0.0);
      continue;
    }
    double lhs = operator_norm(j2 - j1, pp.norm());
    report.record(i, x1, x2, lhs, rhs);

    report.xi_min = std::min(report.xi_min, xi);
    report.xi_max = std::max(report.xi_max, xi);
    xi_sum += xi;
    ++xi_count;
    double xi_floor = m.inverse(std::max(n1 - h, 0.0)) - s;
    if (xi < xi_floor - kSampleTolerance) ++report.xi_bound_failures;
  }
  if (xi_count > 0) report.xi_mean = xi_sum / static_cast<double>(xi_count);
  if (report.h_exceeded_count > 0)
    report.note = fmt::format("declared h exceeds the sampled h(f) at {} pairs",
                              report.h_exceeded_count);
  else
    report.note = fmt::format("declared h = {:.17g} consistent with {} samples", h, samples);
  return report;
}

CheckReport check_norm_variation(const PreconditionedProblem& pp, const Modulus& m, double h,
                                 std::size_t samples, std::uint64_t seed) {
  CheckReport report;
  report.name = "jacobian_norm_variation";
  if (samples == 0) {
    report.skipped = true;
    report.note = "no samples requested";
    return report;
  }
  BallSampler sampler(seed, pp.norm());
  for (std::size_t i = 0; i < samples; ++i) {
    Vector x1 = sampler.point(pp.x0(), pp.radius());
    Vector x2 = sampler.point(pp.x0(), pp.radius());
    double n1 = operator_norm(pp.jacobian(x1), pp.norm()) - h;
    double n2 = operator_norm(pp.jacobian(x2), pp.norm()) - h;
    if (std::min(n1, n2) < -kSampleTolerance) {
      ++report.h_exceeded_count;
      continue;
    }
    double lhs;
    try {
      lhs = std::abs(m.inverse(std::max(n2, 0.0)) - m.inverse(std::max(n1, 0.0)));
    } catch (const std::range_error&) {
      lhs = std::numeric_limits<double>::infinity();
    }
    report.record(i, x1, x2, lhs, pp.norm_of(x2 - x1));
  }
  if (report.h_exceeded_count > 0)
    report.note = fmt::format("declared h exceeds the sampled h(f) at {} pairs",
                              report.h_exceeded_count);
  return report;
}

PsiReport check_psi_condition(const PreconditionedProblem& pp, const PsiRate& p,
                              std::size_t samples, std::uint64_t seed) {
  PsiReport report;
  report.pointwise.name = "psi_lipschitz";
  report.integral.name = "psi_integral";
  if (samples == 0) {
    report.pointwise.skipped = report.integral.skipped = true;
    report.pointwise.note = report.integral.note = "no samples requested";
    return report;
  }
  BallSampler sampler(seed, pp.norm());
  for (std::size_t i = 0; i < samples; ++i) {
    double t = pp.radius() * (1.0 - sampler.uniform());  // (0, R]
    Vector x1 = sampler.point(pp.x0(), t);
    Vector x2 = sampler.point(pp.x0(), t);
    double s = pp.norm_of(x2 - x1);
    double lhs = pp.norm_of(pp.G(x2) - pp.G(x1));
    report.pointwise.record(i, x1, x2, lhs, p.value(t) * s);
    report.integral.record(i, x1, x2, lhs, p.integral(t + s) - p.integral(t));
  }
  return report;
}

ResidualAuditReport audit_residual_estimate(const PreconditionedProblem& pp,
                                            const SolveResult& result) {
  ResidualAuditReport report;
  if (!result.config) return report;
  const MajorantConfig& cfg = *result.config;
  const Modulus& m = cfg.modulus();
  const double slack = kAuditSlack * std::max(1.0, cfg.a());
  for (const StepRecord& step : result.steps) {
    double t_prev = step.t_n;
    double t_k = step.t_n + step.majorant_delta;
    if (!std::isfinite(t_k) || t_k > cfg.chi()) break;
    double measured;
    try {
      Vector dx = step.x_next - step.x;
      measured = pp.norm_of(pp.F(step.x_next) - pp.F(step.x) - pp.jacobian(step.x) * dx);
    } catch (const DomainError&) {
      break;
    }
    double bound = cfg.a() - m.integral(cfg.chi()) + m.integral(cfg.chi() - t_k) -
                   t_k * cfg.h() + cfg.psi().integral(t_prev);
    report.measured.push_back(measured);
    report.bound.push_back(bound);
    report.slack.push_back(bound - measured);
    report.worst_slack = std::min(report.worst_slack, bound - measured);
    if (measured > bound + slack) ++report.violation_count;
  }
  return report;
}

ErrorBoundReport audit_error_bound(const PreconditionedProblem& pp, const SolveResult& result,
                                   const Vector& oracle) {
  ErrorBoundReport report;
  if (!result.certified()) {
    report.skipped = true;
    report.note = "run not certified";
    return report;
  }
  const double t_star = result.certificate.t_star;
  const double slack = audit_slack(t_star);
  auto check = [&](const Vector& x, double t_n) {
    double error = pp.norm_of(oracle - x);
    double bound = t_star - t_n;
    report.error.push_back(error);
    report.bound.push_back(bound);
    report.worst_slack = std::min(report.worst_slack, bound - error);
    if (error > bound + slack) ++report.violation_count;
  };
  for (const StepRecord& step : result.steps) check(step.x, step.t_n);
  if (!result.steps.empty()) {
    const StepRecord& last = result.steps.back();
    check(last.x_next, last.t_n + last.majorant_delta);
  }
  return report;
}

Vector oracle_solution(const PreconditionedProblem& pp, double tol,
                       const std::optional<std::pair<double, double>>& bracket) {
  if (pp.dim() > 16) throw OracleUnavailable("oracle: dimension above 16");
  constexpr std::size_t kBudget = 4 * 100;
  std::optional<Vector> newton = plain_newton(pp, pp.x0(), tol, kBudget);

  if (pp.dim() == 1 && bracket) {
    auto value = [&](double s) { return pp.residual(Vector::Constant(1, s))(0); };
    double lo = bracket->first;
    double hi = bracket->second;
    double f_lo = value(lo);
    double f_hi = value(hi);
    if (f_lo == 0.0) return Vector::Constant(1, lo);
    if (f_hi == 0.0) return Vector::Constant(1, hi);
    if ((f_lo < 0.0) == (f_hi < 0.0))
      throw OracleUnavailable("oracle: bracket does not change sign");
    for (;;) {
      double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      double f_mid = value(mid);
      if (f_mid == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((f_mid < 0.0) == (f_lo < 0.0)) {
        lo = mid;
        f_lo = f_mid;
      } else {
        hi = mid;
      }
    }
    Vector root = Vector::Constant(1, 0.5 * (lo + hi));
    if (pp.norm_of(pp.residual(root)) >= tol)
      throw OracleUnavailable("oracle: bisection root does not reach the residual tolerance");
    if (newton && pp.norm_of(*newton - root) > 1e-12)
      throw OracleUnavailable("oracle: Newton and bisection roots disagree");
    return root;
  }

  if (!newton) throw OracleUnavailable("oracle: Newton did not reach the residual tolerance");
  return *newton;
}

} // namespace nkcert
