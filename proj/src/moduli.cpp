#include "nkcert/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nkcert/errors.hpp"

namespace nkcert {

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_nonnegative(double t, const char* what) {
  if (!(t >= 0.0))
    throw DomainError(std::string(what) + ": negative argument");
}

// Index of the segment [points[i], points[i+1]] containing t.
std::size_t segment_of(const std::vector<Breakpoint>& points, double t) {
  auto it = std::upper_bound(points.begin(), points.end(), t,
                             [](double v, const Breakpoint& b) { return v < b.t; });
  std::size_t i = static_cast<std::size_t>(it - points.begin());
  if (i == 0) return 0;
  return std::min(i - 1, points.size() - 2);
}

double interpolate(const std::vector<Breakpoint>& points, double t) {
  std::size_t i = segment_of(points, t);
  const Breakpoint& p = points[i];
  const Breakpoint& q = points[i + 1];
  double slope = (q.value - p.value) / (q.t - p.t);
  return p.value + slope * (t - p.t);
}

// Integral of the piecewise-linear interpolant over [0, t], t within range.
double integrate_piecewise(const std::vector<Breakpoint>& points, double t) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const Breakpoint& p = points[i];
    const Breakpoint& q = points[i + 1];
    if (t <= p.t) break;
    double right = std::min(t, q.t);
    double vr = right == q.t ? q.value : interpolate(points, right);
    acc += 0.5 * (p.value + vr) * (right - p.t);
  }
  return acc;
}

void check_breakpoints(const std::vector<Breakpoint>& points, const char* what) {
  if (points.size() < 2)
    throw ValidationError(std::string(what) + ": need at least two breakpoints");
  if (points.front().t != 0.0)
    throw ValidationError(std::string(what) + ": first breakpoint must be at t = 0");
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i + 1].t > points[i].t))
      throw ValidationError(std::string(what) + ": breakpoints must be strictly increasing in t");
  }
  for (const Breakpoint& b : points) {
    if (!std::isfinite(b.t) || !std::isfinite(b.value))
      throw ValidationError(std::string(what) + ": non-finite breakpoint");
  }
}

} // namespace

Modulus Modulus::lipschitz(double K) {
  if (!(K > 0.0) || !std::isfinite(K))
    throw ValidationError("Lipschitz modulus: K must be positive and finite");
  return Modulus(LipschitzKind{K});
}

Modulus Modulus::hoelder(double L, double alpha) {
  if (!(L > 0.0) || !std::isfinite(L))
    throw ValidationError("Hoelder modulus: L must be positive and finite");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ValidationError("Hoelder modulus: alpha must lie in (0, 1)");
  return Modulus(HoelderKind{L, alpha});
}

Modulus Modulus::sum_of_hoelder(std::vector<HoelderTerm> terms) {
  if (terms.empty())
    throw ValidationError("sum-of-Hoelder modulus: no terms");
  for (const HoelderTerm& term : terms) {
    if (!(term.L > 0.0) || !std::isfinite(term.L))
      throw ValidationError("sum-of-Hoelder modulus: L_i must be positive and finite");
    if (!(term.alpha > 0.0 && term.alpha <= 1.0))
      throw ValidationError("sum-of-Hoelder modulus: alpha_i must lie in (0, 1]");
  }
  return Modulus(SumOfHoelderKind{std::move(terms)});
}

Modulus Modulus::piecewise_linear(std::vector<Breakpoint> points) {
  check_breakpoints(points, "piecewise-linear modulus");
  if (points.front().value != 0.0)
    throw ValidationError("piecewise-linear modulus: must start at (0, 0)");
  return Modulus(PiecewiseLinearConcaveKind{std::move(points)});
}

double Modulus::value(double t) const {
  require_nonnegative(t, "omega");
  return std::visit(
      overloaded{
          [&](const LipschitzKind& k) { return k.K * t; },
          [&](const HoelderKind& k) { return k.L * std::pow(t, k.alpha); },
          [&](const SumOfHoelderKind& k) {
            double s = 0.0;
            for (const HoelderTerm& term : k.terms) s += term.L * std::pow(t, term.alpha);
            return s;
          },
          [&](const PiecewiseLinearConcaveKind& k) {
            if (t > k.points.back().t)
              throw RangeError("omega: argument beyond the last breakpoint");
            return interpolate(k.points, t);
          },
      },
      kind_);
}

double Modulus::inverse(double s) const {
  if (!(s >= 0.0)) throw DomainError("omega inverse: negative argument");
  if (s == 0.0) return 0.0;
  if (s > sup_value()) throw RangeError("omega inverse: value above the range of omega");

  if (const auto* k = std::get_if<LipschitzKind>(&kind_)) return s / k->K;
  if (const auto* k = std::get_if<HoelderKind>(&kind_))
    return std::pow(s / k->L, 1.0 / k->alpha);

  double lo = 0.0;
  double hi = 1.0;
  if (std::holds_alternative<PiecewiseLinearConcaveKind>(kind_)) {
    hi = max_argument();
  } else {
    while (value(hi) < s) {
      lo = hi;
      hi *= 2.0;
    }
  }
  while (hi - lo > kInverseTolerance) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (value(mid) < s)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double Modulus::integral(double t) const {
  require_nonnegative(t, "Omega");
  return std::visit(
      overloaded{
          [&](const LipschitzKind& k) { return 0.5 * k.K * t * t; },
          [&](const HoelderKind& k) {
            return k.L * std::pow(t, 1.0 + k.alpha) / (1.0 + k.alpha);
          },
          [&](const SumOfHoelderKind& k) {
            double s = 0.0;
            for (const HoelderTerm& term : k.terms)
              s += term.L * std::pow(t, 1.0 + term.alpha) / (1.0 + term.alpha);
            return s;
          },
          [&](const PiecewiseLinearConcaveKind& k) {
            if (t > k.points.back().t)
              throw RangeError("Omega: argument beyond the last breakpoint");
            return integrate_piecewise(k.points, t);
          },
      },
      kind_);
}

double Modulus::max_argument() const {
  if (const auto* k = std::get_if<PiecewiseLinearConcaveKind>(&kind_))
    return k->points.back().t;
  return kInf;
}

double Modulus::sup_value() const {
  if (const auto* k = std::get_if<PiecewiseLinearConcaveKind>(&kind_))
    return k->points.back().value;
  return kInf;
}

std::string Modulus::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const LipschitzKind& k) { os << "lipschitz(K=" << k.K << ")"; },
                 [&](const HoelderKind& k) {
                   os << "hoelder(L=" << k.L << ", alpha=" << k.alpha << ")";
                 },
                 [&](const SumOfHoelderKind& k) {
                   os << "sum_of_hoelder(";
                   for (std::size_t i = 0; i < k.terms.size(); ++i)
                     os << (i ? ", " : "") << k.terms[i].L << "*t^" << k.terms[i].alpha;
                   os << ")";
                 },
                 [&](const PiecewiseLinearConcaveKind& k) {
                   os << "piecewise_linear(" << k.points.size() << " breakpoints)";
                 },
             },
             kind_);
  return os.str();
}

ValidationReport validate(const Modulus& m) {
  ValidationReport report;
  auto fail = [&](std::string what, std::optional<double> at) {
    report.valid = false;
    report.first_violation = std::move(what);
    report.at = at;
    return report;
  };

  if (const auto* k = std::get_if<PiecewiseLinearConcaveKind>(&m.kind())) {
    const auto& p = k->points;
    double previous = kInf;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      double slope = (p[i + 1].value - p[i].value) / (p[i + 1].t - p[i].t);
      if (!(slope > 0.0)) return fail("monotonicity violated", p[i].t);
      if (slope > previous) return fail("concavity violated", p[i].t);
      previous = slope;
    }
  }

  if (m.value(0.0) != 0.0) return fail("omega(0) != 0", 0.0);

  double t_max = std::isfinite(m.max_argument()) ? m.max_argument() : 1e3;
  double t_min = std::isfinite(m.max_argument()) ? t_max * 1e-6 : 1e-6;
  std::vector<double> grid;
  grid.reserve(kValidationGridSize + 1);
  grid.push_back(0.0);
  double ratio = std::log(t_max / t_min);
  for (int i = 0; i < kValidationGridSize; ++i)
    grid.push_back(t_min * std::exp(ratio * i / (kValidationGridSize - 1)));
  grid.back() = t_max;

  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = m.value(grid[i]);

  double previous = kInf;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!(values[i + 1] > values[i])) return fail("monotonicity violated", grid[i]);
    double slope = (values[i + 1] - values[i]) / (grid[i + 1] - grid[i]);
    if (slope > previous * (1.0 + 1e-9)) return fail("concavity violated", grid[i]);
    previous = slope;
  }
  return report;
}

PsiRate PsiRate::zero() { return PsiRate(ZeroRate{}); }

PsiRate PsiRate::constant(double c) {
  if (!(c >= 0.0) || !std::isfinite(c))
    throw ValidationError("constant psi: c must be nonnegative and finite");
  return PsiRate(ConstantRate{c});
}

PsiRate PsiRate::piecewise_linear(std::vector<Breakpoint> points) {
  check_breakpoints(points, "piecewise-linear psi");
  if (points.front().value < 0.0)
    throw ValidationError("piecewise-linear psi: psi(0) must be nonnegative");
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (points[i + 1].value < points[i].value)
      throw ValidationError("piecewise-linear psi: values must be nondecreasing");
  }
  return PsiRate(PiecewiseLinearRate{std::move(points)});
}

double PsiRate::value(double t) const {
  require_nonnegative(t, "psi");
  return std::visit(overloaded{
                        [](const ZeroRate&) { return 0.0; },
                        [](const ConstantRate& k) { return k.c; },
                        [&](const PiecewiseLinearRate& k) {
                          if (t >= k.points.back().t) return k.points.back().value;
                          return interpolate(k.points, t);
                        },
                    },
                    kind_);
}

double PsiRate::integral(double t) const {
  require_nonnegative(t, "Psi");
  return std::visit(overloaded{
                        [](const ZeroRate&) { return 0.0; },
                        [&](const ConstantRate& k) { return k.c * t; },
                        [&](const PiecewiseLinearRate& k) {
                          const Breakpoint& last = k.points.back();
                          if (t <= last.t) return integrate_piecewise(k.points, t);
                          return integrate_piecewise(k.points, last.t) + last.value * (t - last.t);
                        },
                    },
                    kind_);
}

bool PsiRate::is_zero() const {
  if (std::holds_alternative<ZeroRate>(kind_)) return true;
  if (const auto* k = std::get_if<ConstantRate>(&kind_)) return k->c == 0.0;
  return false;
}

std::string PsiRate::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const ZeroRate&) { os << "zero"; },
                 [&](const ConstantRate& k) { os << "constant(c=" << k.c << ")"; },
                 [&](const PiecewiseLinearRate& k) {
                   os << "piecewise_linear(" << k.points.size() << " breakpoints)";
                 },
             },
             kind_);
  return os.str();
}

} // namespace nkcert
