#pragma once

// Smoothness moduli omega (continuous, strictly increasing, concave,
// omega(0) = 0) and the Lipschitz rates psi of the nondifferentiable part.
// Every kind carries a consistent (omega, Omega, omega^-1) triple so that the
// majorant engine never mixes an exact value with an approximate inverse.

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace nkcert {

struct Breakpoint {
  double t;
  double value;
};

struct HoelderTerm {
  double L;
  double alpha;
};

struct LipschitzKind {
  double K;
};

struct HoelderKind {
  double L;
  double alpha;
};

struct SumOfHoelderKind {
  std::vector<HoelderTerm> terms;
};

/// Defined on [0, points.back().t]; evaluation past the last breakpoint is a
/// range error.
struct PiecewiseLinearConcaveKind {
  std::vector<Breakpoint> points;
};

class Modulus {
public:
  using Kind = std::variant<LipschitzKind, HoelderKind, SumOfHoelderKind,
                            PiecewiseLinearConcaveKind>;

  /// omega(t) = K t, K > 0.
  static Modulus lipschitz(double K);
  /// omega(t) = L t^alpha with alpha strictly inside (0, 1).
  static Modulus hoelder(double L, double alpha);
  /// omega(t) = sum L_i t^alpha_i with alpha_i in (0, 1].
  static Modulus sum_of_hoelder(std::vector<HoelderTerm> terms);
  /// Linear interpolation through the breakpoints; must start at (0, 0) with
  /// strictly increasing abscissae. Monotonicity and concavity are checked by
  /// validate(), not here.
  static Modulus piecewise_linear(std::vector<Breakpoint> points);

  double value(double t) const;
  double operator()(double t) const { return value(t); }

  /// t with omega(t) = s. Closed form for Lipschitz and Hoelder, bisection to
  /// absolute width kInverseTolerance otherwise.
  double inverse(double s) const;

  /// Omega(t) = integral of omega over [0, t].
  double integral(double t) const;

  /// Largest admissible argument (+inf for the power-law kinds).
  double max_argument() const;
  /// Supremum of omega over its admissible arguments.
  double sup_value() const;

  const Kind& kind() const { return kind_; }
  std::string describe() const;

  static constexpr double kInverseTolerance = 1e-14;

private:
  explicit Modulus(Kind kind) : kind_(std::move(kind)) {}

  Kind kind_;
};

struct ValidationReport {
  bool valid = true;
  std::string first_violation;
  std::optional<double> at;
};

/// Structural checks plus monotonicity, concavity and omega(0) = 0 on a
/// deterministic geometric grid of kValidationGridSize points.
ValidationReport validate(const Modulus& m);

inline constexpr int kValidationGridSize = 1024;

struct ZeroRate {};

struct ConstantRate {
  double c;
};

/// Linear through the breakpoints, constant after the last one.
struct PiecewiseLinearRate {
  std::vector<Breakpoint> points;
};

/// Nondecreasing, nonnegative psi together with Psi(t) = integral of psi on
/// [0, t]. All constructors reject rates that violate these properties.
class PsiRate {
public:
  using Kind = std::variant<ZeroRate, ConstantRate, PiecewiseLinearRate>;

  static PsiRate zero();
  static PsiRate constant(double c);
  static PsiRate piecewise_linear(std::vector<Breakpoint> points);

  double value(double t) const;
  double operator()(double t) const { return value(t); }
  double integral(double t) const;

  bool is_zero() const;
  const Kind& kind() const { return kind_; }
  std::string describe() const;

private:
  explicit PsiRate(Kind kind) : kind_(std::move(kind)) {}

  Kind kind_;
};

} // namespace nkcert
