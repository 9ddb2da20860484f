#include "nkcert/problems.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "nkcert/errors.hpp"

namespace nkcert {

namespace {

class Params {
public:
  Params(std::string_view problem, const Overrides& overrides,
         std::vector<std::string> problem_keys)
      : problem_(problem), overrides_(overrides) {
    static const std::set<std::string, std::less<>> kModulusKeys = {"K", "L", "alpha", "psi",
                                                                    "h"};
    for (const auto& [key, value] : overrides) {
      bool known = kModulusKeys.contains(key) ||
                   std::find(problem_keys.begin(), problem_keys.end(), key) != problem_keys.end();
      if (!known)
        throw ValidationError(
            fmt::format("unknown override key '{}' for problem {}", key, problem_));
      if (!std::isfinite(value))
        throw ValidationError(fmt::format("override {} must be finite", key));
    }
  }

  double get(std::string_view key, double fallback) const {
    auto it = overrides_.find(key);
    return it == overrides_.end() ? fallback : it->second;
  }
  std::optional<double> find(std::string_view key) const {
    auto it = overrides_.find(key);
    if (it == overrides_.end()) return std::nullopt;
    return it->second;
  }

  void require(bool ok, std::string_view check) const {
    if (!ok) throw ValidationError(fmt::format("{}: {}", problem_, check));
  }

  // Apply K / L / alpha / psi / h on top of the declared moduli.
  void apply_modulus_overrides(Problem& p) const {
    if (auto k = find("K")) p.modulus = Modulus::lipschitz(*k);
    auto l = find("L");
    auto alpha = find("alpha");
    if (l || alpha) {
      double base_l = 1.0;
      double base_alpha = 0.5;
      if (const auto* hk = std::get_if<HoelderKind>(&p.modulus.kind())) {
        base_l = hk->L;
        base_alpha = hk->alpha;
      }
      p.modulus = Modulus::hoelder(l.value_or(base_l), alpha.value_or(base_alpha));
    }
    if (auto psi = find("psi")) p.psi = PsiRate::constant(*psi);
    if (auto h = find("h")) {
      require(*h >= 0.0 && *h < 1.0, "h must lie in [0, 1)");
      p.h = *h;
    }
    ValidationReport report = validate(p.modulus);
    require(report.valid, "declared modulus invalid: " + report.first_violation);
  }

private:
  std::string problem_;
  const Overrides& overrides_;
};

Vector scalar(double v) { return Vector::Constant(1, v); }

std::optional<std::pair<double, double>> clip(double lo, double hi, double x0, double r) {
  double a = std::max(lo, x0 - r);
  double b = std::min(hi, x0 + r);
  if (!(a < b)) return std::nullopt;
  return std::make_pair(a, b);
}

CorpusEntry sqrt2(std::string_view name, const Overrides& overrides, NormKind norm, bool kink) {
  std::vector<std::string> keys = {"x0", "R"};
  if (kink) keys.insert(keys.end(), {"c", "d"});
  Params params(name, overrides, keys);
  const double x0 = params.get("x0", 1.25);
  const double r = params.get("R", 0.5);
  const double c = params.get("c", 0.1);
  const double d = params.get("d", 1.5);
  params.require(r > 0.0, "R must be positive");
  params.require(x0 != 0.0, "x0 = 0 makes the Jacobian at x0 singular");
  params.require(c >= 0.0, "c must be nonnegative");

  CorpusEntry e;
  e.name = std::string(name);
  Problem& p = e.problem;
  p.name = e.name;
  p.x0 = scalar(x0);
  p.radius = r;
  p.norm = norm;
  p.f = [](const Vector& x) { return scalar(x(0) * x(0) - 2.0); };
  p.jacobian = [](const Vector& x) { return Matrix::Constant(1, 1, 2.0 * x(0)); };
  // F' = x / x0, so F' is Lipschitz with K = 1 / |x0|.
  p.modulus = Modulus::lipschitz(1.0 / std::abs(x0));
  p.h = 0.0;
  if (kink) {
    p.g = [c, d](const Vector& x) { return scalar(c * std::abs(x(0) - d)); };
    // G = c |x - d| / (2 x0) is Lipschitz with constant c / (2 |x0|).
    p.psi = PsiRate::constant(c / (2.0 * std::abs(x0)));
    e.notes = "K = 1/|x0| from F'' = 1/x0; psi = c/(2|x0|) from the kink";
  } else {
    p.psi = PsiRate::zero();
    e.notes = "K = 1/|x0| from F'' = 1/x0";
  }
  params.apply_modulus_overrides(p);
  e.bracket = clip(1.0, 2.0, x0, r);
  return e;
}

CorpusEntry linear_nd(const Overrides& overrides, NormKind norm) {
  Params params("linear_nd", overrides, {"dim", "x0", "R"});
  const double dim_value = params.get("dim", 3.0);
  params.require(dim_value >= 1.0 && dim_value <= 8.0 && dim_value == std::floor(dim_value),
                 "dim must be an integer in [1, 8]");
  const auto dim = static_cast<Eigen::Index>(dim_value);
  const double x0 = params.get("x0", 0.0);
  const double r = params.get("R", 1.0);
  params.require(r > 0.0, "R must be positive");

  Matrix a = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    a(i, i) = 4.0;
    if (i > 0) a(i, i - 1) = -1.0;
    if (i + 1 < dim) a(i, i + 1) = -1.0;
  }
  Vector solution(dim);
  for (Eigen::Index i = 0; i < dim; ++i) solution(i) = (i % 2 == 0) ? 0.1 : -0.1;
  Vector b = a * solution;

  CorpusEntry e;
  e.name = "linear_nd";
  e.notes = "affine f: F' = I everywhere, so any modulus holds; Lipschitz(1) declared";
  Problem& p = e.problem;
  p.name = e.name;
  p.x0 = Vector::Constant(dim, x0);
  p.radius = r;
  p.norm = norm;
  p.f = [a, b](const Vector& x) -> Vector { return a * x - b; };
  p.jacobian = [a](const Vector&) { return a; };
  p.modulus = Modulus::lipschitz(1.0);
  p.psi = PsiRate::zero();
  params.apply_modulus_overrides(p);
  return e;
}

CorpusEntry hoelder_scalar(const Overrides& overrides, NormKind norm) {
  Params params("hoelder_scalar", overrides, {"beta", "b", "x0", "R"});
  const double beta = params.get("beta", 0.2);
  const double shift = params.get("b", 0.05);
  const double x0 = params.get("x0", 1.0);
  const double r = params.get("R", 1.05);
  params.require(beta > 0.0, "beta must be positive");
  params.require(r > 0.0, "R must be positive");
  params.require(x0 != 0.0, "x0 = 0 forces h = 1");

  // f(x) = x + beta x |x|^(1/2) - b,  f'(x) = 1 + (3 beta / 2) |x|^(1/2).
  // With A0 = f'(x0): F' = (1 + 1.5 beta sqrt|x|) / A0 has the Hoelder(1/2)
  // modulus L = 1.5 beta / A0 and inf F' = 1 / A0 at x = 0. Declaring h = 1/A0
  // gives xi(x', x'') = min(|x'|, |x''|), under which the regular smoothness
  // inequality reduces to |sqrt|x''| - sqrt|x'|| <= sqrt(min + s) - sqrt(min).
  const double a0 = 1.0 + 1.5 * beta * std::sqrt(std::abs(x0));

  CorpusEntry e;
  e.name = "hoelder_scalar";
  e.notes = "omega = Hoelder(1.5 beta / A0, 1/2) and h = 1/A0 = inf F' on any ball";
  Problem& p = e.problem;
  p.name = e.name;
  p.x0 = scalar(x0);
  p.radius = r;
  p.norm = norm;
  p.f = [beta, shift](const Vector& x) {
    double v = x(0);
    return scalar(v + beta * v * std::sqrt(std::abs(v)) - shift);
  };
  p.jacobian = [beta](const Vector& x) {
    return Matrix::Constant(1, 1, 1.0 + 1.5 * beta * std::sqrt(std::abs(x(0))));
  };
  p.modulus = Modulus::hoelder(1.5 * beta / a0, 0.5);
  p.psi = PsiRate::zero();
  p.h = 1.0 / a0;
  params.apply_modulus_overrides(p);
  e.bracket = std::make_pair(x0 - r, x0 + r);
  return e;
}

CorpusEntry system_2d_kink(const Overrides& overrides, NormKind norm) {
  Params params("system_2d_kink", overrides, {"c", "d1", "d2", "x0", "R"});
  const double c = params.get("c", 0.05);
  const double d1 = params.get("d1", 1.05);
  const double d2 = params.get("d2", 0.95);
  const double x0 = params.get("x0", 1.1);
  const double r = params.get("R", 0.5);
  params.require(c >= 0.0, "c must be nonnegative");
  params.require(r > 0.0, "R must be positive");

  // f(x, y) = (x^2 + y - 2, x + y^2 - 2), g = c (|x - d1|, |y - d2|).
  auto jac = [](const Vector& x) {
    Matrix j(2, 2);
    j << 2.0 * x(0), 1.0, 1.0, 2.0 * x(1);
    return j;
  };
  Vector start = Vector::Constant(2, x0);
  Matrix a0 = jac(start);
  params.require(std::abs(a0.determinant()) > 1e-12, "Jacobian at x0 singular");
  const double inv_norm = operator_norm(a0.inverse(), norm);

  CorpusEntry e;
  e.name = "system_2d_kink";
  e.notes =
      "f' differences are diag(2 dx, 2 dy): K = 2 ||A0^-1||; componentwise |.| is "
      "1-Lipschitz: psi = c ||A0^-1||";
  Problem& p = e.problem;
  p.name = e.name;
  p.x0 = start;
  p.radius = r;
  p.norm = norm;
  p.f = [](const Vector& x) {
    Vector v(2);
    v << x(0) * x(0) + x(1) - 2.0, x(0) + x(1) * x(1) - 2.0;
    return v;
  };
  p.g = [c, d1, d2](const Vector& x) {
    Vector v(2);
    v << c * std::abs(x(0) - d1), c * std::abs(x(1) - d2);
    return v;
  };
  p.jacobian = jac;
  p.modulus = Modulus::lipschitz(2.0 * inv_norm);
  p.psi = PsiRate::constant(c * inv_norm);
  params.apply_modulus_overrides(p);
  return e;
}

} // namespace

std::vector<CorpusDescriptor> corpus_list() {
  return {
      {"scalar_sqrt2_smooth", "f(x) = x^2 - 2, g = 0; Lipschitz modulus", {"x0", "R"}},
      {"scalar_sqrt2_kink",
       "f(x) = x^2 - 2, g(x) = c |x - d|; Lipschitz modulus, constant psi",
       {"x0", "R", "c", "d"}},
      {"linear_nd", "f(x) = A x - b (tridiagonal A), g = 0, dim <= 8", {"dim", "x0", "R"}},
      {"hoelder_scalar",
       "f(x) = x + beta x |x|^(1/2) - b, g = 0; Hoelder(1/2) modulus with h > 0",
       {"beta", "b", "x0", "R"}},
      {"system_2d_kink", "2-d quadratic system with componentwise |.| term",
       {"c", "d1", "d2", "x0", "R"}},
  };
}

CorpusEntry corpus_entry(std::string_view name, const Overrides& overrides, NormKind norm) {
  if (name == "scalar_sqrt2_smooth") return sqrt2(name, overrides, norm, false);
  if (name == "scalar_sqrt2_kink") return sqrt2(name, overrides, norm, true);
  if (name == "linear_nd") return linear_nd(overrides, norm);
  if (name == "hoelder_scalar") return hoelder_scalar(overrides, norm);
  if (name == "system_2d_kink") return system_2d_kink(overrides, norm);
  throw ValidationError(fmt::format("unknown corpus problem '{}'", name));
}

} // namespace nkcert
