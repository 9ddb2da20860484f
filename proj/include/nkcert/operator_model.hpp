#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "nkcert/moduli.hpp"

namespace nkcert {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

using VectorField = std::function<Vector(const Vector&)>;
using JacobianField = std::function<Matrix(const Vector&)>;

enum class NormKind { Euclidean, MaxAbs };

std::string to_string(NormKind kind);
NormKind norm_from_string(const std::string& name);

double vector_norm(const Vector& v, NormKind kind);

/// Induced operator norm: largest singular value (Euclidean) or max absolute
/// row sum (MaxAbs).
double operator_norm(const Matrix& m, NormKind kind);

/// Dense LU with partial pivoting that refuses numerically singular input
/// (smallest pivot below 1e-14 times the max-row-sum norm).
class LuFactorization {
public:
  explicit LuFactorization(const Matrix& m);

  Vector solve(const Vector& rhs) const;
  Matrix solve(const Matrix& rhs) const;
  Matrix inverse() const;
  Eigen::Index dim() const { return lu_.rows(); }

private:
  Eigen::PartialPivLU<Matrix> lu_;
};

Vector linear_solve(const Matrix& m, const Vector& rhs);

/// Central differences with step 1e-6 (1 + |x|). Exploration only: problems
/// built on it are excluded from certified runs.
Matrix finite_difference_jacobian(const VectorField& f, const Vector& x);

/// f(x) + g(x) = 0 on the closed ball D = B(x0, radius).
struct Problem {
  std::string name;
  Vector x0;
  double radius = 1.0;
  VectorField f;
  VectorField g;                       // empty means g = 0
  std::optional<JacobianField> jacobian;  // empty selects finite differences
  Modulus modulus = Modulus::lipschitz(1.0);
  PsiRate psi = PsiRate::zero();
  double h = 0.0;
  NormKind norm = NormKind::Euclidean;

  Eigen::Index dim() const { return x0.size(); }
};

bool in_domain(const Problem& p, const Vector& x);

/// Problem rescaled by A0 = f'(x0) so that F'(x0) = I:
///   F = A0^-1 f,  G = A0^-1 g,  F' = A0^-1 f'.
/// Evaluating outside the domain ball throws DomainError.
class PreconditionedProblem {
public:
  const Problem& base() const { return base_; }
  NormKind norm() const { return base_.norm; }
  Eigen::Index dim() const { return base_.dim(); }
  const Vector& x0() const { return base_.x0; }
  double radius() const { return base_.radius; }
  bool exact_jacobian() const { return base_.jacobian.has_value(); }

  Vector F(const Vector& x) const;
  Vector G(const Vector& x) const;
  Matrix jacobian(const Vector& x) const;
  /// F(x) + G(x)
  Vector residual(const Vector& x) const;
  double norm_of(const Vector& v) const { return vector_norm(v, base_.norm); }

  /// ||F(x0) + G(x0)|| (1 + 1e-12), an upper bound rather than the value itself.
  double a() const { return a_; }
  const Matrix& a0() const { return a0_; }

  friend PreconditionedProblem precondition(Problem p);

private:
  PreconditionedProblem(Problem p, Matrix a0);
  void require_domain(const Vector& x) const;

  Problem base_;
  Matrix a0_;
  LuFactorization factor_;
  double a_ = 0.0;
};

/// Throws SetupError("Jacobian at x0 singular") when A0 cannot be factored.
PreconditionedProblem precondition(Problem p);

inline constexpr double kResidualSafetyFactor = 1.0 + 1e-12;

} // namespace nkcert
