#include "nkcert/operator_model.hpp"

#include <cmath>

#include <fmt/format.h>

#include "nkcert/errors.hpp"

namespace nkcert {

std::string to_string(NormKind kind) {
  return kind == NormKind::Euclidean ? "euclidean" : "maxabs";
}

NormKind norm_from_string(const std::string& name) {
  if (name == "euclidean") return NormKind::Euclidean;
  if (name == "maxabs") return NormKind::MaxAbs;
  throw ValidationError("unknown norm '" + name + "' (expected euclidean or maxabs)");
}

double vector_norm(const Vector& v, NormKind kind) {
  if (v.size() == 0) return 0.0;
  return kind == NormKind::Euclidean ? v.norm() : v.cwiseAbs().maxCoeff();
}

double operator_norm(const Matrix& m, NormKind kind) {
  if (m.size() == 0) return 0.0;
  if (kind == NormKind::MaxAbs) return m.cwiseAbs().rowwise().sum().maxCoeff();
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

LuFactorization::LuFactorization(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw ValidationError("linear solve: matrix must be square and nonempty");
  if (!m.allFinite()) throw SingularMatrixError("linear solve: matrix has non-finite entries");
  lu_.compute(m);
  const double scale = operator_norm(m, NormKind::MaxAbs);
  const double smallest = lu_.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(smallest >= 1e-14 * scale) || scale == 0.0)
    throw SingularMatrixError(
        fmt::format("linear solve: numerically singular matrix (pivot {:.3g}, norm {:.3g})",
                    smallest, scale));
}

Vector LuFactorization::solve(const Vector& rhs) const {
  if (rhs.size() != lu_.rows()) throw ValidationError("linear solve: dimension mismatch");
  return lu_.solve(rhs);
}

Matrix LuFactorization::solve(const Matrix& rhs) const {
  if (rhs.rows() != lu_.rows()) throw ValidationError("linear solve: dimension mismatch");
  return lu_.solve(rhs);
}

Matrix LuFactorization::inverse() const { return lu_.inverse(); }

Vector linear_solve(const Matrix& m, const Vector& rhs) { return LuFactorization(m).solve(rhs); }

Matrix finite_difference_jacobian(const VectorField& f, const Vector& x) {
  const double step = 1e-6 * (1.0 + x.norm());
  Vector fx = f(x);
  Matrix j(fx.size(), x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Vector xp = x;
    Vector xm = x;
    xp(k) += step;
    xm(k) -= step;
    j.col(k) = (f(xp) - f(xm)) / (2.0 * step);
  }
  return j;
}

bool in_domain(const Problem& p, const Vector& x) {
  return vector_norm(x - p.x0, p.norm) <= p.radius;
}

PreconditionedProblem::PreconditionedProblem(Problem p, Matrix a0)
    : base_(std::move(p)), a0_(std::move(a0)), factor_(a0_) {
  a_ = norm_of(residual(base_.x0)) * kResidualSafetyFactor;
}

void PreconditionedProblem::require_domain(const Vector& x) const {
  if (x.size() != dim()) throw ValidationError("evaluation point has wrong dimension");
  if (!in_domain(base_, x))
    throw DomainError(fmt::format("point outside the domain ball of radius {:.17g}", radius()));
}

Vector PreconditionedProblem::F(const Vector& x) const {
  require_domain(x);
  return factor_.solve(base_.f(x));
}

Vector PreconditionedProblem::G(const Vector& x) const {
  require_domain(x);
  if (!base_.g) return Vector::Zero(dim());
  return factor_.solve(base_.g(x));
}

Matrix PreconditionedProblem::jacobian(const Vector& x) const {
  require_domain(x);
  Matrix j = base_.jacobian ? (*base_.jacobian)(x) : finite_difference_jacobian(base_.f, x);
  return factor_.solve(j);
}

Vector PreconditionedProblem::residual(const Vector& x) const {
  require_domain(x);
  Vector r = base_.f(x);
  if (base_.g) r += base_.g(x);
  return factor_.solve(r);
}

PreconditionedProblem precondition(Problem p) {
  if (p.x0.size() == 0) throw SetupError("problem has dimension zero");
  if (!(p.radius > 0.0)) throw SetupError("domain radius must be positive");
  Matrix a0 = p.jacobian ? (*p.jacobian)(p.x0) : finite_difference_jacobian(p.f, p.x0);
  if (a0.rows() != p.dim() || a0.cols() != p.dim())
    throw SetupError("Jacobian at x0 has the wrong shape");
  try {
    return PreconditionedProblem(std::move(p), std::move(a0));
  } catch (const SingularMatrixError&) {
    throw SetupError("Jacobian at x0 singular");
  }
}

} // namespace nkcert
