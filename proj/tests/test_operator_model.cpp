#include <doctest.h>

#include "nkcert/errors.hpp"
#include "nkcert/operator_model.hpp"

using namespace nkcert;

TEST_CASE("vector and operator norms") {
  Vector v(3);
  v << 3.0, -4.0, 0.0;
  CHECK(vector_norm(v, NormKind::Euclidean) == doctest::Approx(5.0));
  CHECK(vector_norm(v, NormKind::MaxAbs) == doctest::Approx(4.0));

  Matrix m(2, 2);
  m << 1.0, -2.0, 3.0, 4.0;
  CHECK(operator_norm(m, NormKind::MaxAbs) == doctest::Approx(7.0));
  // sigma_max^2 is the top eigenvalue of m^T m = [[10, 10], [10, 20]].
  CHECK(operator_norm(m, NormKind::Euclidean) ==
        doctest::Approx(std::sqrt(15.0 + std::sqrt(125.0))).epsilon(1e-13));
  CHECK(operator_norm(Matrix::Constant(1, 1, -2.5), NormKind::Euclidean) == 2.5);
}

TEST_CASE("norm names round trip") {
  CHECK(norm_from_string("euclidean") == NormKind::Euclidean);
  CHECK(norm_from_string(to_string(NormKind::MaxAbs)) == NormKind::MaxAbs);
  CHECK_THROWS_AS(norm_from_string("l1"), ValidationError);
}

TEST_CASE("LU solves and refuses singular matrices") {
  Matrix m(3, 3);
  m << 4, -1, 0, -1, 4, -1, 0, -1, 4;
  Vector x(3);
  x << 1.0, -2.0, 0.5;
  Vector b = m * x;
  LuFactorization lu(m);
  CHECK((lu.solve(b) - x).norm() < 1e-14);
  CHECK((lu.inverse() * m - Matrix::Identity(3, 3)).norm() < 1e-14);
  CHECK((linear_solve(m, b) - x).norm() < 1e-14);

  Matrix s(2, 2);
  s << 1.0, 2.0, 2.0, 4.0;
  CHECK_THROWS_AS(LuFactorization{s}, SingularMatrixError);
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(LuFactorization{bad}, SingularMatrixError);
}

TEST_CASE("finite differences approximate the Jacobian") {
  VectorField f = [](const Vector& x) {
    Vector y(2);
    y << x(0) * x(0) * x(1), std::sin(x(0)) + x(1);
    return y;
  };
  Vector x(2);
  x << 0.7, -1.3;
  Matrix exact(2, 2);
  exact << 2 * x(0) * x(1), x(0) * x(0), std::cos(x(0)), 1.0;
  CHECK((finite_difference_jacobian(f, x) - exact).norm() < 1e-8);
}

namespace {

Problem quadratic() {
  Problem p;
  p.name = "q";
  p.x0 = Vector::Constant(1, 2.0);
  p.radius = 0.5;
  p.f = [](const Vector& x) { return Vector::Constant(1, x(0) * x(0) - 2.0); };
  p.jacobian = [](const Vector& x) { return Matrix::Constant(1, 1, 2.0 * x(0)); };
  p.g = [](const Vector& x) { return Vector::Constant(1, 0.1 * std::abs(x(0) - 1.8)); };
  return p;
}

} // namespace

TEST_CASE("preconditioning normalizes F'(x0) and scales g") {
  PreconditionedProblem pp = precondition(quadratic());
  CHECK(pp.jacobian(pp.x0())(0, 0) == doctest::Approx(1.0));
  Vector x = Vector::Constant(1, 2.2);
  CHECK(pp.F(x)(0) == doctest::Approx((2.2 * 2.2 - 2.0) / 4.0));
  CHECK(pp.G(x)(0) == doctest::Approx(0.1 * 0.4 / 4.0));
  CHECK(pp.residual(x)(0) == doctest::Approx(pp.F(x)(0) + pp.G(x)(0)));
  double raw = std::abs((4.0 - 2.0 + 0.1 * 0.2) / 4.0);
  CHECK(pp.a() >= raw);
  CHECK(pp.a() == doctest::Approx(raw).epsilon(1e-11));
  CHECK(pp.exact_jacobian());
}

TEST_CASE("evaluation outside the ball throws") {
  PreconditionedProblem pp = precondition(quadratic());
  CHECK(in_domain(pp.base(), Vector::Constant(1, 2.5)));
  CHECK_FALSE(in_domain(pp.base(), Vector::Constant(1, 2.51)));
  CHECK_THROWS_AS(pp.F(Vector::Constant(1, 3.0)), DomainError);
  CHECK_THROWS_AS(pp.jacobian(Vector::Constant(1, 1.0)), DomainError);
}

TEST_CASE("singular Jacobian at x0 is a setup error") {
  Problem p = quadratic();
  p.x0 = Vector::Constant(1, 0.0);
  CHECK_THROWS_AS(precondition(p), SetupError);
}

TEST_CASE("missing Jacobian falls back to finite differences") {
  Problem p = quadratic();
  p.jacobian.reset();
  PreconditionedProblem pp = precondition(p);
  CHECK_FALSE(pp.exact_jacobian());
  CHECK(pp.jacobian(Vector::Constant(1, 2.3))(0, 0) == doctest::Approx(2.3 / 2.0).epsilon(1e-8));
}
