#include <doctest.h>

#include <cmath>

#include "nkcert/audit.hpp"
#include "nkcert/errors.hpp"
#include "nkcert/problems.hpp"

using namespace nkcert;

TEST_CASE("sampler is deterministic and stays in the ball") {
  BallSampler a(123, NormKind::Euclidean);
  BallSampler b(123, NormKind::Euclidean);
  Vector c = Vector::Constant(3, 1.0);
  for (int i = 0; i < 500; ++i) {
    Vector p = a.point(c, 0.7);
    Vector q = b.point(c, 0.7);
    CHECK(p == q);
    CHECK((p - c).norm() <= 0.7);
  }
  BallSampler m(5, NormKind::MaxAbs);
  for (int i = 0; i < 200; ++i) {
    double u = m.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK((m.point(c, 0.3) - c).lpNorm<Eigen::Infinity>() <= 0.3);
  }
}

TEST_CASE("correct declarations survive sampling") {
  for (const char* name : {"scalar_sqrt2_smooth", "scalar_sqrt2_kink", "system_2d_kink",
                           "hoelder_scalar", "linear_nd"}) {
    CAPTURE(name);
    PreconditionedProblem pp = precondition(corpus_get(name));
    const Problem& p = pp.base();
    CHECK(check_regular_smoothness(pp, p.modulus, p.h, 2000).passed());
    CHECK(check_norm_variation(pp, p.modulus, p.h, 2000).passed());
    CHECK(check_psi_condition(pp, p.psi, 2000).passed());
  }
}

TEST_CASE("understated moduli are falsified") {
  PreconditionedProblem smooth = precondition(corpus_get("scalar_sqrt2_smooth"));
  auto r = check_regular_smoothness(smooth, Modulus::lipschitz(0.4), 0.0, 2000);
  CHECK(r.violation_count > 0);
  CHECK(r.max_deficit > 0.0);
  CHECK(r.violations.size() <= kMaxRecordedViolations);

  PreconditionedProblem kink = precondition(corpus_get("scalar_sqrt2_kink"));
  CHECK_FALSE(check_psi_condition(kink, PsiRate::constant(0.02), 2000).passed());
}

TEST_CASE("declared h above inf ||F'|| is reported") {
  PreconditionedProblem pp = precondition(corpus_get("scalar_sqrt2_smooth"));
  // inf F' over B(1.25, 0.5) is 0.75 / 1.25 = 0.6.
  auto r = check_regular_smoothness(pp, pp.base().modulus, 0.7, 2000);
  CHECK(r.h_exceeded_count > 0);
  CHECK_FALSE(r.passed());
}

TEST_CASE("zero samples skip the sampled checks") {
  PreconditionedProblem pp = precondition(corpus_get("scalar_sqrt2_smooth"));
  CHECK(check_regular_smoothness(pp, pp.base().modulus, 0.0, 0).skipped);
}

TEST_CASE("residual and error audits on a certified run") {
  auto entry = corpus_entry("scalar_sqrt2_kink");
  PreconditionedProblem pp = precondition(entry.problem);
  SolveResult r = solve_certified(pp);
  REQUIRE(r.status == SolveStatus::Converged);

  ResidualAuditReport res = audit_residual_estimate(pp, r);
  CHECK(res.passed());
  CHECK(res.measured.size() == r.steps.size());

  Vector root = oracle_solution(pp, 1e-14, entry.bracket);
  CHECK(std::abs(root(0) * root(0) - 2.0 + 0.1 * std::abs(root(0) - 1.5)) < 1e-14);
  ErrorBoundReport eb = audit_error_bound(pp, r, root);
  CHECK(eb.passed());
  CHECK(eb.error.size() == r.steps.size() + 1);
}

TEST_CASE("oracle refuses a bracket without a sign change") {
  PreconditionedProblem pp = precondition(corpus_get("scalar_sqrt2_smooth"));
  CHECK_THROWS_AS(oracle_solution(pp, 1e-14, std::make_pair(1.5, 1.7)), OracleUnavailable);
}
