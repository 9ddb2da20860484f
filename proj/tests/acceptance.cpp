// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "nkcert/audit.hpp"
#include "nkcert/cli.hpp"
#include "nkcert/majorant.hpp"
#include "nkcert/problems.hpp"
#include "nkcert/solver.hpp"
#include "oracles.hpp"

using namespace nkcert;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("FAILED: " + what);
    }
  }
  void note(const std::string& s) { notes.push_back(s); }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// 1. Lipschitz omega, h = 0, psi = 0 reduces to the Kantorovich quadratic.
Outcome kantorovich_reduction() {
  Outcome o;
  auto start = Clock::now();
  int compared = 0;
  for (double K : {0.5, 1.0, 2.0, 4.0}) {
    for (double a : {0.05, 0.1, 0.2, 0.4 / K * 0.999}) {
      auto cfg = MajorantConfig::make(a, 0.0, Modulus::lipschitz(K), PsiRate::zero());
      Certificate c = check_conditions(cfg, 1e9);
      if (2.0 * K * a > 1.0) {
        // Outside the Kantorovich regime the closed form is complex; the
        // certificate must fail rather than report a root.
        o.require(!c.certified(), fmt::format("K={} a={} (2Ka > 1) certified", K, a));
        o.note(fmt::format("K={} a={}: 2Ka = {} > 1, closed form undefined, certificate fails",
                           K, a, 2 * K * a));
        continue;
      }
      double closed = (1.0 - std::sqrt(1.0 - 2.0 * K * a)) / K;
      double stable = oracle::kantorovich_t_star(K, a);
      double t_star = find_t_star(cfg);
      double rel = std::abs(t_star - stable) / stable;
      o.require(c.certified(), fmt::format("K={} a={} not certified", K, a));
      o.require(rel <= 1e-12, fmt::format("K={} a={}: rel error {:.3e}", K, a, rel));
      o.require(std::abs(closed - stable) <= 1e-12 * stable, "closed forms disagree");
      MajorantTrace tr = run_majorant(cfg, 1e-12, 500);
      o.require(tr.converged, fmt::format("K={} a={}: trace not converged", K, a));
      o.require(std::abs(tr.t_star - t_star) <= 1e-10,
                fmt::format("K={} a={}: trace limit off by {:.3e}", K, a,
                            std::abs(tr.t_star - t_star)));
      ++compared;
    }
  }
  double elapsed = seconds_since(start);
  o.require(elapsed < 1.0, fmt::format("runtime {:.3f} s", elapsed));
  o.note(fmt::format("{} grid points compared, runtime {:.4f} s", compared, elapsed));
  return o;
}

// 2. Twenty passing configurations across moduli, h and psi.
Outcome majorant_sequence_suite() {
  Outcome o;
  const double hs[] = {0.0, 0.1, 0.3};
  int built = 0;
  double worst_identity = 0.0;
  std::size_t most_iterations = 0;
  for (int i = 0; i < 20; ++i) {
    double h = hs[i % 3];
    Modulus m = (i % 2 == 0) ? Modulus::lipschitz(0.5 + 0.25 * i)
                             : Modulus::hoelder(0.4 + 0.15 * i, 0.3 + 0.03 * i);
    PsiRate psi = ((i / 3) % 2 == 0) ? PsiRate::zero() : PsiRate::constant(0.02 + 0.01 * (i % 4));
    double crit = MajorantConfig::make(1e-3, h, m, psi).critical_value();
    if (!(crit > 0.0)) {
      o.require(false, fmt::format("config {}: no admissible a", i));
      continue;
    }
    double a = crit * (0.15 + 0.04 * i);
    auto cfg = MajorantConfig::make(a, h, m, psi);
    Certificate c = check_conditions(cfg, 1e9);
    o.require(c.certified(), fmt::format("config {} not certified", i));
    if (!c.certified()) continue;
    ++built;
    MajorantTrace tr = run_majorant(cfg, 1e-12, 500);
    o.require(tr.converged && tr.iterations <= 500,
              fmt::format("config {}: not converged in 500 iterations", i));
    most_iterations = std::max(most_iterations, tr.iterations);
    for (std::size_t n = 0; n + 1 < tr.t.size(); ++n) {
      o.require(tr.t[n + 1] <= c.t_star + 1e-12,
                fmt::format("config {}: t_{} above t*", i, n + 1));
      if (tr.delta(n) >= 1e-12)
        o.require(tr.t[n + 1] > tr.t[n], fmt::format("config {}: not increasing at {}", i, n));
    }
    IdentityReport id = residual_identity_check(cfg, tr, 1e-10);
    o.require(id.ok, fmt::format("config {}: identity deviation {:.3e}", i, id.worst));
    worst_identity = std::max(worst_identity, id.worst);
  }
  o.require(built == 20, fmt::format("only {} of 20 configs certified", built));
  o.note(fmt::format("{} configs, max iterations {}, worst identity deviation {:.3e}", built,
                     most_iterations, worst_identity));
  return o;
}

// 3. Step and error bounds of the certified Newton iteration.
Outcome newton_bounds() {
  Outcome o;
  for (const char* name : {"scalar_sqrt2_kink", "system_2d_kink"}) {
    auto start = Clock::now();
    CorpusEntry e = corpus_entry(name);
    PreconditionedProblem pp = precondition(e.problem);
    SolveResult r = solve_certified(pp, SolveOptions{1e-10, 50, false});
    o.require(r.status == SolveStatus::Converged,
              fmt::format("{}: status {}", name, to_string(r.status)));
    o.require(r.final_residual <= 1e-10, fmt::format("{}: residual {:.3e}", name, r.final_residual));
    o.require(r.steps.size() <= 50, fmt::format("{}: {} iterations", name, r.steps.size()));
    double slack = audit_slack(r.certificate.t_star);
    double worst_step = -INFINITY;
    for (const StepRecord& s : r.steps) {
      worst_step = std::max(worst_step, s.step_norm - s.majorant_delta);
      o.require(s.step_norm <= s.majorant_delta + slack,
                fmt::format("{}: step bound fails at n={}", name, s.n));
    }
    Vector root = oracle_solution(pp, 1e-14, e.bracket);
    ErrorBoundReport eb = audit_error_bound(pp, r, root);
    o.require(!eb.skipped && eb.passed(), fmt::format("{}: error bound fails", name));
    double elapsed = seconds_since(start);
    o.require(elapsed < 1.0, fmt::format("{}: runtime {:.3f} s", name, elapsed));
    o.note(fmt::format("{}: {} steps, max(step - delta) {:.2e}, min error slack {:.2e}, {:.4f} s",
                       name, r.steps.size(), worst_step, eb.worst_slack, elapsed));
  }
  return o;
}

// 4. Simplified iteration, agreement with Newton, uniqueness in the ball.
Outcome picard_and_uniqueness() {
  Outcome o;
  const double tol = 1e-10;
  for (const char* name : {"scalar_sqrt2_kink", "system_2d_kink"}) {
    PreconditionedProblem pp = precondition(corpus_get(name));
    SolveResult p = solve_picard(pp, SolveOptions{tol, 500, false});
    SolveResult n = solve_certified(pp, SolveOptions{tol, 50, false});
    o.require(p.status == SolveStatus::Converged,
              fmt::format("{}: picard status {}", name, to_string(p.status)));
    double slack = audit_slack(p.certificate.t_star);
    for (const StepRecord& s : p.steps)
      o.require(s.step_norm <= s.majorant_delta + slack,
                fmt::format("{}: picard bound fails at n={}", name, s.n));
    double gap = pp.norm_of(p.final_x - n.final_x);
    o.require(gap <= 2 * tol, fmt::format("{}: roots differ by {:.3e}", name, gap));

    // Newton from eight points on the sphere of radius t* around x0.
    double t_star = n.certificate.t_star;
    double spread = 0.0;
    for (int k = 0; k < 8; ++k) {
      Vector dir = Vector::Zero(pp.dim());
      if (pp.dim() == 1) {
        dir(0) = (k % 2 == 0) ? 1.0 : -1.0;
      } else {
        double angle = 2.0 * M_PI * k / 8.0;
        dir(0) = std::cos(angle);
        dir(1) = std::sin(angle);
      }
      dir /= pp.norm_of(dir);
      auto root = plain_newton(pp, pp.x0() + t_star * dir, 1e-13, 200);
      o.require(root.has_value(), fmt::format("{}: probe {} did not converge", name, k));
      if (root) spread = std::max(spread, pp.norm_of(*root - n.final_x));
    }
    o.require(spread <= 1e-8, fmt::format("{}: probes spread {:.3e}", name, spread));
    o.note(fmt::format("{}: {} picard steps, |picard - newton| {:.2e}, probe spread {:.2e}", name,
                       p.steps.size(), gap, spread));
  }
  return o;
}

// 5. Linearization residual against its estimate on every certified run.
Outcome residual_estimate() {
  Outcome o;
  int runs = 0;
  double worst = INFINITY;
  std::vector<std::pair<std::string, Overrides>> cases;
  for (const auto& d : corpus_list()) cases.push_back({d.name, {}});
  for (int dim = 1; dim <= 8; ++dim) cases.push_back({"linear_nd", {{"dim", double(dim)}}});
  cases.push_back({"scalar_sqrt2_kink", {{"c", 0.3}}});
  cases.push_back({"system_2d_kink", {{"c", 0.1}}});
  for (const auto& [name, overrides] : cases) {
    for (NormKind norm : {NormKind::Euclidean, NormKind::MaxAbs}) {
      PreconditionedProblem pp = precondition(corpus_entry(name, overrides, norm).problem);
      SolveResult r = solve_certified(pp);
      if (!r.certified()) continue;
      ++runs;
      ResidualAuditReport rep = audit_residual_estimate(pp, r);
      for (std::size_t i = 0; i < rep.measured.size(); ++i) {
        o.require(rep.measured[i] <= rep.bound[i] + 1e-10,
                  fmt::format("{} ({}): step {} residual {:.3e} > {:.3e}", name, to_string(norm),
                              i + 1, rep.measured[i], rep.bound[i]));
        worst = std::min(worst, rep.bound[i] - rep.measured[i]);
      }
    }
  }
  o.require(runs >= 10, fmt::format("only {} certified runs", runs));
  o.note(fmt::format("{} certified runs, smallest slack {:.3e}", runs, worst));
  return o;
}

struct AuditRun {
  int code;
  std::size_t violations;
};

AuditRun audit_via_cli(const std::string& problem, const Overrides& overrides) {
  cli::RunConfig config;
  config.problem = problem;
  config.overrides = overrides;
  config.audit.samples = 10000;
  config.audit.seed = kDefaultSeed;
  std::ostringstream out;
  std::ostringstream err;
  int code = cli::cmd_audit(config, out, err);
  std::size_t total = 0;
  auto j = nlohmann::json::parse(out.str());
  for (const auto& [key, check] : j["checks"].items())
    if (check.contains("violations")) total += check["violations"].get<std::size_t>();
  return {code, total};
}

// 6. Understated declarations are caught by the audit.
Outcome falsifiability() {
  Outcome o;
  struct Case {
    const char* problem;
    Overrides halved;
    const char* label;
  };
  // Declared values with the default x0 = 1.25: K = 0.8, psi = 0.04.
  const Case cases[] = {
      {"scalar_sqrt2_smooth", {{"K", 0.4}}, "K/2"},
      {"scalar_sqrt2_kink", {{"K", 0.4}}, "K/2"},
      {"scalar_sqrt2_kink", {{"psi", 0.02}}, "psi/2"},
  };
  for (const Case& c : cases) {
    AuditRun bad = audit_via_cli(c.problem, c.halved);
    o.require(bad.code == cli::kExitNotCertified && bad.violations >= 1,
              fmt::format("{} {}: exit {}, {} violations", c.problem, c.label, bad.code,
                          bad.violations));
    o.note(fmt::format("{} {}: exit {}, {} violations", c.problem, c.label, bad.code,
                       bad.violations));
  }
  for (const char* problem : {"scalar_sqrt2_smooth", "scalar_sqrt2_kink"}) {
    AuditRun good = audit_via_cli(problem, {});
    o.require(good.code == cli::kExitOk && good.violations == 0,
              fmt::format("{} declared: exit {}, {} violations", problem, good.code,
                          good.violations));
    o.note(fmt::format("{} declared: exit {}, {} violations", problem, good.code,
                       good.violations));
  }
  return o;
}

// 7. The Hoelder problem defeats every Lipschitz declaration and passes with
// its Hoelder(1/2) modulus.
Outcome hoelder_coverage() {
  Outcome o;
  CorpusEntry base = corpus_entry("hoelder_scalar");
  o.require(std::abs(base.problem.x0(0)) <= base.problem.radius, "default ball misses 0");

  int certified_but_falsified = 0;
  int not_certified = 0;
  for (int k = 0; k <= 24; ++k) {
    double K = std::pow(10.0, -3.0 + 0.25 * k);
    PreconditionedProblem pp =
        precondition(corpus_entry("hoelder_scalar", {{"K", K}, {"h", 0.0}}).problem);
    Certificate c = check_conditions(majorant_config(pp), pp.radius());
    if (!c.certified()) {
      ++not_certified;
      continue;
    }
    auto smooth = check_regular_smoothness(pp, pp.base().modulus, 0.0, 10000);
    if (smooth.violation_count > 0) {
      ++certified_but_falsified;
    } else {
      o.require(false, fmt::format("Lipschitz K={:.4g} certifies and survives the audit", K));
    }
  }
  o.note(fmt::format("Lipschitz K grid 1e-3..1e3: {} fail certification, {} certify but are "
                     "falsified by sampling",
                     not_certified, certified_but_falsified));

  PreconditionedProblem pp = precondition(base.problem);
  const Problem& p = pp.base();
  Certificate c = check_conditions(majorant_config(pp), pp.radius());
  o.require(c.certified(), "Hoelder(1/2) certificate fails");
  auto smooth = check_regular_smoothness(pp, p.modulus, p.h, 10000);
  auto variation = check_norm_variation(pp, p.modulus, p.h, 10000);
  o.require(smooth.passed() && variation.passed(), "Hoelder(1/2) declaration falsified");
  SolveResult r = solve_certified(pp);
  o.require(r.status == SolveStatus::Converged, "Hoelder solve: " + to_string(r.status));
  double slack = audit_slack(c.t_star);
  for (const StepRecord& s : r.steps)
    o.require(s.step_norm <= s.majorant_delta + slack, fmt::format("step bound at n={}", s.n));
  ErrorBoundReport eb = audit_error_bound(pp, r, oracle_solution(pp, 1e-14, base.bracket));
  o.require(!eb.skipped && eb.passed(), "Hoelder error bound fails");
  o.note(fmt::format("Hoelder(1/2): t* = {:.6f}, {} steps, bounds intact", c.t_star,
                     r.steps.size()));
  return o;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// 8. Identical inputs give byte-identical outputs.
Outcome determinism() {
  Outcome o;
  for (const char* name : {"scalar_sqrt2_kink", "system_2d_kink", "hoelder_scalar"}) {
    std::string csv[2];
    std::string solve_report[2];
    std::string audit_out[2];
    std::string audit_report[2];
    for (int run = 0; run < 2; ++run) {
      cli::RunConfig config;
      config.problem = name;
      config.audit.samples = 2000;
      config.outputs.csv = fmt::format("acceptance_{}_{}.csv", name, run);
      config.outputs.report = fmt::format("acceptance_{}_{}_solve.json", name, run);
      std::ostringstream out;
      std::ostringstream err;
      cli::cmd_solve(config, out, err);
      csv[run] = slurp(config.outputs.csv);
      solve_report[run] = slurp(config.outputs.report);
      std::remove(config.outputs.csv.c_str());
      std::remove(config.outputs.report.c_str());

      config.outputs.csv.clear();
      config.outputs.report = fmt::format("acceptance_{}_{}_audit.json", name, run);
      std::ostringstream aout;
      cli::cmd_audit(config, aout, err);
      audit_out[run] = aout.str();
      audit_report[run] = slurp(config.outputs.report);
      std::remove(config.outputs.report.c_str());
    }
    o.require(!csv[0].empty() && csv[0] == csv[1], fmt::format("{}: CSV differs", name));
    o.require(!solve_report[0].empty() && solve_report[0] == solve_report[1],
              fmt::format("{}: solve report differs", name));
    o.require(!audit_report[0].empty() && audit_report[0] == audit_report[1] &&
                  audit_out[0] == audit_out[1],
              fmt::format("{}: audit output differs", name));
  }
  o.note("solve CSV/JSON and audit JSON compared byte for byte on three problems");
  return o;
}

} // namespace

int main() {
  struct Criterion {
    const char* label;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"1 classical Kantorovich reduction", kantorovich_reduction},
      {"2 majorant sequence: monotone, bounded, residual identity", majorant_sequence_suite},
      {"3 certified Newton step and error bounds", newton_bounds},
      {"4 Picard bound, Newton agreement, uniqueness probe", picard_and_uniqueness},
      {"5 linearization residual estimate", residual_estimate},
      {"6 falsifiability of understated moduli", falsifiability},
      {"7 Hoelder coverage beyond Lipschitz", hoelder_coverage},
      {"8 deterministic outputs", determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.notes.push_back(std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.label << '\n';
    for (const std::string& n : o.notes) std::cout << "     " << n << '\n';
    if (!o.pass) ++failures;
  }
  std::cout << (failures == 0 ? "all criteria passed" : fmt::format("{} criteria failed", failures))
            << '\n';
  return failures == 0 ? 0 : 1;
}
