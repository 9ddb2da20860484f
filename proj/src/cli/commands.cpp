#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "nkcert/audit.hpp"
#include "nkcert/cli.hpp"
#include "nkcert/errors.hpp"
#include "nkcert/majorant.hpp"
#include "nkcert/solver.hpp"

namespace nkcert::cli {

using ordered_json = nlohmann::ordered_json;

namespace {

struct LoadedProblem {
  CorpusEntry entry;
  PreconditionedProblem pp;
};

LoadedProblem load_problem(const RunConfig& config) {
  if (config.problem.empty()) throw ValidationError("no problem given (use --problem NAME)");
  CorpusEntry entry = corpus_entry(config.problem, config.overrides, config.norm);
  if (config.h) entry.problem.h = *config.h;
  if (config.modulus) entry.problem.modulus = *config.modulus;
  if (config.psi) entry.problem.psi = *config.psi;
  PreconditionedProblem pp = precondition(entry.problem);
  return LoadedProblem{std::move(entry), std::move(pp)};
}

// JSON cannot carry inf or nan; both serialize as null.
ordered_json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

ordered_json vec(const Vector& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

ordered_json certificate_json(const Certificate& c) {
  ordered_json j;
  j["certified"] = c.certified();
  j["a"] = num(c.a);
  j["h"] = num(c.h);
  j["chi"] = num(c.chi);
  j["omega_integral_chi"] = num(c.omega_integral_chi);
  j["psi_integral_chi"] = num(c.psi_integral_chi);
  j["condition_holds"] = c.condition_holds;
  j["condition_slack"] = num(c.condition_slack);
  j["w_at_0"] = num(c.w_at_0);
  j["w_at_chi"] = num(c.w_at_chi);
  j["convex_on_grid"] = c.convex_on_grid;
  j["unique_zero_found"] = c.unique_zero_found;
  j["t_star"] = c.unique_zero_found ? num(c.t_star) : ordered_json(nullptr);
  j["domain_radius"] = num(c.domain_radius);
  j["ball_radius_ok"] = c.ball_radius_ok;
  if (!c.certified()) j["reason"] = c.failure_reason();
  return j;
}

bool write_file(const std::string& path, const std::string& text, std::ostream& err) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    err << "error: cannot write '" << path << "'\n";
    return false;
  }
  out << text;
  return static_cast<bool>(out);
}

void print_certificate(const Certificate& c, std::ostream& out) {
  out << "a             = " << format_number(c.a) << '\n'
      << "h             = " << format_number(c.h) << '\n'
      << "chi           = " << format_number(c.chi) << '\n'
      << "Omega(chi)    = " << format_number(c.omega_integral_chi) << '\n'
      << "Psi(chi)      = " << format_number(c.psi_integral_chi) << '\n'
      << "slack         = " << format_number(c.condition_slack)
      << (c.condition_holds ? "  (a < Omega(chi) + h*chi - Psi(chi) holds)\n"
                            : "  (violated)\n")
      << "W(0), W(chi)  = " << format_number(c.w_at_0) << ", " << format_number(c.w_at_chi)
      << '\n';
  if (c.unique_zero_found) {
    out << "t*            = " << format_number(c.t_star) << '\n'
        << "ball          = t* <= R = " << format_number(c.domain_radius)
        << (c.ball_radius_ok ? "  ok\n" : "  FAILS\n");
  }
  out << "certified     = " << (c.certified() ? "yes" : "no") << '\n';
  if (!c.certified()) out << c.failure_reason() << '\n';
}

std::string bound_cell(const StepRecord& s) {
  if (!s.certified) return "uncertified";
  return s.bound_ok ? "true" : "false";
}

std::string steps_csv(const SolveResult& r) {
  std::string csv = std::string(kSolveCsvHeader) + "\n";
  for (const StepRecord& s : r.steps) {
    csv += fmt::format("{},{},{},{},{},{},{}\n", s.n, format_number(s.t_n),
                       format_number(s.majorant_delta), format_number(s.step_norm),
                       format_number(s.residual_norm), format_number(s.error_bound),
                       bound_cell(s));
  }
  return csv;
}

int exit_code(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return kExitOk;
    case SolveStatus::CertificateFailed: return kExitNotCertified;
    case SolveStatus::BoundViolation: return kExitBoundViolation;
    case SolveStatus::MaxIter:
    case SolveStatus::DomainExit:
    case SolveStatus::SingularJacobian:
    case SolveStatus::Stagnated: return kExitIterationFailure;
  }
  return kExitIterationFailure;
}

int run_solver(const RunConfig& config, std::ostream& out, std::ostream& err, bool picard) {
  LoadedProblem loaded = load_problem(config);
  SolveOptions options{config.tol, config.max_iter, config.force};
  SolveResult r = picard ? solve_picard(loaded.pp, options) : solve_certified(loaded.pp, options);

  out << "problem: " << loaded.entry.name << " (" << (picard ? "picard" : "newton") << ")\n";
  out << fmt::format("{:>4} {:>24} {:>24} {:>24} {:>24} {:>24} {:>11}\n", "n",
                     picard ? "rho_n" : "t_n", "delta", "step_norm", "residual", "error_bound",
                     "bound_ok");
  for (const StepRecord& s : r.steps) {
    out << fmt::format("{:>4} {:>24} {:>24} {:>24} {:>24} {:>24} {:>11}\n", s.n,
                       format_number(s.t_n), format_number(s.majorant_delta),
                       format_number(s.step_norm), format_number(s.residual_norm),
                       format_number(s.error_bound), bound_cell(s));
  }
  out << "status: " << to_string(r.status) << '\n';
  out << "final residual: " << format_number(r.final_residual) << '\n';
  if (!r.diagnostic.empty()) out << "diagnostic: " << r.diagnostic << '\n';

  if (!config.outputs.csv.empty() && !write_file(config.outputs.csv, steps_csv(r), err))
    return kExitUsage;
  if (!config.outputs.report.empty()) {
    ordered_json j;
    j["problem"] = loaded.entry.name;
    j["iteration"] = picard ? "picard" : "newton";
    j["status"] = to_string(r.status);
    j["iterations"] = r.steps.size();
    j["final_x"] = vec(r.final_x);
    j["final_residual"] = num(r.final_residual);
    j["diagnostic"] = r.diagnostic;
    j["certificate"] = certificate_json(r.certificate);
    if (!write_file(config.outputs.report, j.dump(2) + "\n", err)) return kExitUsage;
  }
  return exit_code(r.status);
}

ordered_json check_json(const CheckReport& c) {
  ordered_json j;
  j["status"] = c.skipped ? "skipped" : (c.passed() ? "pass" : "fail");
  j["pairs_checked"] = c.pairs_checked;
  j["violations"] = c.violation_count;
  j["max_deficit"] = num(c.max_deficit);
  j["h_exceeded"] = c.h_exceeded_count;
  if (!c.note.empty()) j["note"] = c.note;
  ordered_json list = ordered_json::array();
  for (const Violation& v : c.violations) {
    ordered_json e;
    e["sample"] = v.sample;
    e["x1"] = vec(v.x1);
    e["x2"] = vec(v.x2);
    e["lhs"] = num(v.lhs);
    e["rhs"] = num(v.rhs);
    e["deficit"] = num(v.deficit);
    list.push_back(e);
  }
  j["first_violations"] = list;
  return j;
}

} // namespace

int cmd_certify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  LoadedProblem loaded = load_problem(config);
  MajorantConfig cfg = majorant_config(loaded.pp);
  Certificate c = check_conditions(cfg, loaded.pp.radius());
  out << "problem: " << loaded.entry.name << '\n'
      << "norm: " << to_string(config.norm) << '\n'
      << "modulus: " << cfg.modulus().describe() << '\n'
      << "psi: " << cfg.psi().describe() << '\n';
  print_certificate(c, out);
  if (!config.outputs.report.empty()) {
    ordered_json j;
    j["problem"] = loaded.entry.name;
    j["modulus"] = cfg.modulus().describe();
    j["psi"] = cfg.psi().describe();
    j["certificate"] = certificate_json(c);
    if (!write_file(config.outputs.report, j.dump(2) + "\n", err)) return kExitUsage;
  }
  return c.certified() ? kExitOk : kExitNotCertified;
}

int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return run_solver(config, out, err, false);
}

int cmd_picard(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return run_solver(config, out, err, true);
}

int cmd_audit(const RunConfig& config, std::ostream& out, std::ostream& err) {
  LoadedProblem loaded = load_problem(config);
  const PreconditionedProblem& pp = loaded.pp;
  const Problem& p = pp.base();
  const std::size_t n = config.audit.samples;
  const std::uint64_t seed = config.audit.seed;

  ordered_json j;
  j["problem"] = loaded.entry.name;
  j["disclaimer"] = kSamplingDisclaimer;
  j["norm"] = to_string(config.norm);
  j["modulus"] = p.modulus.describe();
  j["psi"] = p.psi.describe();
  j["h"] = num(p.h);
  j["samples"] = n;
  j["seed"] = seed;

  bool passed = true;
  ordered_json checks;

  SmoothnessSampleReport smooth = check_regular_smoothness(pp, p.modulus, p.h, n, seed);
  ordered_json sj = check_json(smooth);
  if (!smooth.skipped) {
    sj["xi"] = {{"min", num(smooth.xi_min)}, {"max", num(smooth.xi_max)},
                {"mean", num(smooth.xi_mean)}};
    sj["xi_bound_failures"] = smooth.xi_bound_failures;
  }
  checks["regular_smoothness"] = sj;
  passed = passed && smooth.passed() && smooth.xi_bound_failures == 0;

  CheckReport variation = check_norm_variation(pp, p.modulus, p.h, n, seed);
  checks["jacobian_norm_variation"] = check_json(variation);
  passed = passed && variation.passed();

  PsiReport psi = check_psi_condition(pp, p.psi, n, seed);
  checks["psi_lipschitz"] = check_json(psi.pointwise);
  checks["psi_integral"] = check_json(psi.integral);
  passed = passed && psi.passed();

  SolveResult r = solve_certified(pp, SolveOptions{config.tol, config.max_iter, false});
  if (r.status == SolveStatus::CertificateFailed) {
    const char* why = "certificate failed; no certified run to audit";
    checks["step_bound"] = {{"status", "skipped"}, {"note", why}};
    checks["residual_estimate"] = {{"status", "skipped"}, {"note", why}};
    checks["error_bound"] = {{"status", "skipped"}, {"note", why}};
  } else {
    bool step_ok = r.status != SolveStatus::BoundViolation;
    checks["step_bound"] = {{"status", step_ok ? "pass" : "fail"},
                            {"solve_status", to_string(r.status)},
                            {"steps", r.steps.size()},
                            {"note", r.diagnostic}};
    passed = passed && step_ok;

    ResidualAuditReport res = audit_residual_estimate(pp, r);
    checks["residual_estimate"] = {{"status", res.passed() ? "pass" : "fail"},
                                   {"steps_checked", res.measured.size()},
                                   {"violations", res.violation_count},
                                   {"worst_slack", num(res.worst_slack)}};
    passed = passed && res.passed();

    try {
      Vector oracle = oracle_solution(pp, 1e-14, loaded.entry.bracket);
      ErrorBoundReport eb = audit_error_bound(pp, r, oracle);
      checks["error_bound"] = {{"status", eb.passed() ? "pass" : "fail"},
                               {"iterates_checked", eb.error.size()},
                               {"violations", eb.violation_count},
                               {"worst_slack", num(eb.worst_slack)}};
      passed = passed && eb.passed();
    } catch (const OracleUnavailable& e) {
      checks["error_bound"] = {{"status", "skipped"}, {"note", e.what()}};
    }
  }
  j["checks"] = checks;
  j["passed"] = passed;

  std::string text = j.dump(2) + "\n";
  out << text;
  if (!config.outputs.report.empty() && !write_file(config.outputs.report, text, err))
    return kExitUsage;
  return passed ? kExitOk : kExitNotCertified;
}

int cmd_majorant(const RunConfig& config, std::ostream& out, std::ostream& err) {
  std::optional<MajorantConfig> cfg;
  double radius = std::numeric_limits<double>::infinity();
  if (!config.problem.empty()) {
    LoadedProblem loaded = load_problem(config);
    cfg = majorant_config(loaded.pp);
    radius = loaded.pp.radius();
  } else {
    if (!config.a || !config.modulus)
      throw ValidationError("majorant without a problem needs 'a' and 'modulus'");
    cfg = MajorantConfig::make(*config.a, config.h.value_or(0.0), *config.modulus,
                               config.psi.value_or(PsiRate::zero()));
  }

  Certificate c = check_conditions(*cfg, radius);
  out << "modulus: " << cfg->modulus().describe() << '\n'
      << "psi: " << cfg->psi().describe() << '\n';
  print_certificate(c, out);
  if (!c.condition_holds || !c.unique_zero_found) return kExitNotCertified;

  MajorantTrace trace = run_majorant(*cfg, kTraceTolerance, config.max_iter);
  IdentityReport identity = residual_identity_check(*cfg, trace);

  std::string csv = "n,t_n,delta_t,w,identity_deviation\n";
  out << fmt::format("{:>4} {:>24} {:>24} {:>24} {:>24}\n", "n", "t_n", "delta_t", "W(t_n)",
                     "identity_dev");
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    double delta = i + 1 < trace.t.size() ? trace.delta(i) : std::nan("");
    double dev = i < identity.deviations.size() ? identity.deviations[i] : std::nan("");
    double w = trace.t[i] <= cfg->chi() ? w_eval(*cfg, trace.t[i]) : std::nan("");
    out << fmt::format("{:>4} {:>24} {:>24} {:>24} {:>24}\n", i, format_number(trace.t[i]),
                       format_number(delta), format_number(w), format_number(dev));
    csv += fmt::format("{},{},{},{},{}\n", i, format_number(trace.t[i]), format_number(delta),
                       format_number(w), format_number(dev));
  }
  out << "trace limit   = " << format_number(trace.t_star)
      << (trace.converged ? "  (converged)\n" : "  (not converged)\n")
      << "bisection t*  = " << format_number(c.t_star) << '\n'
      << "identity worst deviation = " << format_number(identity.worst) << '\n';

  if (!config.outputs.csv.empty() && !write_file(config.outputs.csv, csv, err))
    return kExitUsage;
  return trace.converged ? kExitOk : kExitIterationFailure;
}

int cmd_corpus(std::ostream& out) {
  for (const CorpusDescriptor& d : corpus_list()) {
    out << d.name << "  " << d.summary << "\n    overrides:";
    for (const std::string& k : d.parameters) out << ' ' << k;
    out << " K L alpha psi h\n";
  }
  return kExitOk;
}

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> problem;
  std::vector<std::string> sets;
  std::optional<std::string> norm;
  std::optional<double> h;
  std::optional<double> tol;
  std::optional<std::size_t> max_iter;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> csv;
  std::optional<std::string> report;
  bool force = false;
  std::optional<double> a;
  std::optional<std::string> modulus;
  std::optional<std::string> psi;
};

void add_run_options(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON run configuration");
  sub->add_option("--problem", f.problem, "corpus problem name");
  sub->add_option("--set", f.sets, "override key=value (repeatable)");
  sub->add_option("--norm", f.norm, "euclidean or maxabs");
  sub->add_option("--h", f.h, "regular-smoothness offset h");
  sub->add_option("--tol", f.tol, "stopping tolerance");
  sub->add_option("--max-iter", f.max_iter, "iteration budget");
  sub->add_option("--samples", f.samples, "audit sample pairs");
  sub->add_option("--seed", f.seed, "audit seed");
  sub->add_option("--csv", f.csv, "CSV output path");
  sub->add_option("--report", f.report, "report output path");
  sub->add_flag("--force", f.force, "run even if the certificate fails");
  sub->add_option("--a", f.a, "residual bound a (majorant without a problem)");
  sub->add_option("--modulus", f.modulus, R"(modulus JSON, e.g. {"kind":"lipschitz","K":1})");
  sub->add_option("--psi", f.psi, R"(psi JSON, e.g. {"kind":"constant","c":0.05})");
}

RunConfig resolve(const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (f.problem) c.problem = *f.problem;
  for (const std::string& s : f.sets) {
    auto [key, value] = parse_override(s);
    c.overrides[key] = value;
  }
  if (f.norm) c.norm = norm_from_string(*f.norm);
  if (f.h) c.h = *f.h;
  if (f.tol) c.tol = *f.tol;
  if (f.max_iter) c.max_iter = *f.max_iter;
  if (f.samples) c.audit.samples = *f.samples;
  if (f.seed) c.audit.seed = *f.seed;
  if (f.csv) c.outputs.csv = *f.csv;
  if (f.report) c.outputs.report = *f.report;
  if (f.force) c.force = true;
  if (f.a) c.a = *f.a;
  try {
    if (f.modulus) c.modulus = modulus_from_json(nlohmann::json::parse(*f.modulus));
    if (f.psi) c.psi = psi_from_json(nlohmann::json::parse(*f.psi));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("--modulus/--psi: ") + e.what());
  }
  c.validate();
  return c;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certified generalized Newton-Kantorovich solver for f(x) + g(x) = 0"};
  // `--h` is a run option, so help is only reachable as --help.
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  Flags flags;
  struct Command {
    const char* name;
    const char* help;
    int (*fn)(const RunConfig&, std::ostream&, std::ostream&);
  };
  const Command commands[] = {
      {"certify", "check the convergence hypotheses and print the certificate", cmd_certify},
      {"solve", "certified Newton iteration with per-step bound audit", cmd_solve},
      {"picard", "simplified iteration u - (F + G)(u) with its majorant", cmd_picard},
      {"audit", "sample the declared hypotheses and audit a certified run", cmd_audit},
      {"majorant", "scalar majorant sequence only", cmd_majorant},
  };
  std::vector<CLI::App*> subs;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_run_options(sub, flags);
    subs.push_back(sub);
  }
  CLI::App* corpus = app.add_subcommand("corpus", "list built-in problems");

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (corpus->parsed()) return cmd_corpus(out);
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    try {
      RunConfig config = resolve(flags);
      return commands[i].fn(config, out, err);
    } catch (const ValidationError& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    } catch (const SetupError& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    }
  }
  return kExitUsage;
}

} // namespace nkcert::cli
