#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "nkcert/cli.hpp"
#include "nkcert/errors.hpp"

namespace nkcert::cli {

using nlohmann::json;

namespace {

double number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw ValidationError(fmt::format("config: '{}' must be a number", key));
  return j.at(key).get<double>();
}

std::vector<Breakpoint> breakpoints(const json& j) {
  if (!j.contains("breakpoints") || !j.at("breakpoints").is_array())
    throw ValidationError("config: piecewise kinds need a 'breakpoints' array of [t, value]");
  std::vector<Breakpoint> points;
  for (const json& p : j.at("breakpoints")) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw ValidationError("config: each breakpoint must be [t, value]");
    points.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return points;
}

std::string kind_of(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ValidationError("config: modulus/psi objects need a string 'kind'");
  return j.at("kind").get<std::string>();
}

} // namespace

void RunConfig::validate() const {
  if (!(tol > 0.0)) throw ValidationError("config: tol must be positive");
  if (max_iter < 1) throw ValidationError("config: max_iter must be at least 1");
}

Modulus modulus_from_json(const json& j) {
  const std::string kind = kind_of(j);
  if (kind == "lipschitz") return Modulus::lipschitz(number(j, "K"));
  if (kind == "hoelder") return Modulus::hoelder(number(j, "L"), number(j, "alpha"));
  if (kind == "sum_of_hoelder") {
    if (!j.contains("terms") || !j.at("terms").is_array())
      throw ValidationError("config: sum_of_hoelder needs a 'terms' array");
    std::vector<HoelderTerm> terms;
    for (const json& t : j.at("terms")) terms.push_back({number(t, "L"), number(t, "alpha")});
    return Modulus::sum_of_hoelder(std::move(terms));
  }
  if (kind == "piecewise_linear") return Modulus::piecewise_linear(breakpoints(j));
  throw ValidationError(fmt::format("config: unknown modulus kind '{}'", kind));
}

PsiRate psi_from_json(const json& j) {
  const std::string kind = kind_of(j);
  if (kind == "zero") return PsiRate::zero();
  if (kind == "constant") return PsiRate::constant(number(j, "c"));
  if (kind == "piecewise_linear") return PsiRate::piecewise_linear(breakpoints(j));
  throw ValidationError(fmt::format("config: unknown psi kind '{}'", kind));
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config: top level must be an object");
  RunConfig c;
  try {
    if (j.contains("problem")) {
      const json& p = j.at("problem");
      if (p.is_string()) {
        c.problem = p.get<std::string>();
      } else if (p.is_object()) {
        c.problem = p.at("name").get<std::string>();
        if (p.contains("overrides")) {
          for (const auto& [key, value] : p.at("overrides").items()) {
            if (!value.is_number())
              throw ValidationError(fmt::format("config: override '{}' must be a number", key));
            c.overrides[key] = value.get<double>();
          }
        }
      } else {
        throw ValidationError("config: 'problem' must be a name or an object");
      }
    }
    if (j.contains("norm")) c.norm = norm_from_string(j.at("norm").get<std::string>());
    if (j.contains("h") && !j.at("h").is_null()) c.h = j.at("h").get<double>();
    if (j.contains("tol")) c.tol = j.at("tol").get<double>();
    if (j.contains("max_iter")) c.max_iter = j.at("max_iter").get<std::size_t>();
    if (j.contains("audit")) {
      const json& a = j.at("audit");
      if (a.contains("samples")) c.audit.samples = a.at("samples").get<std::size_t>();
      if (a.contains("seed")) c.audit.seed = a.at("seed").get<std::uint64_t>();
    }
    if (j.contains("outputs")) {
      const json& o = j.at("outputs");
      if (o.contains("report")) c.outputs.report = o.at("report").get<std::string>();
      if (o.contains("csv")) c.outputs.csv = o.at("csv").get<std::string>();
    }
    if (j.contains("force")) c.force = j.at("force").get<bool>();
    if (j.contains("a")) c.a = j.at("a").get<double>();
    if (j.contains("modulus")) c.modulus = modulus_from_json(j.at("modulus"));
    if (j.contains("psi")) c.psi = psi_from_json(j.at("psi"));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("config: cannot open '{}'", path));
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("config: '{}' is not valid JSON: {}", path, e.what()));
  }
  return config_from_json(j);
}

std::pair<std::string, double> parse_override(const std::string& text) {
  auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ValidationError(fmt::format("--set expects key=value, got '{}'", text));
  std::string key = text.substr(0, eq);
  std::string value = text.substr(eq + 1);
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size())
    throw ValidationError(fmt::format("--set {}: '{}' is not a number", key, value));
  return {key, v};
}

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

} // namespace nkcert::cli
