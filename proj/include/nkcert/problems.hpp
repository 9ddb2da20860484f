#pragma once

// Built-in problems with analytically declared moduli. Declared moduli refer
// to the preconditioned operators F = f'(x0)^-1 f and G = f'(x0)^-1 g, so they
// are recomputed whenever x0, R or a problem parameter is overridden.
//
// Modulus overrides (any problem):
//   K          replace omega by Lipschitz(K)
//   L, alpha   replace omega by Hoelder(L, alpha); a missing one keeps the
//              declared Hoelder value
//   psi        replace psi by Constant(psi)
//   h          replace the declared regular-smoothness offset

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nkcert/operator_model.hpp"

namespace nkcert {

using Overrides = std::map<std::string, double, std::less<>>;

struct CorpusDescriptor {
  std::string name;
  std::string summary;
  std::vector<std::string> parameters;  // problem-specific override keys
};

struct CorpusEntry {
  std::string name;
  std::string notes;  // where the declared moduli come from
  Problem problem;
  /// Sign bracket of the root in one dimension; decimals come from the oracle.
  std::optional<std::pair<double, double>> bracket;
};

std::vector<CorpusDescriptor> corpus_list();

/// Throws ValidationError for unknown names or keys and for overrides that
/// break an entry's structural invariants.
CorpusEntry corpus_entry(std::string_view name, const Overrides& overrides = {},
                         NormKind norm = NormKind::Euclidean);

inline Problem corpus_get(std::string_view name, const Overrides& overrides = {},
                          NormKind norm = NormKind::Euclidean) {
  return corpus_entry(name, overrides, norm).problem;
}

} // namespace nkcert
