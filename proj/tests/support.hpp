#pragma once

#include <cstddef>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lpmod/modsys/modsys.hpp"
#include "lpmod/symtab/symbol_table.hpp"
#include "lpmod/types/term.hpp"
#include "lpmod/types/type_expr.hpp"

namespace lpmod::test {

std::string corpus_path(const std::string& file);
std::string fixture_path(const std::string& file);
std::string golden_path(const std::string& file);
std::vector<std::string> corpus_files();
std::string slurp(const std::string& path);

/// Every corpus file, then the named fixtures.
ModuleEnv corpus_env(const std::vector<std::string>& fixtures = {});
/// One source text on its own.
ModuleEnv text_env(const std::string& text);
/// Corpus plus extra source text.
ModuleEnv corpus_with(const std::string& text);

/// Error code raised by `f`, or "" when it returns.
template <class F>
std::string error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

struct CliResult {
  int exit = 0;
  std::string out;
  std::string err;
};
CliResult run_cli(const std::vector<std::string>& args);

struct FsmShape {
  int states = 1;
  int events = 1;
  int transitions = 0;
  /// Adds an Init over an undeclared state.
  bool broken = false;
};

FsmShape random_shape(std::mt19937& rng, int max_states, int max_events);
/// Source text of a model of NonDetFSM.
std::string fsm_model(const std::string& name, const FsmShape& shape, std::mt19937& rng);

/// Terms over `ctx`'s constructors enumerated to the configured depth.
std::vector<Term> bounded_universe(const SymbolTable& ctx);
/// Membership read off the atoms, independent of TypeExpr::admits.
bool oracle_member(const Term& t, const TypeExpr& type, const SymbolTable& ctx, int depth = 8);
/// Denotation of `type` restricted to `universe`.
std::set<Term> oracle_denotation(const TypeExpr& type, const std::vector<Term>& universe, const SymbolTable& ctx);

/// Small constructor context for type properties.
/// Random table over a small symbol pool, so shared definitions collide.
SymbolTable random_table(std::mt19937& rng);

const SymbolTable& oracle_ctx();
TypeExpr random_type(std::mt19937& rng);

}  // namespace lpmod::test
