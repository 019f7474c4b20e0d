#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lpmod/frontend/ast.hpp"
#include "lpmod/modsys/compiled.hpp"

namespace lpmod {

/// What rule compilation needs from the enclosing module.
struct ResolveContext {
  const SymbolTable* table = nullptr;
  /// Qualifier protecting derived constants introduced by heads.
  std::string module;
  std::string path;
  /// Renaming labels of the module's imports or signature.
  std::vector<std::string> labels;
  /// Receives every user variable the compiled rules mention.
  std::set<std::string>* variables = nullptr;
};

/// Splits a rule into one compiled rule per head atom and body disjunct,
/// resolving names, accessors and inferred rewrites, and ordering each
/// body for evaluation.
std::vector<CompiledRule> resolve_rule_names(const frontend::RawRule& rule, const ResolveContext& ctx,
                                             std::size_t origin = 0);

/// Rules `symbol :- disjunct` for a conforms / requires / ensures body.
std::vector<CompiledRule> resolve_clause(const frontend::RawBody& body, const QualName& symbol,
                                         const ResolveContext& ctx, std::size_t origin, Span span);

/// A query goal compiled against a table.
struct CompiledGoal {
  std::vector<Conjunction> disjuncts;
  /// Goal variables in order of first appearance.
  std::vector<std::string> variables;
};

CompiledGoal compile_goal(const frontend::RawBody& body, const ResolveContext& ctx);

/// Resolves a model-level term. `symconst` supplies the value of σ symbols.
Term resolve_ground_term(const frontend::RawExpr& e, const SymbolTable& table, const std::string& path,
                         const std::function<Term(const QualName&, Span)>& symconst);

/// Every ordered pair (p, q), p ≠ q, of candidates applicable to `rhs`
/// whose relabeling maps `rhs` into `lhs`.
std::vector<RelabelingSpec> passing_rewrites(const TypeExpr& rhs, const TypeExpr& lhs,
                                             const std::vector<Qualifiers>& candidates);

/// The unique passing relabeling. Throws "type-error" when none passes and
/// "rewrite-ambiguous" when several do.
RelabelingSpec infer_rewrite(const TypeExpr& rhs, const TypeExpr& lhs, const std::vector<Qualifiers>& candidates,
                             const std::string& path = {}, Span span = {});

/// Candidate prefixes ε and each label.
std::vector<Qualifiers> rewrite_candidates(const std::vector<std::string>& labels);

/// Assigns strata over constructor-symbol dependencies. Throws
/// "stratification" naming the symbols of a cycle through negation.
void stratify(Program& program, const std::string& path = {});

/// Dependency edges used by stratify: body symbol -> head symbol.
struct DependencyEdge {
  std::string from;
  std::string to;
  bool negative = false;
  friend auto operator<=>(const DependencyEdge&, const DependencyEdge&) = default;
};
std::set<DependencyEdge> dependency_edges(const std::vector<CompiledRule>& rules);

/// Implicit clause of `F ::= fun (x1..xk -> y1..ym)`: no two facts agree on
/// the x-arguments and differ on a y-argument.
CompiledRule desugar_fun(const QualName& ctor, std::size_t arity, std::size_t split, const QualName& clause_symbol);

/// x::rules. `source` is the table the rules were compiled against.
CompiledRule rename_rule(const std::string& prefix, const CompiledRule& rule, const SymbolTable& source);
Term rename_term(const std::string& prefix, const Term& t, const SymbolTable& source);
ClauseInfo rename_clause(const std::string& prefix, const ClauseInfo& clause, const SymbolTable& source);

/// Symbols a compiled rule mentions (constructors, constants, types).
std::set<QualName> referenced_symbols(const CompiledRule& rule);

/// Global namespace of loaded modules with on-demand elaboration.
class ModuleEnv {
 public:
  enum class Kind { Domain, Model, Transform, System };

  void add_unit(const frontend::SourceUnit& unit);
  void load_text(std::string_view text, const std::string& path);
  void load_file(const std::string& path);

  DomainRef domain(const std::string& name);
  ModelRef model(const std::string& name);
  TransformRef transform(const std::string& name);
  SystemRef system(const std::string& name);

  std::optional<Kind> kind_of(const std::string& name) const;
  /// Module names in load order.
  const std::vector<std::string>& names() const { return order_; }
  std::size_t size() const { return order_.size(); }

  /// Elaborates every loaded module; throws the first error.
  void elaborate_all();

  /// Registers an already compiled model under its name.
  void add_model(ModelRef m);

 private:
  struct Slot {
    frontend::RawModuleDecl decl;
    Kind kind = Kind::Domain;
  };

  const Slot& slot(const std::string& name, Kind kind) const;
  void enter(const std::string& name, const Slot& s);
  void leave();

  std::map<std::string, Slot> slots_;
  std::vector<std::string> order_;
  std::map<std::string, DomainRef> domains_;
  std::map<std::string, ModelRef> models_;
  std::map<std::string, TransformRef> transforms_;
  std::map<std::string, SystemRef> systems_;
  std::vector<std::string> active_;
};

DomainRef elaborate_domain(const frontend::RawModuleDecl& raw, ModuleEnv& env);
ModelRef elaborate_model(const frontend::RawModuleDecl& raw, ModuleEnv& env);
TransformRef elaborate_transform(const frontend::RawModuleDecl& raw, ModuleEnv& env);
SystemRef elaborate_system(const frontend::RawModuleDecl& raw, ModuleEnv& env);

}  // namespace lpmod
