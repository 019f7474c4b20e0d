#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "lpmod/diagnostics.hpp"
#include "lpmod/symtab/symbol_table.hpp"
#include "lpmod/types/term.hpp"
#include "lpmod/types/type_expr.hpp"

namespace lpmod {

struct Comprehension;

/// Body-level expression: a term, integer arithmetic, or `count`.
struct Expr {
  enum class Kind { Term, Binary, Count };
  Kind kind = Kind::Term;
  Term term;
  char op = 0;
  std::vector<Expr> args;
  std::shared_ptr<const Comprehension> comp;

  static Expr of(Term t);
  bool is_term() const { return kind == Kind::Term; }
  /// Variables outside comprehensions.
  void collect_variables(std::vector<std::string>& out) const;
  std::string str() const;
};

struct Literal {
  enum class Kind {
    Atom,      // p(pattern)
    Member,    // p(pattern), pattern : type
    Compare,   // lhs op rhs
    TypeTest,  // lhs : type
    No,        // comprehension is empty
    Project,   // target = source.field, resolved to an argument index
  };

  Kind kind = Kind::Atom;
  Term pattern;  // Atom, Member; Project target variable
  TypeExpr type;
  /// Index keys the literal reads (Atom: one, Member: every symbol of type).
  std::vector<std::string> keys;
  std::string op;
  Expr lhs;
  Expr rhs;
  std::shared_ptr<const Comprehension> comp;
  std::string source;
  QualName ctor;
  std::size_t index = 0;
  Span span;

  /// Variables this literal can bind or read outside comprehensions.
  std::vector<std::string> visible_variables() const;
  std::string str() const;
};

using Conjunction = std::vector<Literal>;

/// `{ h1, ..., hk | body }` with the variables it shares with its context.
struct Comprehension {
  std::vector<Term> heads;
  std::vector<Conjunction> disjuncts;
  std::vector<std::string> outer;

  std::string str() const;
};

/// One head atom over one body disjunct, literals in evaluation order.
struct CompiledRule {
  Term head;
  Conjunction body;
  std::size_t stratum = 0;
  /// Position of the source item inside the module that wrote it.
  std::size_t origin = 0;
  std::string module;
  std::string path;
  Span span;

  std::string str() const;
};

/// A conforms / requires / ensures obligation and the constant proving it.
struct ClauseInfo {
  enum class Kind { Conforms, Requires, Ensures };
  Kind kind = Kind::Conforms;
  QualName symbol;
  std::string module;
  std::size_t index = 0;  // 1-based, per module and kind
  std::string text;
  std::string path;
  Span span;
  /// First top-level `no` set with no outer variables; its least element
  /// witnesses a failure.
  std::shared_ptr<const Comprehension> witness;
};

/// Table, stratified rules and the clauses they prove.
struct Program {
  SymbolTable table;
  std::vector<CompiledRule> rules;
  std::vector<ClauseInfo> clauses;
  std::size_t strata = 1;
};

struct CompiledDomain {
  std::string name;
  Program program;
  QualName conforms_goal;
  /// Dotted names of every domain merged in, itself included.
  std::set<std::string> lineage;
  /// Renaming prefixes of imports; the rewrite candidates besides ε.
  std::vector<std::string> labels;
  std::string path;
  Span span;

  const SymbolTable& table() const { return program.table; }
};

using DomainRef = std::shared_ptr<const CompiledDomain>;

struct CompiledModel {
  std::string name;
  DomainRef domain;
  SymbolTable table;
  std::set<Term> facts;
  std::map<QualName, Term> symconsts;
  std::string path;
  Span span;
};

using ModelRef = std::shared_ptr<const CompiledModel>;

struct SignatureEntry {
  std::string label;
  DomainRef domain;
};

struct CompiledTransform {
  std::string name;
  std::vector<SignatureEntry> inputs;
  std::vector<SignatureEntry> outputs;
  Program program;
  QualName requires_goal;
  QualName ensures_goal;
  std::string path;
  Span span;
};

using TransformRef = std::shared_ptr<const CompiledTransform>;

struct CompiledSystem;
using SystemRef = std::shared_ptr<const CompiledSystem>;

struct PipelineStep {
  std::vector<std::string> outputs;
  std::string callee;
  std::vector<std::string> args;
  std::variant<TransformRef, SystemRef> target;
  Span span;
};

struct CompiledSystem {
  std::string name;
  std::vector<SignatureEntry> inputs;
  std::vector<SignatureEntry> outputs;
  /// Equations in a dependency-respecting order.
  std::vector<PipelineStep> steps;
  std::string path;
  Span span;
};

std::string_view clause_kind_name(ClauseInfo::Kind k);

}  // namespace lpmod
