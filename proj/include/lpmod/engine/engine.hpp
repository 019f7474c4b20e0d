#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lpmod/modsys/compiled.hpp"
#include "lpmod/modsys/modsys.hpp"

namespace lpmod {

/// Cap from LPMOD_MAX_FACTS, else 1,000,000.
std::size_t default_fact_cap();

/// Extension of p(), indexed by outer constructor.
class FactStore {
 public:
  explicit FactStore(std::size_t cap = default_fact_cap()) : cap_(cap) {}

  /// True when the fact is new. Throws "resource-limit" past the cap.
  bool insert(const Term& fact);
  bool contains(const Term& fact) const;
  const std::set<Term>& with_key(const std::string& key) const;

  std::size_t size() const { return size_; }
  std::size_t cap() const { return cap_; }
  /// Every fact in term order.
  std::vector<Term> all() const;
  /// One fact per line in model syntax, term-ordered.
  std::string serialize() const;

  friend bool operator==(const FactStore& a, const FactStore& b) { return a.all() == b.all(); }

 private:
  std::map<std::string, std::set<Term>> by_key_;
  std::size_t size_ = 0;
  std::size_t cap_;
};

struct EvalOptions {
  /// Re-fire every rule of a stratum until nothing changes.
  bool naive = false;
  /// 0 selects default_fact_cap().
  std::size_t max_facts = 0;
};

/// Least fixpoint of the program's rules over `edb`, stratum by stratum.
FactStore evaluate(const Program& program, const std::set<Term>& edb, const EvalOptions& opts = {});

/// `{ heads | body }` under `outer`.
std::set<Term> eval_comprehension(const Comprehension& comp, const Binding& outer, const FactStore& store,
                                  const SymbolTable& table);

struct ClauseResult {
  ClauseInfo clause;
  bool holds = false;
  std::optional<Term> witness;
};

struct ConformanceReport {
  QualName goal;
  bool conforms = false;
  std::vector<ClauseResult> clauses;
};

/// Clause results for `goal` and the clauses of `program`, read off a store.
ConformanceReport clause_report(const Program& program, const QualName& goal, const FactStore& store,
                                ClauseInfo::Kind kind);

ConformanceReport check_conforms(const CompiledDomain& domain, const std::set<Term>& edb,
                                 const EvalOptions& opts = {});
ConformanceReport check_conforms(const CompiledModel& model, const EvalOptions& opts = {});

/// Bindings of the goal's variables, sorted by their tuple.
std::vector<Binding> query(const CompiledGoal& goal, const FactStore& store, const SymbolTable& table);

/// Parses and compiles `text` against the model's table, evaluates and answers.
std::vector<Binding> query_model(const CompiledModel& model, const std::string& text, const EvalOptions& opts = {});

}  // namespace lpmod
