#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lpmod/types/qual_name.hpp"
#include "lpmod/types/term.hpp"
#include "lpmod/types/type_expr.hpp"

namespace lpmod {

enum class SymbolKind {
  New,       // η
  Derived,   // δ
  Union,     // μ
  Variable,  // ν
  SymConst,  // σ
};

std::string_view kind_symbol(SymbolKind k);  // Greek letter, UTF-8
std::string_view kind_word(SymbolKind k);    // "new", "derived", ...

struct Field {
  std::optional<std::string> name;
  TypeExpr type;
  friend bool operator==(const Field&, const Field&) = default;
};

struct SymbolEntry {
  SymbolKind kind = SymbolKind::New;
  std::size_t arity = 0;
  TypeExpr denotation;
  /// Argument signature of constructors.
  std::vector<Field> fields;
  /// Evaluated ground term of a symbolic constant.
  std::optional<Term> value;
  /// Compiler-generated symbol hidden from listings (per-clause constants).
  bool internal = false;

  /// The third case of table composition: identical triples, with
  /// denotations compared by type equality and symbolic constants by value.
  bool same_definition(const SymbolEntry& other) const;
  std::string describe() const;
};

/// Partial map from qualified symbols to (kind, arity, denotation) triples.
class SymbolTable : public TypeEnv {
 public:
  using Map = std::map<QualName, SymbolEntry>;

  const SymbolEntry* find(const QualName& name) const;
  bool contains(const QualName& name) const { return find(name) != nullptr; }

  /// Adds `name`; an existing identical definition is kept, a different one
  /// throws a kind-clash error.
  void insert(const QualName& name, SymbolEntry entry);
  void insert_or_assign(const QualName& name, SymbolEntry entry);
  void erase(const QualName& name);

  const Map& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// All symbols with the given base name.
  std::span<const QualName> with_base(const std::string& base) const;

  const std::vector<TypeExpr>* ctor_arg_types(const QualName& name) const override;

  friend bool operator==(const SymbolTable& a, const SymbolTable& b);

 private:
  Map entries_;
  std::map<std::string, std::vector<QualName>> by_base_;
  std::map<QualName, std::vector<TypeExpr>> arg_types_;
};

struct Conflict {
  QualName symbol;
  std::optional<SymbolEntry> first;
  std::optional<SymbolEntry> second;
};

/// Result of ⊕. Conflicting symbols map to ⊥: they are absent from `table`
/// and listed in `conflicts`; `poisoned` remembers them so that further
/// composition keeps them at ⊥.
struct TableComposition {
  SymbolTable table;
  std::vector<Conflict> conflicts;
  std::set<QualName> poisoned;

  bool ok() const { return poisoned.empty(); }
};

TableComposition compose_tables(const SymbolTable& t1, const SymbolTable& t2);
TableComposition compose_tables(const TableComposition& t1, const TableComposition& t2);

/// p ⊑ q: p is empty or a subsequence of q.
bool embeds(std::span<const std::string> p, std::span<const std::string> q);

using SymbolFilter = std::function<bool(const QualName&, const SymbolEntry&)>;

struct LookupResult {
  std::optional<QualName> symbol;
  /// Distinct candidates tied at minimal length (non-empty only on ambiguity).
  std::vector<QualName> ambiguous;

  explicit operator bool() const { return symbol.has_value(); }
};

/// Shortest symbol r⃗q⃗.s of the table with p⃗ ⊑ q⃗, or ⊥ if none exists or
/// two distinct q⃗ tie at the minimal length.
LookupResult lookup(const SymbolTable& table, std::span<const std::string> root, const QualName& name,
                    const SymbolFilter& filter = {});

/// x::t. Every symbol s becomes x.s except variables and new-kind
/// constants; denotations are relabeled with ρ_{ε→x}.
SymbolTable rename_table(const std::string& prefix, const SymbolTable& t);

/// Whether `name` keeps its spelling under renaming in this table.
bool survives_renaming(const SymbolEntry& entry);

/// Sorted `qualifier | name | kind | arity` lines, internal symbols omitted.
std::vector<std::string> table_listing(const SymbolTable& t);

}  // namespace lpmod
