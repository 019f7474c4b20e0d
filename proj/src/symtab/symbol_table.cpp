#include "lpmod/symtab/symbol_table.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

#include "lpmod/diagnostics.hpp"

namespace lpmod {

std::string_view kind_symbol(SymbolKind k) {
  switch (k) {
    case SymbolKind::New:
      return "η";
    case SymbolKind::Derived:
      return "δ";
    case SymbolKind::Union:
      return "μ";
    case SymbolKind::Variable:
      return "ν";
    case SymbolKind::SymConst:
      return "σ";
  }
  return "?";
}

std::string_view kind_word(SymbolKind k) {
  switch (k) {
    case SymbolKind::New:
      return "new";
    case SymbolKind::Derived:
      return "derived";
    case SymbolKind::Union:
      return "union";
    case SymbolKind::Variable:
      return "variable";
    case SymbolKind::SymConst:
      return "symbolic-constant";
  }
  return "?";
}

bool SymbolEntry::same_definition(const SymbolEntry& o) const {
  if (kind != o.kind || arity != o.arity) return false;
  if (kind == SymbolKind::SymConst) return value == o.value;
  if (!type_equal(denotation, o.denotation)) return false;
  if (fields.size() != o.fields.size()) return false;
  for (std::size_t i = 0; i < fields.size(); ++i)
    if (!type_equal(fields[i].type, o.fields[i].type)) return false;
  return true;
}

std::string SymbolEntry::describe() const {
  std::ostringstream os;
  os << '(' << kind_symbol(kind) << ", " << arity << ", ";
  if (kind == SymbolKind::SymConst && value)
    os << *value;
  else if (!fields.empty()) {
    os << '(';
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) os << ", ";
      os << fields[i].type.str();
    }
    os << ')';
  } else {
    os << denotation.str();
  }
  os << ')';
  return os.str();
}

const SymbolEntry* SymbolTable::find(const QualName& name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &it->second;
}

void SymbolTable::insert(const QualName& name, SymbolEntry entry) {
  if (const auto* existing = find(name)) {
    if (existing->same_definition(entry)) return;
    throw Error(code::kKindClash, "symbol " + name.str() + " is defined as " + existing->describe() +
                                      " and as " + entry.describe());
  }
  insert_or_assign(name, std::move(entry));
}

void SymbolTable::insert_or_assign(const QualName& name, SymbolEntry entry) {
  if (!entries_.count(name)) by_base_[name.base].push_back(name);
  if (!entry.fields.empty()) {
    std::vector<TypeExpr> types;
    for (const auto& f : entry.fields) types.push_back(f.type);
    arg_types_[name] = std::move(types);
  } else {
    arg_types_.erase(name);
  }
  entries_.insert_or_assign(name, std::move(entry));
}

void SymbolTable::erase(const QualName& name) {
  if (!entries_.erase(name)) return;
  arg_types_.erase(name);
  auto& v = by_base_[name.base];
  v.erase(std::remove(v.begin(), v.end(), name), v.end());
}

std::span<const QualName> SymbolTable::with_base(const std::string& base) const {
  auto it = by_base_.find(base);
  if (it == by_base_.end()) return {};
  return it->second;
}

const std::vector<TypeExpr>* SymbolTable::ctor_arg_types(const QualName& name) const {
  auto it = arg_types_.find(name);
  return it == arg_types_.end() ? nullptr : &it->second;
}

bool operator==(const SymbolTable& a, const SymbolTable& b) {
  if (a.entries_.size() != b.entries_.size()) return false;
  for (auto ia = a.entries_.begin(), ib = b.entries_.begin(); ia != a.entries_.end(); ++ia, ++ib) {
    if (!(ia->first == ib->first) || !ia->second.same_definition(ib->second)) return false;
  }
  return true;
}

TableComposition compose_tables(const TableComposition& t1, const TableComposition& t2) {
  TableComposition out;
  out.conflicts = t1.conflicts;
  out.conflicts.insert(out.conflicts.end(), t2.conflicts.begin(), t2.conflicts.end());
  out.poisoned = t1.poisoned;
  out.poisoned.insert(t2.poisoned.begin(), t2.poisoned.end());

  auto attempt = [&](const QualName& name, const SymbolEntry& e) {
    if (out.poisoned.count(name)) return;
    const SymbolEntry* existing = out.table.find(name);
    if (!existing) {
      out.table.insert_or_assign(name, e);
    } else if (!existing->same_definition(e)) {
      out.conflicts.push_back(Conflict{name, *existing, e});
      out.poisoned.insert(name);
      out.table.erase(name);
    }
  };
  for (const auto& [name, e] : t1.table.entries()) attempt(name, e);
  for (const auto& [name, e] : t2.table.entries()) attempt(name, e);
  return out;
}

TableComposition compose_tables(const SymbolTable& t1, const SymbolTable& t2) {
  TableComposition a, b;
  a.table = t1;
  b.table = t2;
  return compose_tables(a, b);
}

bool embeds(std::span<const std::string> p, std::span<const std::string> q) {
  std::size_t j = 0;
  for (const auto& sym : p) {
    while (j < q.size() && q[j] != sym) ++j;
    if (j == q.size()) return false;
    ++j;
  }
  return true;
}

LookupResult lookup(const SymbolTable& table, std::span<const std::string> root, const QualName& name,
                    const SymbolFilter& filter) {
  LookupResult result;
  std::size_t best = SIZE_MAX;
  std::vector<QualName> tied;
  for (const auto& candidate : table.with_base(name.base)) {
    if (!candidate.starts_with(root)) continue;
    std::span<const std::string> rest(candidate.qualifiers.data() + root.size(),
                                      candidate.qualifiers.size() - root.size());
    if (!embeds(name.qualifiers, rest)) continue;
    if (filter && !filter(candidate, *table.find(candidate))) continue;
    if (rest.size() < best) {
      best = rest.size();
      tied.assign(1, candidate);
    } else if (rest.size() == best) {
      tied.push_back(candidate);
    }
  }
  if (tied.size() == 1) {
    result.symbol = tied.front();
  } else if (tied.size() > 1) {
    std::sort(tied.begin(), tied.end());
    result.ambiguous = std::move(tied);
  }
  return result;
}

bool survives_renaming(const SymbolEntry& e) {
  return e.kind == SymbolKind::Variable || (e.kind == SymbolKind::New && e.arity == 0);
}

SymbolTable rename_table(const std::string& prefix, const SymbolTable& t) {
  const Qualifiers px{prefix};
  const RelabelingSpec rho{{}, px};
  SymbolTable out;
  for (const auto& [name, e] : t.entries()) {
    SymbolEntry r = e;
    r.denotation = relabel_type(rho, e.denotation);
    for (auto& f : r.fields) f.type = relabel_type(rho, f.type);
    if (r.value) r.value = relabel_term(rho, *r.value);
    QualName renamed = survives_renaming(e) ? name : name.prefixed(px);
    if (out.contains(renamed))
      throw Error(code::kRename, "renaming by " + prefix + " collides on " + renamed.str());
    out.insert_or_assign(renamed, std::move(r));
  }
  return out;
}

std::vector<std::string> table_listing(const SymbolTable& t) {
  std::vector<std::tuple<std::string, std::string, std::string>> rows;
  for (const auto& [name, e] : t.entries()) {
    if (e.internal) continue;
    std::ostringstream tail;
    tail << kind_symbol(e.kind) << " | " << e.arity;
    rows.emplace_back(join_qualifiers(name.qualifiers), name.base, tail.str());
  }
  std::sort(rows.begin(), rows.end());
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& [q, n, tail] : rows) {
    std::string line = q.empty() ? "| " : q + " | ";
    out.push_back(line + n + " | " + tail);
  }
  return out;
}

}  // namespace lpmod
