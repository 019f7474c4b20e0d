#include <algorithm>
#include <cctype>
#include <deque>
#include <sstream>

#include "lpmod/frontend/parser.hpp"
#include "lpmod/modsys/modsys.hpp"

namespace lpmod {

using namespace frontend;

namespace {

using TypeMap = std::map<std::string, TypeExpr>;

bool is_variable_name(std::string_view s) {
  if (s.empty()) return false;
  if (s[0] == '~') return true;
  return std::islower(static_cast<unsigned char>(s[0])) || s[0] == '_';
}

bool ctor_like(const QualName&, const SymbolEntry& e) {
  return (e.kind == SymbolKind::New || e.kind == SymbolKind::Derived) && e.arity > 0;
}

bool constant_like(const QualName&, const SymbolEntry& e) {
  return ((e.kind == SymbolKind::New || e.kind == SymbolKind::Derived) && e.arity == 0) ||
         e.kind == SymbolKind::SymConst;
}

bool type_like(const QualName&, const SymbolEntry& e) {
  return e.kind == SymbolKind::New || e.kind == SymbolKind::Derived || e.kind == SymbolKind::Union;
}

LookupResult resolve_in(const SymbolTable& t, const Qualifiers& root, const QualName& name,
                        const SymbolFilter& filter) {
  if (!root.empty()) {
    LookupResult r = lookup(t, root, name, filter);
    if (r) return r;
  }
  return lookup(t, {}, name, filter);
}

std::string candidates_text(const std::vector<QualName>& qs) {
  std::string out;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    if (i) out += ", ";
    out += qs[i].str();
  }
  return out;
}

[[noreturn]] void unresolved(const std::string& what, const QualName& n, const LookupResult& r,
                             const std::string& path, Span span) {
  std::string msg = "unresolved " + what + " '" + n.str() + "'";
  if (!r.ambiguous.empty()) msg += " (ambiguous: " + candidates_text(r.ambiguous) + ")";
  throw Error(code::kUnresolved, msg, path, span);
}

std::vector<std::string> term_vars(const Term& t) {
  std::vector<std::string> out;
  t.collect_variables(out);
  return out;
}

void comp_vars(const Comprehension& c, std::set<std::string>& out);

void expr_all_vars(const Expr& e, std::set<std::string>& out) {
  switch (e.kind) {
    case Expr::Kind::Term:
      for (auto& v : term_vars(e.term)) out.insert(v);
      break;
    case Expr::Kind::Binary:
      for (const auto& a : e.args) expr_all_vars(a, out);
      break;
    case Expr::Kind::Count:
      comp_vars(*e.comp, out);
      break;
  }
}

void literal_all_vars(const Literal& l, std::set<std::string>& out) {
  for (auto& v : l.visible_variables()) out.insert(v);
  if (l.kind == Literal::Kind::No) comp_vars(*l.comp, out);
  if (l.kind == Literal::Kind::Compare) {
    expr_all_vars(l.lhs, out);
    expr_all_vars(l.rhs, out);
  }
}

void comp_vars(const Comprehension& c, std::set<std::string>& out) {
  for (const auto& h : c.heads)
    for (auto& v : term_vars(h)) out.insert(v);
  for (const auto& d : c.disjuncts)
    for (const auto& l : d) literal_all_vars(l, out);
}

/// Keys a literal reads from the fact store.
std::vector<std::string> keys_of_type(const TypeExpr& t) {
  std::vector<std::string> out;
  for (const auto& c : t.ctors()) out.push_back(c.str());
  for (const auto& k : t.constants())
    if (k.kind() == Term::Kind::Constant) out.push_back(k.name().str());
  return out;
}

bool expr_ready(const Expr& e, const std::set<std::string>& bound) {
  switch (e.kind) {
    case Expr::Kind::Term:
      for (const auto& v : term_vars(e.term))
        if (!bound.count(v)) return false;
      return true;
    case Expr::Kind::Binary:
      return expr_ready(e.args[0], bound) && expr_ready(e.args[1], bound);
    case Expr::Kind::Count:
      for (const auto& v : e.comp->outer)
        if (!bound.count(v)) return false;
      return true;
  }
  return false;
}

std::vector<std::string> unbound_in(const Literal& l, const std::set<std::string>& bound) {
  std::set<std::string> all;
  for (auto& v : l.visible_variables()) all.insert(v);
  if (l.comp)
    for (auto& v : l.comp->outer) all.insert(v);
  std::vector<std::string> out;
  for (const auto& v : all)
    if (!bound.count(v)) out.push_back(v);
  return out;
}

bool filter_ready(const Literal& l, const std::set<std::string>& bound) {
  switch (l.kind) {
    case Literal::Kind::TypeTest:
      return expr_ready(l.lhs, bound);
    case Literal::Kind::Compare:
      return expr_ready(l.lhs, bound) && expr_ready(l.rhs, bound);
    case Literal::Kind::No:
      for (const auto& v : l.comp->outer)
        if (!bound.count(v)) return false;
      return true;
    case Literal::Kind::Project:
      return bound.count(l.source) > 0;
    default:
      return false;
  }
}

/// -1: not a generator now; 0: generator; for `=` also which side is bound.
bool generator_ready(const Literal& l, const std::set<std::string>& bound) {
  switch (l.kind) {
    case Literal::Kind::Atom:
    case Literal::Kind::Member:
      return true;
    case Literal::Kind::Compare:
      if (l.op != "=") return false;
      return (expr_ready(l.lhs, bound) && l.rhs.is_term()) || (expr_ready(l.rhs, bound) && l.lhs.is_term());
    default:
      return false;
  }
}

void bind_literal(const Literal& l, std::set<std::string>& bound) {
  for (auto& v : l.visible_variables()) bound.insert(v);
}

/// Greedy evaluation order: ready filters first, then the first generator.
Conjunction plan(const Conjunction& lits, std::set<std::string>& bound, const std::string& path, Span span) {
  Conjunction out;
  std::vector<bool> used(lits.size(), false);
  while (out.size() < lits.size()) {
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < lits.size() && !pick; ++i)
      if (!used[i] && filter_ready(lits[i], bound)) pick = i;
    for (std::size_t i = 0; i < lits.size() && !pick; ++i)
      if (!used[i] && generator_ready(lits[i], bound)) pick = i;
    if (!pick) {
      for (std::size_t i = 0; i < lits.size(); ++i) {
        if (used[i]) continue;
        auto vs = unbound_in(lits[i], bound);
        std::string names;
        for (std::size_t k = 0; k < vs.size(); ++k) names += (k ? ", " : "") + vs[k];
        throw Error(code::kUnsafe,
                    "unsafe rule: literal '" + lits[i].str() + "' needs unbound variables " + names, path,
                    lits[i].span.line ? lits[i].span : span);
      }
    }
    used[*pick] = true;
    bind_literal(lits[*pick], bound);
    out.push_back(lits[*pick]);
  }
  return out;
}

void constrain(TypeMap& types, const std::string& v, const TypeExpr& t) {
  auto it = types.find(v);
  if (it == types.end())
    types.emplace(v, t);
  else
    it->second = it->second.intersect(t);
}

void infer_pattern(const Term& p, const SymbolTable& table, TypeMap& types) {
  if (p.kind() != Term::Kind::Apply) return;
  const auto* fields = table.ctor_arg_types(p.name());
  if (!fields) return;
  for (std::size_t i = 0; i < p.args().size() && i < fields->size(); ++i) {
    const Term& a = p.args()[i];
    if (a.kind() == Term::Kind::Variable)
      constrain(types, a.text(), (*fields)[i]);
    else
      infer_pattern(a, table, types);
  }
}

TypeExpr literal_type(const Term& t) {
  if (t.kind() == Term::Kind::Apply) return TypeExpr::ctor(t.name());
  return TypeExpr::constant(t);
}

/// Types implied by positive occurrences in one conjunction.
void infer_types(const Conjunction& c, const SymbolTable& table, TypeMap& types) {
  for (const Literal& l : c) {
    switch (l.kind) {
      case Literal::Kind::Atom:
        infer_pattern(l.pattern, table, types);
        break;
      case Literal::Kind::Member:
        if (l.pattern.kind() == Term::Kind::Variable)
          constrain(types, l.pattern.text(), l.type);
        else
          infer_pattern(l.pattern, table, types);
        break;
      case Literal::Kind::TypeTest:
        if (l.lhs.is_term() && l.lhs.term.kind() == Term::Kind::Variable) constrain(types, l.lhs.term.text(), l.type);
        break;
      case Literal::Kind::Compare:
        if (l.op == "=" && l.lhs.is_term() && l.rhs.is_term()) {
          const Term& a = l.lhs.term;
          const Term& b = l.rhs.term;
          for (auto [x, y] : {std::pair{&a, &b}, std::pair{&b, &a}}) {
            if (x->kind() != Term::Kind::Variable) continue;
            if (y->kind() == Term::Kind::Apply) {
              constrain(types, x->text(), TypeExpr::ctor(y->name()));
            } else if (y->is_ground()) {
              constrain(types, x->text(), literal_type(*y));
            }
          }
          infer_pattern(a, table, types);
          infer_pattern(b, table, types);
        }
        break;
      default:
        break;
    }
  }
}

/// Body patterns may only mention constructors their argument types admit.
void check_pattern(const Term& p, const SymbolTable& table, const std::string& path, Span span) {
  if (p.kind() != Term::Kind::Apply) return;
  const auto* fields = table.ctor_arg_types(p.name());
  if (!fields) return;
  for (std::size_t i = 0; i < p.args().size() && i < fields->size(); ++i) {
    const Term& a = p.args()[i];
    const TypeExpr& want = (*fields)[i];
    bool ok = true;
    if (a.kind() == Term::Kind::Apply) {
      ok = is_subtype(TypeExpr::ctor(a.name()), want);
      check_pattern(a, table, path, span);
    } else if (a.is_ground()) {
      ok = want.admits(a);
    }
    if (!ok)
      throw Error(code::kType,
                  "type error: argument " + std::to_string(i + 1) + " of " + p.name().str() + " expects " +
                      want.str() + ", found " + a.str(),
                  path, span);
  }
}

struct PendingProject {
  std::string source;
  std::string field;
  std::string target;
  Span span;
};

class Resolver {
 public:
  explicit Resolver(const ResolveContext& ctx) : ctx_(ctx), table_(*ctx.table) {}

  // ---- phase 1: names ------------------------------------------------

  Term term(const RawExpr& e, const Qualifiers& root) {
    switch (e.kind) {
      case RawExpr::Kind::Integer:
        return Term::integer(BigInt(e.text));
      case RawExpr::Kind::String:
        return Term::string(e.text);
      case RawExpr::Kind::Wildcard:
        return Term::wildcard();
      case RawExpr::Kind::Apply: {
        QualName n = QualName::parse(e.text);
        LookupResult r = resolve_in(table_, root, n, ctor_like);
        if (!r) {
          if (r.ambiguous.empty()) {
            // a known nullary symbol applied to arguments is an arity error
            LookupResult k = resolve_in(table_, root, n, constant_like);
            if (k)
              throw Error(code::kArity,
                          "arity mismatch: " + k.symbol->str() + " takes 0 arguments, given " +
                              std::to_string(e.args.size()),
                          ctx_.path, e.span);
          }
          unresolved("constructor", n, r, ctx_.path, e.span);
        }
        const SymbolEntry* ent = table_.find(*r.symbol);
        if (ent->arity != e.args.size())
          throw Error(code::kArity,
                      "arity mismatch: " + r.symbol->str() + " takes " + std::to_string(ent->arity) +
                          " arguments, given " + std::to_string(e.args.size()),
                      ctx_.path, e.span);
        std::vector<Term> args;
        args.reserve(e.args.size());
        for (const auto& a : e.args) args.push_back(term(a, r.symbol->qualifiers));
        return Term::apply(*r.symbol, std::move(args));
      }
      case RawExpr::Kind::Name:
        return name_term(e, root);
      case RawExpr::Kind::Count:
      case RawExpr::Kind::Binary:
        throw Error(code::kSyntax, "arithmetic and count are only allowed in comparisons", ctx_.path, e.span);
    }
    return {};
  }

  Term name_term(const RawExpr& e, const Qualifiers& root) {
    if (!e.text.empty() && e.text[0] == '~') return Term::variable(e.text);
    QualName n = QualName::parse(e.text);
    LookupResult r = resolve_in(table_, root, n, constant_like);
    if (r) {
      const SymbolEntry* ent = table_.find(*r.symbol);
      if (ent->kind == SymbolKind::SymConst) {
        if (ent->value) return *ent->value;
        throw Error(code::kSymConstUndefined, "symbolic constant '" + r.symbol->str() + "' has no value",
                    ctx_.path, e.span);
      }
      return Term::constant(*r.symbol);
    }
    if (!r.ambiguous.empty()) unresolved("name", n, r, ctx_.path, e.span);
    if (n.is_qualified()) {
      if (n.qualifiers.size() == 1 && is_variable_name(n.qualifiers[0])) {
        note_variable(n.qualifiers[0]);
        return Term::accessor(n.qualifiers[0], n.base);
      }
      if (n.qualifiers.size() > 1 && is_variable_name(n.qualifiers[0]))
        throw Error(code::kAccessor, "nested accessor '" + e.text + "' is not supported", ctx_.path, e.span);
      unresolved("name", n, r, ctx_.path, e.span);
    }
    if (is_variable_name(n.base)) {
      note_variable(n.base);
      return Term::variable(n.base);
    }
    unresolved("name", n, r, ctx_.path, e.span);
  }

  Expr expr(const RawExpr& e) {
    if (e.kind == RawExpr::Kind::Binary) {
      Expr x;
      x.kind = Expr::Kind::Binary;
      x.op = e.op;
      x.args.push_back(expr(e.args[0]));
      x.args.push_back(expr(e.args[1]));
      return x;
    }
    if (e.kind == RawExpr::Kind::Count) {
      Expr x;
      x.kind = Expr::Kind::Count;
      x.comp = comprehension(*e.comp);
      return x;
    }
    return Expr::of(term(e, {}));
  }

  TypeExpr type(const RawTypeExpr& t, Span span) {
    TypeExpr out;
    for (const RawTypeAtom& a : t.atoms) {
      if (a.kind == RawTypeAtom::Kind::ConstSet) {
        for (const RawExpr& c : a.constants) {
          Term k = term(c, {});
          if (!k.is_ground() || k.kind() == Term::Kind::Apply)
            throw Error(code::kType, "constant set member '" + c.text + "' is not a constant", ctx_.path, c.span);
          out = out.unite(TypeExpr::constant(k));
        }
        continue;
      }
      out = out.unite(named_type(a.name, a.span.line ? a.span : span));
    }
    return out;
  }

  TypeExpr named_type(const std::string& name, Span span) {
    QualName n = QualName::parse(name);
    LookupResult r = lookup(table_, {}, n, type_like);
    if (r) {
      const SymbolEntry* ent = table_.find(*r.symbol);
      return ent->denotation;
    }
    if (!n.is_qualified()) {
      if (name == "Integer") return TypeExpr::integers();
      if (name == "String") return TypeExpr::strings();
      if (name == "Boolean") return TypeExpr::booleans();
    }
    unresolved("type", n, r, ctx_.path, span);
  }

  Literal atom_literal(const RawExpr& e, Span span) {
    Literal l;
    l.kind = Literal::Kind::Atom;
    l.span = span;
    l.pattern = term(e, {});
    if (l.pattern.kind() != Term::Kind::Apply && l.pattern.kind() != Term::Kind::Constant)
      throw Error(code::kSyntax, "expected an atom, found '" + l.pattern.str() + "'", ctx_.path, e.span);
    check_pattern(l.pattern, table_, ctx_.path, e.span);
    l.keys = {l.pattern.index_key()};
    return l;
  }

  Literal literal(const RawLiteral& r) {
    Literal l;
    l.span = r.span;
    switch (r.kind) {
      case RawLiteral::Kind::Atom:
        return atom_literal(r.lhs, r.span);
      case RawLiteral::Kind::NoSet:
        l.kind = Literal::Kind::No;
        l.comp = comprehension(*r.comp);
        return l;
      case RawLiteral::Kind::NoAtom: {
        // no A  ==  no { TRUE | A }
        auto c = std::make_shared<Comprehension>();
        c->heads.push_back(Term::boolean(true));
        c->disjuncts.push_back({atom_literal(r.lhs, r.span)});
        l.kind = Literal::Kind::No;
        l.comp = c;
        return l;
      }
      case RawLiteral::Kind::Compare:
        l.kind = Literal::Kind::Compare;
        l.op = r.op;
        l.lhs = expr(r.lhs);
        l.rhs = expr(r.rhs);
        return l;
      case RawLiteral::Kind::TypeTest:
        l.kind = Literal::Kind::TypeTest;
        l.lhs = expr(r.lhs);
        l.type = type(r.type, r.span);
        return l;
      case RawLiteral::Kind::Member:
        l.kind = Literal::Kind::Member;
        l.pattern = term(r.lhs, {});
        l.type = type(r.type, r.span);
        l.keys = keys_of_type(l.type);
        return l;
    }
    return l;
  }

  Conjunction conjunction(const std::vector<RawLiteral>& lits) {
    Conjunction c;
    for (const auto& r : lits) c.push_back(literal(r));
    return c;
  }

  std::shared_ptr<Comprehension> comprehension(const RawComprehension& rc) {
    auto c = std::make_shared<Comprehension>();
    for (const auto& h : rc.heads) c->heads.push_back(term(h, {}));
    for (const auto& d : rc.body.disjuncts) c->disjuncts.push_back(conjunction(d));
    return c;
  }

  Term head(const RawExpr& e) {
    if (e.kind == RawExpr::Kind::Name && e.text.find('.') == std::string::npos) {
      QualName own({ctx_.module}, e.text);
      if (const SymbolEntry* ent = table_.find(own); ent && ent->kind == SymbolKind::Derived && ent->arity == 0)
        return Term::constant(own);
      LookupResult r = lookup(table_, {}, QualName(e.text), [](const QualName&, const SymbolEntry& x) {
        return x.kind == SymbolKind::New && x.arity == 0;
      });
      if (r) return Term::constant(*r.symbol);
      throw Error(code::kUnresolved, "derived constant '" + e.text + "' is not declared", ctx_.path, e.span);
    }
    if (e.kind != RawExpr::Kind::Apply && e.kind != RawExpr::Kind::Name)
      throw Error(code::kSyntax, "rule head must be an atom", ctx_.path, e.span);
    Term t = term(e, {});
    if (t.kind() != Term::Kind::Apply && t.kind() != Term::Kind::Constant)
      throw Error(code::kSyntax, "rule head must be an atom", ctx_.path, e.span);
    if (t.kind() == Term::Kind::Constant) {
      const SymbolEntry* ent = table_.find(t.name());
      if (!ent || ent->kind == SymbolKind::SymConst)
        throw Error(code::kSyntax, "rule head '" + t.str() + "' is not a constructor", ctx_.path, e.span);
    }
    return t;
  }

  // ---- phase 2: scopes, accessors, types, order ----------------------

  struct Scope {
    std::set<std::string> vars;
    TypeMap types;
  };

  Term replace_accessors(const Term& t, std::vector<PendingProject>& out, Span span) {
    switch (t.kind()) {
      case Term::Kind::Accessor: {
        std::string target = "~" + t.text() + "." + t.field() + "#" + std::to_string(++fresh_);
        out.push_back({t.text(), t.field(), target, span});
        return Term::variable(target);
      }
      case Term::Kind::Apply: {
        std::vector<Term> args;
        bool changed = false;
        for (const auto& a : t.args()) {
          args.push_back(replace_accessors(a, out, span));
          changed = changed || !(args.back() == a) || a.kind() == Term::Kind::Accessor;
        }
        return changed ? Term::apply(t.name(), std::move(args)) : t;
      }
      default:
        return t;
    }
  }

  Expr replace_accessors(const Expr& e, std::vector<PendingProject>& out, Span span) {
    Expr x = e;
    if (x.kind == Expr::Kind::Term) x.term = replace_accessors(x.term, out, span);
    if (x.kind == Expr::Kind::Binary)
      for (auto& a : x.args) a = replace_accessors(a, out, span);
    return x;
  }

  Literal resolve_project(const PendingProject& p, const TypeMap& types) {
    std::vector<std::pair<QualName, std::size_t>> hits;
    std::vector<QualName> missing;
    auto it = types.find(p.source);
    bool known = it != types.end() && !it->second.is_any();
    auto field_index = [&](const QualName& c) -> std::optional<std::size_t> {
      const SymbolEntry* ent = table_.find(c);
      if (!ent) return std::nullopt;
      for (std::size_t i = 0; i < ent->fields.size(); ++i)
        if (ent->fields[i].name && *ent->fields[i].name == p.field) return i;
      return std::nullopt;
    };
    if (known) {
      const TypeExpr& t = it->second;
      for (const auto& c : t.ctors()) {
        if (auto i = field_index(c))
          hits.emplace_back(c, *i);
        else
          missing.push_back(c);
      }
      bool non_ctor = !t.constants().empty() || !t.int_ranges().empty() || t.all_strings();
      if (hits.empty() || !missing.empty() || non_ctor)
        throw Error(code::kAccessor,
                    "accessor " + p.source + "." + p.field + ": type " + t.str() + " has no field '" + p.field +
                        "'" + (missing.empty() ? std::string() : " on " + candidates_text(missing)),
                    ctx_.path, p.span);
    } else {
      for (const auto& [name, ent] : table_.entries()) {
        if (ent.kind != SymbolKind::New && ent.kind != SymbolKind::Derived) continue;
        if (auto i = field_index(name)) hits.emplace_back(name, *i);
      }
      if (hits.empty())
        throw Error(code::kAccessor, "accessor " + p.source + "." + p.field + ": no constructor has field '" +
                                         p.field + "'",
                    ctx_.path, p.span);
    }
    if (hits.size() > 1) {
      std::vector<QualName> names;
      for (auto& h : hits) names.push_back(h.first);
      throw Error(code::kAccessor,
                  "ambiguous accessor " + p.source + "." + p.field + " across " + candidates_text(names), ctx_.path,
                  p.span);
    }
    Literal l;
    l.kind = Literal::Kind::Project;
    l.source = p.source;
    l.pattern = Term::variable(p.target);
    l.ctor = hits[0].first;
    l.index = hits[0].second;
    l.span = p.span;
    return l;
  }

  /// Finishes one conjunction. `heads` are rewritten in place when they
  /// contain accessors; `head_projects` come from heads shared by several
  /// disjuncts. Returns the bound variables after planning.
  std::set<std::string> finalize(Conjunction& conj, const Scope& scope, std::vector<Term>& heads,
                                 const std::vector<PendingProject>& head_projects, const std::set<std::string>& bound0,
                                 TypeMap& types_out, Span span) {
    std::vector<PendingProject> projects = head_projects;
    for (Literal& l : conj) {
      switch (l.kind) {
        case Literal::Kind::Atom:
        case Literal::Kind::Member:
          l.pattern = replace_accessors(l.pattern, projects, l.span);
          break;
        case Literal::Kind::Compare:
        case Literal::Kind::TypeTest:
          l.lhs = replace_accessors(l.lhs, projects, l.span);
          l.rhs = replace_accessors(l.rhs, projects, l.span);
          break;
        default:
          break;
      }
    }
    for (auto& h : heads) h = replace_accessors(h, projects, span);

    TypeMap types = scope.types;
    infer_types(conj, table_, types);
    for (const auto& p : projects) {
      Literal pl = resolve_project(p, types);
      const SymbolEntry* ent = table_.find(pl.ctor);
      constrain(types, p.target, ent->fields[pl.index].type);
      conj.push_back(std::move(pl));
    }

    std::set<std::string> visible = scope.vars;
    for (const Literal& l : conj)
      for (auto& v : l.visible_variables()) visible.insert(v);
    for (const auto& h : heads)
      for (auto& v : term_vars(h)) visible.insert(v);

    for (Literal& l : conj) {
      if (l.kind == Literal::Kind::No) l.comp = finalize_comp(*l.comp, visible, types, span);
      if (l.kind == Literal::Kind::Compare) {
        l.lhs = finalize_counts(l.lhs, visible, types, span);
        l.rhs = finalize_counts(l.rhs, visible, types, span);
      }
    }

    std::set<std::string> bound = bound0;
    conj = plan(conj, bound, ctx_.path, span);
    types_out = std::move(types);
    return bound;
  }

  Expr finalize_counts(const Expr& e, const std::set<std::string>& visible, const TypeMap& types, Span span) {
    Expr x = e;
    if (x.kind == Expr::Kind::Count) x.comp = finalize_comp(*x.comp, visible, types, span);
    if (x.kind == Expr::Kind::Binary)
      for (auto& a : x.args) a = finalize_counts(a, visible, types, span);
    return x;
  }

  std::shared_ptr<const Comprehension> finalize_comp(const Comprehension& raw, const std::set<std::string>& visible,
                                                     const TypeMap& types, Span span) {
    auto c = std::make_shared<Comprehension>(raw);
    std::set<std::string> all;
    comp_vars(*c, all);
    for (const auto& v : all)
      if (visible.count(v)) c->outer.push_back(v);
    std::set<std::string> outer(c->outer.begin(), c->outer.end());

    std::vector<PendingProject> head_projects;
    for (auto& h : c->heads) h = replace_accessors(h, head_projects, span);

    Scope inner{visible, types};
    for (auto& d : c->disjuncts) {
      std::vector<Term> no_heads;
      TypeMap t;
      std::set<std::string> bound = finalize(d, inner, no_heads, head_projects, outer, t, span);
      for (const auto& h : c->heads)
        for (const auto& v : term_vars(h))
          if (!bound.count(v))
            throw Error(code::kUnsafe, "unsafe comprehension: head variable " + v + " is not bound by its body",
                        ctx_.path, span);
    }
    return c;
  }

  // ---- heads ---------------------------------------------------------

  Term check_head(const Term& h, const TypeMap& types, Span span) {
    if (h.kind() != Term::Kind::Apply) return h;
    const auto* fields = table_.ctor_arg_types(h.name());
    std::vector<Term> args;
    for (std::size_t i = 0; i < h.args().size(); ++i) {
      const Term& a = h.args()[i];
      const TypeExpr& want = (*fields)[i];
      switch (a.kind()) {
        case Term::Kind::Variable: {
          auto it = types.find(a.text());
          if (it != types.end() && !it->second.is_any() && !is_subtype(it->second, want)) {
            RelabelingSpec rho = infer_rewrite(it->second, want, rewrite_candidates(ctx_.labels), ctx_.path, span);
            args.push_back(Term::relabel(rho, a));
          } else {
            args.push_back(a);
          }
          break;
        }
        case Term::Kind::Wildcard:
          throw Error(code::kUnsafe, "wildcard in rule head " + h.str(), ctx_.path, span);
        case Term::Kind::Apply:
          if (!is_subtype(TypeExpr::ctor(a.name()), want))
            throw Error(code::kType,
                        "type error: argument " + std::to_string(i + 1) + " of " + h.name().str() + " expects " +
                            want.str() + ", found " + a.str(),
                        ctx_.path, span);
          args.push_back(check_head(a, types, span));
          break;
        default:
          if (a.is_ground() && !want.admits(a))
            throw Error(code::kType,
                        "type error: argument " + std::to_string(i + 1) + " of " + h.name().str() + " expects " +
                            want.str() + ", found " + a.str(),
                        ctx_.path, span);
          args.push_back(a);
      }
    }
    return Term::apply(h.name(), std::move(args));
  }

  std::vector<CompiledRule> rules(const std::vector<Term>& raw_heads, const RawBody& body, std::size_t origin,
                                  Span span) {
    std::vector<CompiledRule> out;
    for (const auto& d : body.disjuncts) {
      Conjunction conj = conjunction(d);
      std::vector<Term> heads = raw_heads;
      TypeMap types;
      std::set<std::string> bound = finalize(conj, Scope{}, heads, {}, {}, types, span);
      for (const Term& h : heads) {
        for (const auto& v : term_vars(h))
          if (!bound.count(v))
            throw Error(code::kUnsafe, "unsafe rule: head variable " + v + " of " + h.str() + " is not bound",
                        ctx_.path, span);
        CompiledRule r;
        r.head = check_head(h, types, span);
        r.body = conj;
        r.origin = origin;
        r.module = ctx_.module;
        r.path = ctx_.path;
        r.span = span;
        out.push_back(std::move(r));
      }
    }
    return out;
  }

  CompiledGoal goal(const RawBody& body) {
    CompiledGoal g;
    for (const auto& d : body.disjuncts) {
      Conjunction conj = conjunction(d);
      std::vector<Term> heads;
      TypeMap types;
      finalize(conj, Scope{}, heads, {}, {}, types, {});
      for (const Literal& l : conj)
        for (auto& v : l.visible_variables())
          if (v[0] != '~' && std::find(g.variables.begin(), g.variables.end(), v) == g.variables.end())
            g.variables.push_back(v);
      g.disjuncts.push_back(std::move(conj));
    }
    return g;
  }

 private:
  void note_variable(const std::string& v) {
    if (ctx_.variables && v[0] != '~') ctx_.variables->insert(v);
  }

  const ResolveContext& ctx_;
  const SymbolTable& table_;
  int fresh_ = 0;
};

// ---- kind-clash pre-pass ---------------------------------------------

void argument_names(const RawExpr& e, bool arg, std::set<std::string>& out);

void argument_names(const RawComprehension& c, std::set<std::string>& out);

void argument_names(const RawBody& b, std::set<std::string>& out) {
  for (const auto& d : b.disjuncts) {
    for (const auto& l : d) {
      if (l.comp) argument_names(*l.comp, out);
      bool top_arg = l.kind == RawLiteral::Kind::Compare || l.kind == RawLiteral::Kind::TypeTest ||
                     l.kind == RawLiteral::Kind::Member;
      argument_names(l.lhs, top_arg, out);
      argument_names(l.rhs, top_arg, out);
    }
  }
}

void argument_names(const RawComprehension& c, std::set<std::string>& out) {
  for (const auto& h : c.heads) argument_names(h, true, out);
  argument_names(c.body, out);
}

void argument_names(const RawExpr& e, bool arg, std::set<std::string>& out) {
  if (e.kind == RawExpr::Kind::Name && arg) {
    auto dot = e.text.find('.');
    out.insert(dot == std::string::npos ? e.text : e.text.substr(0, dot));
  }
  if (e.kind == RawExpr::Kind::Count && e.comp) argument_names(*e.comp, out);
  bool nested = e.kind == RawExpr::Kind::Apply || e.kind == RawExpr::Kind::Binary;
  for (const auto& a : e.args) argument_names(a, nested || arg, out);
}

void kind_clash_prepass(const RawRule& rule, const ResolveContext& ctx) {
  std::set<std::string> uses;
  for (const auto& h : rule.heads)
    if (h.kind == RawExpr::Kind::Apply) argument_names(h, false, uses);
  argument_names(rule.body, uses);
  for (const auto& h : rule.heads) {
    if (h.kind != RawExpr::Kind::Name || h.text.find('.') != std::string::npos) continue;
    if (!is_variable_name(h.text)) continue;
    if (uses.count(h.text))
      throw Error(code::kKindClash,
                  "symbol '" + h.text + "' is used both as a variable and a derived-kind constant", ctx.path, h.span);
  }
}

}  // namespace

std::vector<Qualifiers> rewrite_candidates(const std::vector<std::string>& labels) {
  std::vector<Qualifiers> out{{}};
  for (const auto& l : labels) {
    Qualifiers q{l};
    if (std::find(out.begin(), out.end(), q) == out.end()) out.push_back(q);
  }
  return out;
}

std::vector<RelabelingSpec> passing_rewrites(const TypeExpr& rhs, const TypeExpr& lhs,
                                             const std::vector<Qualifiers>& candidates) {
  std::vector<RelabelingSpec> out;
  for (const auto& p : candidates) {
    for (const auto& q : candidates) {
      if (p == q) continue;
      RelabelingSpec rho{p, q};
      if (!relabel_applies(rho, rhs)) continue;
      if (is_subtype(relabel_type(rho, rhs), lhs)) out.push_back(rho);
    }
  }
  return out;
}

RelabelingSpec infer_rewrite(const TypeExpr& rhs, const TypeExpr& lhs, const std::vector<Qualifiers>& candidates,
                             const std::string& path, Span span) {
  auto passing = passing_rewrites(rhs, lhs, candidates);
  if (passing.size() == 1) return passing.front();
  if (passing.empty())
    throw Error(code::kType,
                "type error: a value of type " + rhs.str() + " is used where " + lhs.str() +
                    " is expected, and no relabeling maps one into the other",
                path, span);
  std::string list;
  for (std::size_t i = 0; i < passing.size(); ++i) list += (i ? ", " : "") + passing[i].str();
  throw Error(code::kRewriteAmbiguous,
              "ambiguous rewrite from " + rhs.str() + " to " + lhs.str() + ", passing relabelings: " + list, path, span);
}

std::vector<CompiledRule> resolve_rule_names(const RawRule& rule, const ResolveContext& ctx, std::size_t origin) {
  kind_clash_prepass(rule, ctx);
  Resolver r(ctx);
  std::vector<Term> heads;
  for (const auto& h : rule.heads) heads.push_back(r.head(h));
  return r.rules(heads, rule.body, origin, rule.span);
}

std::vector<CompiledRule> resolve_clause(const RawBody& body, const QualName& symbol, const ResolveContext& ctx,
                                         std::size_t origin, Span span) {
  Resolver r(ctx);
  return r.rules({Term::constant(symbol)}, body, origin, span);
}

CompiledGoal compile_goal(const RawBody& body, const ResolveContext& ctx) {
  Resolver r(ctx);
  return r.goal(body);
}

Term resolve_ground_term(const RawExpr& e, const SymbolTable& table, const std::string& path,
                         const std::function<Term(const QualName&, Span)>& symconst) {
  std::function<Term(const RawExpr&, const Qualifiers&)> go = [&](const RawExpr& x, const Qualifiers& root) -> Term {
    switch (x.kind) {
      case RawExpr::Kind::Integer:
        return Term::integer(BigInt(x.text));
      case RawExpr::Kind::String:
        return Term::string(x.text);
      case RawExpr::Kind::Apply: {
        QualName n = QualName::parse(x.text);
        LookupResult r = resolve_in(table, root, n, ctor_like);
        if (!r) unresolved("constructor", n, r, path, x.span);
        const SymbolEntry* ent = table.find(*r.symbol);
        if (ent->arity != x.args.size())
          throw Error(code::kArity,
                      "arity mismatch: " + r.symbol->str() + " takes " + std::to_string(ent->arity) +
                          " arguments, given " + std::to_string(x.args.size()),
                      path, x.span);
        std::vector<Term> args;
        for (const auto& a : x.args) args.push_back(go(a, r.symbol->qualifiers));
        return Term::apply(*r.symbol, std::move(args));
      }
      case RawExpr::Kind::Name: {
        QualName n = QualName::parse(x.text);
        LookupResult r = resolve_in(table, root, n, constant_like);
        if (r) {
          const SymbolEntry* ent = table.find(*r.symbol);
          if (ent->kind == SymbolKind::SymConst) return symconst(*r.symbol, x.span);
          return Term::constant(*r.symbol);
        }
        if (r.ambiguous.empty() && is_variable_name(n.base) && !n.is_qualified())
          throw Error(code::kSymConstUndefined, "undefined symbolic constant '" + x.text + "'", path, x.span);
        unresolved("name", n, r, path, x.span);
      }
      default:
        throw Error(code::kFact, "facts must be ground terms", path, x.span);
    }
  };
  return go(e, {});
}

}  // namespace lpmod
