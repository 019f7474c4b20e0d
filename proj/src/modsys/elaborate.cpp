#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include "lpmod/frontend/parser.hpp"
#include "lpmod/modsys/modsys.hpp"

namespace lpmod {

using namespace frontend;

namespace {

std::string kind_label(ModuleEnv::Kind k) {
  switch (k) {
    case ModuleEnv::Kind::Domain:
      return "domain";
    case ModuleEnv::Kind::Model:
      return "model";
    case ModuleEnv::Kind::Transform:
      return "transform";
    case ModuleEnv::Kind::System:
      return "transform system";
  }
  return "module";
}

[[noreturn]] void compose_error(const TableComposition& c, const std::string& module, const std::string& path,
                                Span span) {
  std::ostringstream os;
  os << "cannot compose the symbol tables of " << module << ":";
  for (const auto& k : c.conflicts) {
    os << " " << k.symbol.str() << " is " << (k.first ? k.first->describe() : "?") << " and "
       << (k.second ? k.second->describe() : "?") << ";";
  }
  std::string msg = os.str();
  if (!msg.empty() && msg.back() == ';') msg.pop_back();
  throw Error(code::kComposeConflict, msg, path, span);
}

void compose_into(TableComposition& acc, const SymbolTable& t, const std::string& module, const std::string& path,
                  Span span) {
  TableComposition next = compose_tables(acc, TableComposition{t, {}, {}});
  if (!next.ok()) compose_error(next, module, path, span);
  acc = std::move(next);
}

void add_rules(std::vector<CompiledRule>& into, std::set<std::string>& seen, const std::vector<CompiledRule>& rules) {
  for (const auto& r : rules) {
    std::string key = r.str();
    if (seen.insert(key).second) into.push_back(r);
  }
}

SymbolEntry constant_entry(const QualName& n, SymbolKind k, bool internal = false) {
  SymbolEntry e;
  e.kind = k;
  e.arity = 0;
  e.denotation = TypeExpr::constant(Term::constant(n));
  e.internal = internal;
  return e;
}

bool mentions_boolean(const RawExpr& e);

bool mentions_boolean(const RawTypeExpr& t) {
  for (const auto& a : t.atoms) {
    if (a.kind == RawTypeAtom::Kind::Name && a.name == "Boolean") return true;
    for (const auto& c : a.constants)
      if (mentions_boolean(c)) return true;
  }
  return false;
}

bool mentions_boolean(const RawBody& b);

bool mentions_boolean(const RawExpr& e) {
  if ((e.kind == RawExpr::Kind::Name || e.kind == RawExpr::Kind::Apply) && (e.text == "TRUE" || e.text == "FALSE"))
    return true;
  for (const auto& a : e.args)
    if (mentions_boolean(a)) return true;
  if (e.comp) {
    for (const auto& h : e.comp->heads)
      if (mentions_boolean(h)) return true;
    if (mentions_boolean(e.comp->body)) return true;
  }
  return false;
}

bool mentions_boolean(const RawBody& b) {
  for (const auto& d : b.disjuncts)
    for (const auto& l : d) {
      if (mentions_boolean(l.lhs) || mentions_boolean(l.rhs) || mentions_boolean(l.type)) return true;
      if (l.comp) {
        for (const auto& h : l.comp->heads)
          if (mentions_boolean(h)) return true;
        if (mentions_boolean(l.comp->body)) return true;
      }
    }
  return false;
}

bool mentions_boolean(const RawItem& item) {
  return std::visit(
      [](const auto& it) -> bool {
        using T = std::decay_t<decltype(it)>;
        if constexpr (std::is_same_v<T, TypeDecl>) {
          if (mentions_boolean(it.union_type)) return true;
          for (const auto& f : it.fields)
            if (mentions_boolean(f.type)) return true;
          return false;
        } else if constexpr (std::is_same_v<T, RawRule>) {
          for (const auto& h : it.heads)
            if (mentions_boolean(h)) return true;
          return mentions_boolean(it.body);
        } else if constexpr (std::is_same_v<T, RawClause>) {
          return mentions_boolean(it.body);
        } else if constexpr (std::is_same_v<T, RawFact> || std::is_same_v<T, SymConstDef>) {
          return mentions_boolean(it.term);
        } else {
          return false;
        }
      },
      item);
}

/// Module-local declarations: ADTs, constants, derived constants and the
/// clauses of a domain or transform body.
class BodyElaborator {
 public:
  BodyElaborator(std::string module, std::string path, const SymbolTable& imported, std::vector<std::string> labels)
      : module_(std::move(module)), path_(std::move(path)), imported_(imported), labels_(std::move(labels)) {
    work_ = imported;
  }

  /// Declares types and constants. Returns the fun declarations in order,
  /// keyed by item index.
  void declarations(const std::vector<RawItem>& items) {
    bool boolean = false;
    for (const auto& it : items) boolean = boolean || mentions_boolean(it);
    if (boolean) {
      for (const char* b : {"TRUE", "FALSE"}) declare(QualName(b), constant_entry(QualName(b), SymbolKind::New), {});
    }

    std::vector<const TypeDecl*> decls;
    for (const auto& it : items)
      if (const auto* t = std::get_if<TypeDecl>(&it)) decls.push_back(t);

    // names first, so declarations may refer to each other in any order
    for (const TypeDecl* t : decls) {
      SymbolEntry e;
      QualName n(t->name);
      if (t->form == TypeDecl::Form::Union) {
        e.kind = SymbolKind::Union;
        e.arity = 0;
      } else {
        if (t->fields.empty()) throw Error(code::kSyntax, "constructor " + t->name + " needs arguments", path_, t->span);
        e.kind = t->marker == TypeDecl::Marker::None ? SymbolKind::Derived : SymbolKind::New;
        e.arity = t->fields.size();
        e.denotation = TypeExpr::ctor(n);
      }
      if (own_.count(n))
        throw Error(code::kDuplicateModule, "type " + t->name + " is declared twice in " + module_, path_, t->span);
      own_.insert(n);
      work_.insert_or_assign(n, e);
      check_fun(*t);
    }

    // constants named in constant sets
    std::function<void(const RawTypeExpr&)> constants = [&](const RawTypeExpr& te) {
      for (const auto& a : te.atoms) {
        if (a.kind != RawTypeAtom::Kind::ConstSet) continue;
        for (const auto& c : a.constants) {
          if (c.kind != RawExpr::Kind::Name) continue;
          QualName n = QualName::parse(c.text);
          LookupResult r = lookup(work_, {}, n, [](const QualName&, const SymbolEntry& x) {
            return x.arity == 0 && (x.kind == SymbolKind::New || x.kind == SymbolKind::Derived);
          });
          if (r) continue;
          if (n.is_qualified()) throw Error(code::kUnresolved, "unresolved constant '" + c.text + "'", path_, c.span);
          declare(n, constant_entry(n, SymbolKind::New), c.span);
        }
      }
    };
    for (const TypeDecl* t : decls) {
      constants(t->union_type);
      for (const auto& f : t->fields) constants(f.type);
    }

    // union denotations by iteration to a fixpoint
    std::vector<const TypeDecl*> unions;
    for (const TypeDecl* t : decls)
      if (t->form == TypeDecl::Form::Union) unions.push_back(t);
    bool changed = true;
    std::size_t rounds = 0;
    while (changed) {
      changed = false;
      for (const TypeDecl* u : unions) {
        TypeExpr d = resolve_type(u->union_type, u->span);
        SymbolEntry e = *work_.find(QualName(u->name));
        if (!(e.denotation == d)) {
          e.denotation = d;
          work_.insert_or_assign(QualName(u->name), e);
          changed = true;
        }
      }
      if (++rounds > unions.size() + 2) break;
    }

    for (const TypeDecl* t : decls) {
      if (t->form != TypeDecl::Form::Ctor) continue;
      SymbolEntry e = *work_.find(QualName(t->name));
      e.fields.clear();
      for (const auto& f : t->fields) e.fields.push_back(Field{f.name, resolve_type(f.type, f.span)});
      work_.insert_or_assign(QualName(t->name), e);
    }
    for (const TypeDecl* t : decls) own_table_.insert_or_assign(QualName(t->name), *work_.find(QualName(t->name)));
  }

  /// Pre-registers D.q for every bare head q that is not a new-kind constant.
  void derived_constants(const std::vector<RawItem>& items) {
    for (const auto& it : items) {
      const auto* r = std::get_if<RawRule>(&it);
      if (!r) continue;
      for (const auto& h : r->heads) {
        if (h.kind != RawExpr::Kind::Name || h.text.find('.') != std::string::npos) continue;
        LookupResult k = lookup(work_, {}, QualName(h.text), [](const QualName&, const SymbolEntry& x) {
          return x.kind == SymbolKind::New && x.arity == 0;
        });
        if (k) continue;
        QualName n({module_}, h.text);
        declare(n, constant_entry(n, SymbolKind::Derived), h.span);
      }
    }
  }

  QualName goal(const std::string& base, bool internal = false) {
    QualName n({module_}, base);
    declare(n, constant_entry(n, SymbolKind::Derived, internal), {});
    return n;
  }

  ResolveContext context() {
    ResolveContext ctx;
    ctx.table = &work_;
    ctx.module = module_;
    ctx.path = path_;
    ctx.labels = labels_;
    ctx.variables = &variables_;
    return ctx;
  }

  void add_variables() {
    for (const auto& v : variables_) {
      SymbolEntry e;
      e.kind = SymbolKind::Variable;
      e.denotation = TypeExpr::any_term();
      QualName n(v);
      if (const SymbolEntry* existing = work_.find(n); existing && existing->kind != SymbolKind::Variable)
        throw Error(code::kKindClash, "symbol '" + v + "' is used both as a variable and as " + existing->describe(),
                    path_);
      own_table_.insert_or_assign(n, e);
      work_.insert_or_assign(n, e);
    }
  }

  /// own ⊕ imported.
  SymbolTable final_table(Span span) {
    TableComposition acc{imported_, {}, {}};
    compose_into(acc, own_table_, module_, path_, span);
    return acc.table;
  }

  const SymbolTable& work() const { return work_; }

 private:
  void check_fun(const TypeDecl& t) {
    if (t.marker == TypeDecl::Marker::Fun) {
      if (!t.arrow)
        throw Error(code::kFun, "fun declaration " + t.name + " needs '->' between its domain and range", path_,
                    t.span);
      if (*t.arrow == 0 || *t.arrow >= t.fields.size())
        throw Error(code::kFun, "fun declaration " + t.name + " needs arguments on both sides of '->'", path_, t.span);
    } else if (t.arrow) {
      throw Error(code::kFun, "'->' is only allowed in fun declarations (" + t.name + ")", path_, t.span);
    }
  }

  void declare(const QualName& n, SymbolEntry e, Span span) {
    if (const SymbolEntry* existing = work_.find(n)) {
      if (existing->same_definition(e)) {
        own_table_.insert_or_assign(n, *existing);
        return;
      }
      throw Error(code::kKindClash, "symbol " + n.str() + " is already " + existing->describe(), path_, span);
    }
    own_table_.insert_or_assign(n, e);
    work_.insert_or_assign(n, e);
  }

  TypeExpr resolve_type(const RawTypeExpr& t, Span span) {
    TypeExpr out;
    for (const auto& a : t.atoms) {
      if (a.kind == RawTypeAtom::Kind::ConstSet) {
        for (const auto& c : a.constants) {
          switch (c.kind) {
            case RawExpr::Kind::Integer:
              out = out.unite(TypeExpr::constant(Term::integer(BigInt(c.text))));
              break;
            case RawExpr::Kind::String:
              out = out.unite(TypeExpr::constant(Term::string(c.text)));
              break;
            default: {
              LookupResult r = lookup(work_, {}, QualName::parse(c.text), [](const QualName&, const SymbolEntry& x) {
                return x.arity == 0 && (x.kind == SymbolKind::New || x.kind == SymbolKind::Derived);
              });
              if (!r) throw Error(code::kUnresolved, "unresolved constant '" + c.text + "'", path_, c.span);
              out = out.unite(TypeExpr::constant(Term::constant(*r.symbol)));
            }
          }
        }
        continue;
      }
      QualName n = QualName::parse(a.name);
      LookupResult r = lookup(work_, {}, n, [](const QualName&, const SymbolEntry& x) {
        return x.kind == SymbolKind::New || x.kind == SymbolKind::Derived || x.kind == SymbolKind::Union;
      });
      if (r) {
        out = out.unite(work_.find(*r.symbol)->denotation);
        continue;
      }
      if (!n.is_qualified() && r.ambiguous.empty()) {
        if (a.name == "Integer") {
          out = out.unite(TypeExpr::integers());
          continue;
        }
        if (a.name == "String") {
          out = out.unite(TypeExpr::strings());
          continue;
        }
        if (a.name == "Boolean") {
          out = out.unite(TypeExpr::booleans());
          continue;
        }
      }
      std::string msg = "unresolved type '" + a.name + "'";
      if (!r.ambiguous.empty()) {
        msg += " (ambiguous:";
        for (const auto& q : r.ambiguous) msg += " " + q.str();
        msg += ")";
      }
      throw Error(code::kUnresolved, msg, path_, a.span.line ? a.span : span);
    }
    return out;
  }

  std::string module_;
  std::string path_;
  SymbolTable imported_;
  std::vector<std::string> labels_;
  SymbolTable work_;
  SymbolTable own_table_;
  std::set<QualName> own_;
  std::set<std::string> variables_;
};

ClauseInfo make_clause(ClauseInfo::Kind kind, const QualName& symbol, const std::string& module, std::size_t index,
                       std::string text, const std::string& path, Span span, const std::vector<CompiledRule>& rules) {
  ClauseInfo c;
  c.kind = kind;
  c.symbol = symbol;
  c.module = module;
  c.index = index;
  c.text = std::move(text);
  c.path = path;
  c.span = span;
  if (!rules.empty()) {
    for (const Literal& l : rules.front().body) {
      if (l.kind == Literal::Kind::No && l.comp->outer.empty()) {
        c.witness = l.comp;
        break;
      }
    }
  }
  return c;
}

CompiledRule conjunction_rule(const QualName& head, const std::vector<QualName>& parts, const std::string& module,
                              const std::string& path, Span span) {
  CompiledRule r;
  r.head = Term::constant(head);
  for (const auto& p : parts) {
    Literal l;
    l.kind = Literal::Kind::Atom;
    l.pattern = Term::constant(p);
    l.keys = {l.pattern.index_key()};
    r.body.push_back(l);
  }
  r.module = module;
  r.path = path;
  r.span = span;
  return r;
}

struct ClauseBuild {
  std::vector<CompiledRule> rules;
  std::vector<ClauseInfo> clauses;
  std::vector<QualName> symbols;
};

/// Compiles rules and the clauses of one kind, each clause as its own
/// internal constant `M.<word><i>`.
void compile_items(const std::vector<RawItem>& items, BodyElaborator& body, const std::string& module,
                   const std::string& path, std::map<RawClause::Kind, ClauseBuild>& clauses,
                   std::vector<CompiledRule>& rules, bool allow_fun_clause) {
  ResolveContext ctx = body.context();
  std::map<RawClause::Kind, std::size_t> counters;
  auto word = [](RawClause::Kind k) {
    return k == RawClause::Kind::Conforms ? "conforms" : k == RawClause::Kind::Requires ? "requires" : "ensures";
  };
  auto ckind = [](RawClause::Kind k) {
    return k == RawClause::Kind::Conforms   ? ClauseInfo::Kind::Conforms
           : k == RawClause::Kind::Requires ? ClauseInfo::Kind::Requires
                                            : ClauseInfo::Kind::Ensures;
  };
  for (std::size_t i = 0; i < items.size(); ++i) {
    const RawItem& it = items[i];
    if (const auto* r = std::get_if<RawRule>(&it)) {
      auto rs = resolve_rule_names(*r, ctx, i);
      rules.insert(rules.end(), rs.begin(), rs.end());
    } else if (const auto* c = std::get_if<RawClause>(&it)) {
      std::size_t n = ++counters[c->kind];
      QualName sym = body.goal(std::string(word(c->kind)) + std::to_string(n), true);
      auto rs = resolve_clause(c->body, sym, ctx, i, c->span);
      ClauseBuild& b = clauses[c->kind];
      b.clauses.push_back(make_clause(ckind(c->kind), sym, module, n, print_body(c->body), path, c->span, rs));
      b.symbols.push_back(sym);
      b.rules.insert(b.rules.end(), rs.begin(), rs.end());
    } else if (const auto* t = std::get_if<TypeDecl>(&it)) {
      if (t->marker != TypeDecl::Marker::Fun) continue;
      if (!allow_fun_clause)
        throw Error(code::kFun, "fun declarations are only allowed in domains", path, t->span);
      std::size_t n = ++counters[RawClause::Kind::Conforms];
      QualName sym = body.goal("conforms" + std::to_string(n), true);
      CompiledRule r = desugar_fun(QualName(t->name), t->fields.size(), *t->arrow, sym);
      r.origin = i;
      r.module = module;
      r.path = path;
      r.span = t->span;
      ClauseBuild& b = clauses[RawClause::Kind::Conforms];
      b.clauses.push_back(make_clause(ClauseInfo::Kind::Conforms, sym, module, n, "fun " + t->name, path, t->span,
                                      {r}));
      b.symbols.push_back(sym);
      b.rules.push_back(r);
    }
  }
}

std::string dotted(const std::optional<std::string>& prefix, const std::string& name) {
  return prefix ? *prefix + "." + name : name;
}

}  // namespace

// ---- domains -------------------------------------------------------------

DomainRef elaborate_domain(const RawModuleDecl& raw, ModuleEnv& env) {
  auto d = std::make_shared<CompiledDomain>();
  d->name = raw.name;
  d->path = raw.path;
  d->span = raw.span;
  d->lineage.insert(raw.name);

  TableComposition acc;
  std::vector<CompiledRule> rules;
  std::set<std::string> seen_rules;
  std::vector<ClauseInfo> inherited;
  std::vector<QualName> extends_goals;

  for (const Import& im : raw.imports) {
    DomainRef base = env.domain(im.target);
    SymbolTable t = im.prefix ? rename_table(*im.prefix, base->table()) : base->table();
    compose_into(acc, t, raw.name, raw.path, im.span);
    std::vector<CompiledRule> rs;
    for (const auto& r : base->program.rules)
      rs.push_back(im.prefix ? rename_rule(*im.prefix, r, base->table()) : r);
    add_rules(rules, seen_rules, rs);
    for (const auto& l : base->lineage) d->lineage.insert(dotted(im.prefix, l));
    if (im.prefix && std::find(d->labels.begin(), d->labels.end(), *im.prefix) == d->labels.end())
      d->labels.push_back(*im.prefix);
    if (im.mode == Import::Mode::Extends) {
      extends_goals.push_back(im.prefix ? base->conforms_goal.prefixed(Qualifiers{*im.prefix}) : base->conforms_goal);
      for (const auto& c : base->program.clauses)
        inherited.push_back(im.prefix ? rename_clause(*im.prefix, c, base->table()) : c);
    }
  }

  for (const auto& it : raw.body) {
    if (const auto* c = std::get_if<RawClause>(&it); c && c->kind != RawClause::Kind::Conforms)
      throw Error(code::kSyntax, "requires and ensures clauses are only allowed in transforms", raw.path, c->span);
    if (std::holds_alternative<RawFact>(it) || std::holds_alternative<SymConstDef>(it) ||
        std::holds_alternative<PipelineEq>(it))
      throw Error(code::kSyntax, "domains contain declarations, rules and conforms clauses only", raw.path, raw.span);
  }

  BodyElaborator body(raw.name, raw.path, acc.table, d->labels);
  body.declarations(raw.body);
  body.derived_constants(raw.body);
  d->conforms_goal = body.goal("conforms");

  std::map<RawClause::Kind, ClauseBuild> clauses;
  std::vector<CompiledRule> own;
  compile_items(raw.body, body, raw.name, raw.path, clauses, own, true);
  ClauseBuild& cb = clauses[RawClause::Kind::Conforms];
  if (!extends_goals.empty()) {
    std::size_t n = cb.clauses.size() + 1;
    QualName sym = body.goal("conforms" + std::to_string(n), true);
    CompiledRule r = conjunction_rule(sym, extends_goals, raw.name, raw.path, raw.span);
    r.origin = raw.body.size();
    std::string text;
    for (std::size_t i = 0; i < extends_goals.size(); ++i) text += (i ? ", " : "") + extends_goals[i].str();
    cb.clauses.push_back(
        make_clause(ClauseInfo::Kind::Conforms, sym, raw.name, n, text, raw.path, raw.span, {r}));
    cb.symbols.push_back(sym);
    cb.rules.push_back(r);
  }
  own.insert(own.end(), cb.rules.begin(), cb.rules.end());
  own.push_back(conjunction_rule(d->conforms_goal, cb.symbols, raw.name, raw.path, raw.span));
  body.add_variables();

  d->program.table = body.final_table(raw.span);
  add_rules(rules, seen_rules, own);
  d->program.rules = std::move(rules);
  d->program.clauses = cb.clauses;
  d->program.clauses.insert(d->program.clauses.end(), inherited.begin(), inherited.end());
  stratify(d->program, raw.path);
  return d;
}

// ---- models ----------------------------------------------------------------

ModelRef elaborate_model(const RawModuleDecl& raw, ModuleEnv& env) {
  auto m = std::make_shared<CompiledModel>();
  m->name = raw.name;
  m->path = raw.path;
  m->span = raw.span;

  const Import* of = nullptr;
  for (const Import& im : raw.imports)
    if (im.mode == Import::Mode::Of) of = &im;
  if (!of) throw Error(code::kSyntax, "model " + raw.name + " needs an 'of' domain", raw.path, raw.span);
  m->domain = env.domain(of->target);

  TableComposition acc{m->domain->table(), {}, {}};
  for (const Import& im : raw.imports) {
    if (im.mode != Import::Mode::Includes) continue;
    ModelRef inc = env.model(im.target);
    std::string expected = dotted(im.prefix, inc->domain->name);
    if (!m->domain->lineage.count(expected))
      throw Error(code::kDomainMismatch,
                  "model " + raw.name + " includes " + dotted(im.prefix, inc->name) + " over " + expected +
                      ", which domain " + m->domain->name + " does not include",
                  raw.path, im.span);
    SymbolTable t = im.prefix ? rename_table(*im.prefix, inc->table) : inc->table;
    compose_into(acc, t, raw.name, raw.path, im.span);
    RelabelingSpec rho{{}, im.prefix ? Qualifiers{*im.prefix} : Qualifiers{}};
    for (const auto& f : inc->facts) m->facts.insert(im.prefix ? relabel_term(rho, f) : f);
    for (const auto& [k, v] : inc->symconsts)
      m->symconsts.emplace(im.prefix ? k.prefixed(Qualifiers{*im.prefix}) : k, im.prefix ? relabel_term(rho, v) : v);
  }

  // symbolic constants, evaluated on demand in dependency order
  std::map<QualName, const SymConstDef*> defs;
  SymbolTable work = acc.table;
  for (const auto& it : raw.body) {
    if (const auto* s = std::get_if<SymConstDef>(&it)) {
      QualName n({raw.name}, s->name);
      if (!defs.emplace(n, s).second)
        throw Error(code::kKindClash, "symbolic constant " + s->name + " is defined twice", raw.path, s->span);
      SymbolEntry e;
      e.kind = SymbolKind::SymConst;
      e.denotation = TypeExpr::any_term();
      if (work.contains(n))
        throw Error(code::kKindClash, "symbolic constant " + n.str() + " is already defined", raw.path, s->span);
      work.insert_or_assign(n, e);
    } else if (!std::holds_alternative<RawFact>(it)) {
      throw Error(code::kSyntax, "models contain facts and symbolic constants only", raw.path, raw.span);
    }
  }

  std::map<QualName, Term> values;
  std::vector<QualName> active;
  const SymbolTable& table = work;

  auto check_fact = [&](const Term& f, Span span) {
    if (f.kind() != Term::Kind::Apply && f.kind() != Term::Kind::Constant)
      throw Error(code::kFact, "fact " + f.str() + " is not a constructor term", raw.path, span);
    const SymbolEntry* e = table.find(f.name());
    if (!e || e->kind != SymbolKind::New)
      throw Error(code::kFact, "fact " + f.str() + " must have a new-kind outer constructor", raw.path, span);
    TypeExpr want = f.kind() == Term::Kind::Apply ? TypeExpr::ctor(f.name()) : TypeExpr::constant(f);
    if (!is_member(f, want, table)) throw Error(code::kFact, "ill-typed fact " + f.str(), raw.path, span);
  };

  std::function<Term(const QualName&, Span)> value_of = [&](const QualName& n, Span use) -> Term {
    if (auto it = values.find(n); it != values.end()) return it->second;
    auto d = defs.find(n);
    if (d == defs.end()) {
      const SymbolEntry* e = table.find(n);
      if (e && e->value) return *e->value;
      throw Error(code::kSymConstUndefined, "undefined symbolic constant '" + n.str() + "'", raw.path, use);
    }
    if (std::find(active.begin(), active.end(), n) != active.end()) {
      std::string cycle;
      for (auto it = std::find(active.begin(), active.end(), n); it != active.end(); ++it) cycle += it->str() + " -> ";
      throw Error(code::kSymConstCycle, "cyclic symbolic constants: " + cycle + n.str(), raw.path, d->second->span);
    }
    active.push_back(n);
    Term v = resolve_ground_term(d->second->term, table, raw.path, value_of);
    active.pop_back();
    values.emplace(n, v);
    return v;
  };

  SymbolTable own;
  for (const auto& [n, s] : defs) {
    Term v = value_of(n, s->span);
    check_fact(v, s->span);
    m->facts.insert(v);
    m->symconsts[n] = v;
    SymbolEntry e;
    e.kind = SymbolKind::SymConst;
    e.denotation = v.kind() == Term::Kind::Apply ? TypeExpr::ctor(v.name()) : TypeExpr::constant(v);
    e.value = v;
    own.insert_or_assign(n, e);
  }
  for (const auto& it : raw.body) {
    if (const auto* f = std::get_if<RawFact>(&it)) {
      Term t = resolve_ground_term(f->term, table, raw.path, value_of);
      check_fact(t, f->span);
      m->facts.insert(t);
    }
  }
  compose_into(acc, own, raw.name, raw.path, raw.span);
  m->table = acc.table;
  return m;
}

// ---- transforms ----------------------------------------------------------

namespace {

void signature(const RawModuleDecl& raw, ModuleEnv& env, std::vector<SignatureEntry>& inputs,
               std::vector<SignatureEntry>& outputs) {
  std::set<std::string> labels;
  for (const Import& im : raw.imports) {
    if (im.mode != Import::Mode::Input && im.mode != Import::Mode::Output) continue;
    if (!labels.insert(*im.prefix).second)
      throw Error(code::kSignature, "signature label '" + *im.prefix + "' of " + raw.name + " is not distinct",
                  raw.path, im.span);
    SignatureEntry e{*im.prefix, env.domain(im.target)};
    (im.mode == Import::Mode::Input ? inputs : outputs).push_back(e);
  }
  if (inputs.empty() || outputs.empty())
    throw Error(code::kSignature, raw.name + " needs input and output signatures", raw.path, raw.span);
}

}  // namespace

TransformRef elaborate_transform(const RawModuleDecl& raw, ModuleEnv& env) {
  auto t = std::make_shared<CompiledTransform>();
  t->name = raw.name;
  t->path = raw.path;
  t->span = raw.span;
  signature(raw, env, t->inputs, t->outputs);

  TableComposition acc;
  std::vector<CompiledRule> rules;
  std::set<std::string> seen_rules;
  std::vector<std::string> labels;
  for (const auto* side : {&t->inputs, &t->outputs}) {
    for (const auto& s : *side) {
      compose_into(acc, rename_table(s.label, s.domain->table()), raw.name, raw.path, raw.span);
      std::vector<CompiledRule> rs;
      for (const auto& r : s.domain->program.rules) rs.push_back(rename_rule(s.label, r, s.domain->table()));
      add_rules(rules, seen_rules, rs);
      labels.push_back(s.label);
    }
  }

  for (const auto& it : raw.body) {
    if (const auto* c = std::get_if<RawClause>(&it); c && c->kind == RawClause::Kind::Conforms)
      throw Error(code::kSyntax, "conforms clauses are only allowed in domains", raw.path, c->span);
    if (!std::holds_alternative<RawClause>(it) && !std::holds_alternative<RawRule>(it) &&
        !std::holds_alternative<TypeDecl>(it))
      throw Error(code::kSyntax, "transforms contain declarations, rules and contracts only", raw.path, raw.span);
  }

  BodyElaborator body(raw.name, raw.path, acc.table, labels);
  body.declarations(raw.body);
  body.derived_constants(raw.body);
  t->requires_goal = body.goal("requires");
  t->ensures_goal = body.goal("ensures");

  std::map<RawClause::Kind, ClauseBuild> clauses;
  std::vector<CompiledRule> own;
  compile_items(raw.body, body, raw.name, raw.path, clauses, own, false);
  for (auto [kind, goal] : {std::pair{RawClause::Kind::Requires, t->requires_goal},
                            std::pair{RawClause::Kind::Ensures, t->ensures_goal}}) {
    ClauseBuild& cb = clauses[kind];
    own.insert(own.end(), cb.rules.begin(), cb.rules.end());
    own.push_back(conjunction_rule(goal, cb.symbols, raw.name, raw.path, raw.span));
    t->program.clauses.insert(t->program.clauses.end(), cb.clauses.begin(), cb.clauses.end());
  }
  body.add_variables();
  t->program.table = body.final_table(raw.span);
  add_rules(rules, seen_rules, own);
  t->program.rules = std::move(rules);
  stratify(t->program, raw.path);
  return t;
}

// ---- transform systems -----------------------------------------------------

SystemRef elaborate_system(const RawModuleDecl& raw, ModuleEnv& env) {
  auto s = std::make_shared<CompiledSystem>();
  s->name = raw.name;
  s->path = raw.path;
  s->span = raw.span;
  signature(raw, env, s->inputs, s->outputs);

  std::map<std::string, DomainRef> defined;
  for (const auto& in : s->inputs) defined[in.label] = in.domain;
  std::set<std::string> output_labels;
  for (const auto& out : s->outputs) output_labels.insert(out.label);

  std::vector<PipelineStep> steps;
  std::map<std::string, std::size_t> producer;
  for (const auto& it : raw.body) {
    const auto* eq = std::get_if<PipelineEq>(&it);
    if (!eq) throw Error(code::kSyntax, "transform systems contain pipeline equations only", raw.path, raw.span);
    PipelineStep st;
    st.outputs = eq->lhs;
    st.callee = eq->callee;
    st.args = eq->args;
    st.span = eq->span;
    auto kind = env.kind_of(eq->callee);
    std::vector<SignatureEntry> ins, outs;
    if (kind == ModuleEnv::Kind::Transform) {
      TransformRef t = env.transform(eq->callee);
      st.target = t;
      ins = t->inputs;
      outs = t->outputs;
    } else if (kind == ModuleEnv::Kind::System) {
      SystemRef sub = env.system(eq->callee);
      st.target = sub;
      ins = sub->inputs;
      outs = sub->outputs;
    } else {
      throw Error(code::kUnknownModule, "unknown transform '" + eq->callee + "'", raw.path, eq->span);
    }
    if (ins.size() != st.args.size())
      throw Error(code::kArity,
                  eq->callee + " takes " + std::to_string(ins.size()) + " inputs, given " +
                      std::to_string(st.args.size()),
                  raw.path, eq->span);
    if (outs.size() != st.outputs.size())
      throw Error(code::kArity,
                  eq->callee + " returns " + std::to_string(outs.size()) + " outputs, bound to " +
                      std::to_string(st.outputs.size()),
                  raw.path, eq->span);
    for (std::size_t i = 0; i < st.outputs.size(); ++i) {
      const auto& v = st.outputs[i];
      if (defined.count(v) || producer.count(v))
        throw Error(code::kPipeline, "pipeline variable '" + v + "' is defined more than once", raw.path, eq->span);
      producer[v] = steps.size();
      defined[v] = outs[i].domain;
    }
    steps.push_back(std::move(st));
  }

  // unbound arguments and domain agreement
  auto compatible = [](const DomainRef& have, const DomainRef& want) { return have->lineage.count(want->name) > 0; };
  for (const auto& st : steps) {
    std::vector<SignatureEntry> ins = std::holds_alternative<TransformRef>(st.target)
                                          ? std::get<TransformRef>(st.target)->inputs
                                          : std::get<SystemRef>(st.target)->inputs;
    for (std::size_t i = 0; i < st.args.size(); ++i) {
      auto d = defined.find(st.args[i]);
      if (d == defined.end())
        throw Error(code::kPipeline, "pipeline variable '" + st.args[i] + "' is never defined", raw.path, st.span);
      if (!compatible(d->second, ins[i].domain))
        throw Error(code::kDomainMismatch,
                    "argument " + st.args[i] + " of " + st.callee + " is over " + d->second->name + ", expected " +
                        ins[i].domain->name,
                    raw.path, st.span);
    }
  }
  for (const auto& out : s->outputs) {
    auto d = defined.find(out.label);
    if (d == defined.end() || !producer.count(out.label))
      throw Error(code::kPipeline, "system output '" + out.label + "' is never defined", raw.path, raw.span);
    if (!compatible(d->second, out.domain))
      throw Error(code::kDomainMismatch,
                  "output " + out.label + " is over " + d->second->name + ", expected " + out.domain->name, raw.path,
                  raw.span);
  }

  // topological order; leftovers form a cycle
  std::vector<std::size_t> indegree(steps.size(), 0);
  std::vector<std::vector<std::size_t>> users(steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i)
    for (const auto& a : steps[i].args)
      if (auto p = producer.find(a); p != producer.end()) {
        ++indegree[i];
        users[p->second].push_back(i);
      }
  std::vector<std::size_t> ready, order;
  for (std::size_t i = 0; i < steps.size(); ++i)
    if (!indegree[i]) ready.push_back(i);
  while (!ready.empty()) {
    std::size_t i = ready.front();
    ready.erase(ready.begin());
    order.push_back(i);
    for (auto u : users[i])
      if (--indegree[u] == 0) ready.push_back(u);
  }
  if (order.size() != steps.size()) {
    std::string vars;
    for (std::size_t i = 0; i < steps.size(); ++i)
      if (indegree[i])
        for (const auto& v : steps[i].outputs) vars += (vars.empty() ? "" : ", ") + v;
    throw Error(code::kPipeline, "cyclic pipeline equations in " + raw.name + " over " + vars, raw.path, raw.span);
  }
  for (auto i : order) s->steps.push_back(steps[i]);
  return s;
}

// ---- environment -----------------------------------------------------------

void ModuleEnv::add_unit(const SourceUnit& unit) {
  for (const auto& d : unit.decls) {
    Slot s;
    s.decl = d;
    if (s.decl.path.empty()) s.decl.path = unit.path;
    switch (d.kind) {
      case RawModuleDecl::Kind::Domain:
        s.kind = Kind::Domain;
        break;
      case RawModuleDecl::Kind::Model:
        s.kind = Kind::Model;
        break;
      case RawModuleDecl::Kind::Transform:
        s.kind = Kind::Transform;
        break;
      case RawModuleDecl::Kind::TransformSystem:
        s.kind = Kind::System;
        break;
    }
    if (auto it = slots_.find(d.name); it != slots_.end()) {
      const auto& prev = it->second.decl;
      throw Error(code::kDuplicateModule,
                  "module '" + d.name + "' is already declared at " + prev.path + ":" +
                      std::to_string(prev.span.line),
                  s.decl.path, d.span);
    }
    order_.push_back(d.name);
    slots_.emplace(d.name, std::move(s));
  }
}

void ModuleEnv::load_text(std::string_view text, const std::string& path) { add_unit(parse_source(text, path)); }

void ModuleEnv::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(code::kUnknownModule, "cannot read file " + path, path);
  std::ostringstream ss;
  ss << in.rdbuf();
  load_text(ss.str(), path);
}

std::optional<ModuleEnv::Kind> ModuleEnv::kind_of(const std::string& name) const {
  auto it = slots_.find(name);
  if (it == slots_.end()) {
    if (models_.count(name)) return Kind::Model;
    return std::nullopt;
  }
  return it->second.kind;
}

const ModuleEnv::Slot& ModuleEnv::slot(const std::string& name, Kind kind) const {
  auto it = slots_.find(name);
  if (it == slots_.end()) throw Error(code::kUnknownModule, "unknown " + kind_label(kind) + " '" + name + "'");
  if (it->second.kind != kind)
    throw Error(code::kUnknownModule,
                "'" + name + "' is a " + kind_label(it->second.kind) + ", expected a " + kind_label(kind),
                it->second.decl.path, it->second.decl.span);
  return it->second;
}

void ModuleEnv::enter(const std::string& name, const Slot& s) {
  if (std::find(active_.begin(), active_.end(), name) != active_.end()) {
    std::string cycle;
    for (auto it = std::find(active_.begin(), active_.end(), name); it != active_.end(); ++it) cycle += *it + " -> ";
    throw Error(code::kImportCycle, "import cycle: " + cycle + name, s.decl.path, s.decl.span);
  }
  active_.push_back(name);
}

void ModuleEnv::leave() { active_.pop_back(); }

namespace {

template <class Ref, class F>
Ref memo(std::map<std::string, Ref>& cache, const std::string& name, F&& build) {
  if (auto it = cache.find(name); it != cache.end()) return it->second;
  Ref r = build();
  cache.emplace(name, r);
  return r;
}

struct Guard {
  std::function<void()> done;
  ~Guard() { done(); }
};

}  // namespace

DomainRef ModuleEnv::domain(const std::string& name) {
  if (auto it = domains_.find(name); it != domains_.end()) return it->second;
  const Slot& s = slot(name, Kind::Domain);
  enter(name, s);
  Guard g{[this] { leave(); }};
  return memo(domains_, name, [&] { return elaborate_domain(s.decl, *this); });
}

ModelRef ModuleEnv::model(const std::string& name) {
  if (auto it = models_.find(name); it != models_.end()) return it->second;
  const Slot& s = slot(name, Kind::Model);
  enter(name, s);
  Guard g{[this] { leave(); }};
  return memo(models_, name, [&] { return elaborate_model(s.decl, *this); });
}

TransformRef ModuleEnv::transform(const std::string& name) {
  if (auto it = transforms_.find(name); it != transforms_.end()) return it->second;
  const Slot& s = slot(name, Kind::Transform);
  enter(name, s);
  Guard g{[this] { leave(); }};
  return memo(transforms_, name, [&] { return elaborate_transform(s.decl, *this); });
}

SystemRef ModuleEnv::system(const std::string& name) {
  if (auto it = systems_.find(name); it != systems_.end()) return it->second;
  const Slot& s = slot(name, Kind::System);
  enter(name, s);
  Guard g{[this] { leave(); }};
  return memo(systems_, name, [&] { return elaborate_system(s.decl, *this); });
}

void ModuleEnv::add_model(ModelRef m) { models_[m->name] = std::move(m); }

void ModuleEnv::elaborate_all() {
  for (const auto& name : order_) {
    switch (slots_.at(name).kind) {
      case Kind::Domain:
        domain(name);
        break;
      case Kind::Model:
        model(name);
        break;
      case Kind::Transform:
        transform(name);
        break;
      case Kind::System:
        system(name);
        break;
    }
  }
}

}  // namespace lpmod
