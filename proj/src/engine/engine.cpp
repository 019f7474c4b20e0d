#include "lpmod/engine/engine.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <sstream>

#include "lpmod/frontend/parser.hpp"

namespace lpmod {

std::size_t default_fact_cap() {
  if (const char* v = std::getenv("LPMOD_MAX_FACTS")) {
    char* end = nullptr;
    unsigned long long n = std::strtoull(v, &end, 10);
    if (end && *end == '\0' && n > 0) return static_cast<std::size_t>(n);
  }
  return 1000000;
}

// ---- store ---------------------------------------------------------------

bool FactStore::insert(const Term& fact) {
  auto& bucket = by_key_[fact.index_key()];
  if (bucket.count(fact)) return false;
  if (size_ >= cap_)
    throw Error(code::kResourceLimit,
                "fact limit of " + std::to_string(cap_) + " exceeded while adding " + fact.str() +
                    " (raise it with --max-facts or LPMOD_MAX_FACTS)");
  bucket.insert(fact);
  ++size_;
  return true;
}

bool FactStore::contains(const Term& fact) const {
  auto it = by_key_.find(fact.index_key());
  return it != by_key_.end() && it->second.count(fact);
}

const std::set<Term>& FactStore::with_key(const std::string& key) const {
  static const std::set<Term> empty;
  auto it = by_key_.find(key);
  return it == by_key_.end() ? empty : it->second;
}

std::vector<Term> FactStore::all() const {
  std::vector<Term> out;
  out.reserve(size_);
  for (const auto& [k, b] : by_key_) out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::string FactStore::serialize() const {
  std::string out;
  for (const auto& f : all()) out += f.str() + ".\n";
  return out;
}

// ---- matching ------------------------------------------------------------

namespace {

bool match(const Term& pattern, const Term& value, Binding& b) {
  switch (pattern.kind()) {
    case Term::Kind::Wildcard:
      return true;
    case Term::Kind::Variable: {
      auto [it, fresh] = b.emplace(pattern.text(), value);
      return fresh || it->second == value;
    }
    case Term::Kind::Apply: {
      if (pattern.is_ground()) return pattern == value;
      if (value.kind() != Term::Kind::Apply || value.name() != pattern.name() ||
          value.args().size() != pattern.args().size())
        return false;
      for (std::size_t i = 0; i < value.args().size(); ++i)
        if (!match(pattern.args()[i], value.args()[i], b)) return false;
      return true;
    }
    case Term::Kind::Relabel: {
      Term t = substitute(pattern, b);
      if (!t.is_ground()) throw Error(code::kEvaluation, "cannot match against relabeled open term " + t.str());
      return t == value;
    }
    case Term::Kind::Accessor:
      throw Error(code::kEvaluation, "unresolved accessor " + pattern.str());
    default:
      return pattern == value;
  }
}

bool try_match(const Term& pattern, const Term& value, const Binding& b, Binding& out) {
  out = b;
  return match(pattern, value, out);
}

using Emit = std::function<bool(const Binding&)>;  // false stops the search

class Solver {
 public:
  Solver(const FactStore& store, const SymbolTable& table) : store_(store), table_(table) {}

  /// Restricts literal `delta_at` to facts of `delta`.
  void with_delta(std::size_t at, const FactStore* delta) {
    delta_at_ = at;
    delta_ = delta;
  }

  bool solve(const Conjunction& c, const Binding& b, const Emit& emit) { return step(c, 0, b, emit); }

  std::set<Term> comprehension(const Comprehension& comp, const Binding& outer) {
    Binding start = restrict_to(comp, outer);
    std::set<Term> out;
    Solver inner(store_, table_);
    for (const auto& d : comp.disjuncts) {
      inner.solve(d, start, [&](const Binding& r) {
        for (const auto& h : comp.heads) out.insert(ground(h, r));
        return true;
      });
    }
    return out;
  }

  bool nonempty(const Comprehension& comp, const Binding& outer) {
    Binding start = restrict_to(comp, outer);
    Solver inner(store_, table_);
    for (const auto& d : comp.disjuncts) {
      bool found = false;
      inner.solve(d, start, [&](const Binding&) {
        found = true;
        return false;
      });
      if (found) return true;
    }
    return false;
  }

  static Term ground(const Term& t, const Binding& b) {
    Term g = substitute(t, b);
    if (!g.is_ground()) throw Error(code::kEvaluation, "derived term " + g.str() + " is not ground");
    return g;
  }

 private:
  static Binding restrict_to(const Comprehension& comp, const Binding& outer) {
    Binding start;
    for (const auto& v : comp.outer)
      if (auto it = outer.find(v); it != outer.end()) start.emplace(v, it->second);
    return start;
  }

  const FactStore& source(std::size_t i) const { return delta_ && i == delta_at_ ? *delta_ : store_; }

  std::optional<Term> value(const Expr& e, const Binding& b) {
    switch (e.kind) {
      case Expr::Kind::Term: {
        Term t = substitute(e.term, b);
        if (!t.is_ground()) return std::nullopt;
        return t;
      }
      case Expr::Kind::Count:
        return Term::integer(static_cast<long long>(comprehension(*e.comp, b).size()));
      case Expr::Kind::Binary: {
        auto l = value(e.args[0], b);
        auto r = value(e.args[1], b);
        if (!l || !r) return std::nullopt;
        if (l->kind() != Term::Kind::Integer || r->kind() != Term::Kind::Integer)
          throw Error(code::kEvaluation, std::string("arithmetic '") + e.op + "' on non-integers " + l->str() +
                                             " and " + r->str());
        const BigInt& x = l->int_value();
        const BigInt& y = r->int_value();
        switch (e.op) {
          case '+':
            return Term::integer(x + y);
          case '-':
            return Term::integer(x - y);
          case '*':
            return Term::integer(x * y);
          case '/':
            if (y == 0) throw Error(code::kEvaluation, "division by zero in " + e.str());
            return Term::integer(x / y);
        }
        throw Error(code::kEvaluation, std::string("unknown operator '") + e.op + "'");
      }
    }
    return std::nullopt;
  }

  static bool compare(const std::string& op, const Term& l, const Term& r) {
    if (op == "=") return l == r;
    if (op == "!=") return l != r;
    bool ints = l.kind() == Term::Kind::Integer && r.kind() == Term::Kind::Integer;
    bool strs = l.kind() == Term::Kind::String && r.kind() == Term::Kind::String;
    if (!ints && !strs) return false;
    auto c = term_order(l, r);
    if (op == "<") return c < 0;
    if (op == "<=") return c <= 0;
    if (op == ">") return c > 0;
    if (op == ">=") return c >= 0;
    throw Error(code::kEvaluation, "unknown comparison '" + op + "'");
  }

  bool scan(const Conjunction& c, std::size_t i, const Binding& b, const Emit& emit, const Term& pattern,
            const std::vector<std::string>& keys, const TypeExpr* type) {
    const FactStore& src = source(i);
    Term p = substitute(pattern, b);
    if (p.is_ground()) {
      if (!src.contains(p)) return true;
      if (type && !is_member(p, *type, table_)) return true;
      return step(c, i + 1, b, emit);
    }
    Binding next;
    for (const auto& k : keys) {
      for (const auto& f : src.with_key(k)) {
        if (!try_match(p, f, b, next)) continue;
        if (type && !is_member(f, *type, table_)) continue;
        if (!step(c, i + 1, next, emit)) return false;
      }
    }
    return true;
  }

  bool step(const Conjunction& c, std::size_t i, const Binding& b, const Emit& emit) {
    if (i == c.size()) return emit(b);
    const Literal& l = c[i];
    switch (l.kind) {
      case Literal::Kind::Atom:
        return scan(c, i, b, emit, l.pattern, l.keys, nullptr);
      case Literal::Kind::Member:
        return scan(c, i, b, emit, l.pattern, l.keys, &l.type);
      case Literal::Kind::TypeTest: {
        auto v = value(l.lhs, b);
        if (!v) throw Error(code::kEvaluation, "type test on unbound " + l.lhs.str());
        return is_member(*v, l.type, table_) ? step(c, i + 1, b, emit) : true;
      }
      case Literal::Kind::No:
        return nonempty(*l.comp, b) ? true : step(c, i + 1, b, emit);
      case Literal::Kind::Project: {
        auto it = b.find(l.source);
        if (it == b.end()) throw Error(code::kEvaluation, "accessor on unbound variable " + l.source);
        const Term& s = it->second;
        if (s.kind() != Term::Kind::Apply || s.name() != l.ctor || l.index >= s.args().size()) return true;
        Binding next;
        if (!try_match(l.pattern, s.args()[l.index], b, next)) return true;
        return step(c, i + 1, next, emit);
      }
      case Literal::Kind::Compare: {
        auto lv = value(l.lhs, b);
        auto rv = value(l.rhs, b);
        if (lv && rv) return compare(l.op, *lv, *rv) ? step(c, i + 1, b, emit) : true;
        if (l.op == "=") {
          const Expr* open = lv ? &l.rhs : &l.lhs;
          const auto& known = lv ? lv : rv;
          if (known && open->is_term()) {
            Binding next;
            if (!try_match(substitute(open->term, b), *known, b, next)) return true;
            return step(c, i + 1, next, emit);
          }
        }
        throw Error(code::kEvaluation, "comparison " + l.str() + " has unbound operands");
      }
    }
    return true;
  }

  const FactStore& store_;
  const SymbolTable& table_;
  std::size_t delta_at_ = 0;
  const FactStore* delta_ = nullptr;
};

bool reads_any(const Literal& l, const std::set<std::string>& keys) {
  if (l.kind != Literal::Kind::Atom && l.kind != Literal::Kind::Member) return false;
  for (const auto& k : l.keys)
    if (keys.count(k)) return true;
  return false;
}

// Fires `rule` and collects heads not yet in `store`.
void fire(const CompiledRule& rule, Solver& solver, const FactStore& store, std::vector<Term>& out) {
  solver.solve(rule.body, {}, [&](const Binding& b) {
    Term h = Solver::ground(rule.head, b);
    if (!store.contains(h)) out.push_back(std::move(h));
    return true;
  });
}

std::size_t add_all(FactStore& store, FactStore* delta, std::vector<Term>& facts) {
  std::size_t n = 0;
  for (auto& f : facts) {
    if (store.insert(f)) {
      ++n;
      if (delta) delta->insert(f);
    }
  }
  facts.clear();
  return n;
}

}  // namespace

// ---- evaluation ----------------------------------------------------------

FactStore evaluate(const Program& program, const std::set<Term>& edb, const EvalOptions& opts) {
  const std::size_t cap = opts.max_facts ? opts.max_facts : default_fact_cap();
  FactStore store(cap);
  for (const auto& f : edb) store.insert(f);

  std::size_t first = 0;
  while (first < program.rules.size()) {
    std::size_t last = first;
    const std::size_t stratum = program.rules[first].stratum;
    while (last < program.rules.size() && program.rules[last].stratum == stratum) ++last;
    std::set<std::string> heads;
    for (std::size_t r = first; r < last; ++r) heads.insert(program.rules[r].head.index_key());

    std::vector<Term> pending;
    if (opts.naive) {
      while (true) {
        Solver solver(store, program.table);
        for (std::size_t r = first; r < last; ++r) fire(program.rules[r], solver, store, pending);
        if (!add_all(store, nullptr, pending)) break;
      }
    } else {
      FactStore delta(cap);
      {
        Solver solver(store, program.table);
        for (std::size_t r = first; r < last; ++r) fire(program.rules[r], solver, store, pending);
        add_all(store, &delta, pending);
      }
      while (delta.size()) {
        FactStore next(cap);
        for (std::size_t r = first; r < last; ++r) {
          const CompiledRule& rule = program.rules[r];
          for (std::size_t i = 0; i < rule.body.size(); ++i) {
            if (!reads_any(rule.body[i], heads)) continue;
            Solver solver(store, program.table);
            solver.with_delta(i, &delta);
            fire(rule, solver, store, pending);
          }
        }
        add_all(store, &next, pending);
        delta = std::move(next);
      }
    }
    first = last;
  }
  return store;
}

std::set<Term> eval_comprehension(const Comprehension& comp, const Binding& outer, const FactStore& store,
                                  const SymbolTable& table) {
  Solver s(store, table);
  return s.comprehension(comp, outer);
}

// ---- conformance -----------------------------------------------------------

ConformanceReport clause_report(const Program& program, const QualName& goal, const FactStore& store,
                                ClauseInfo::Kind kind) {
  ConformanceReport rep;
  rep.goal = goal;
  rep.conforms = store.contains(Term::constant(goal));
  for (const auto& c : program.clauses) {
    if (c.kind != kind) continue;
    ClauseResult r;
    r.clause = c;
    r.holds = store.contains(Term::constant(c.symbol));
    if (!r.holds && c.witness) {
      auto set = eval_comprehension(*c.witness, {}, store, program.table);
      if (!set.empty()) r.witness = *set.begin();
    }
    rep.clauses.push_back(std::move(r));
  }
  return rep;
}

ConformanceReport check_conforms(const CompiledDomain& domain, const std::set<Term>& edb, const EvalOptions& opts) {
  FactStore store = evaluate(domain.program, edb, opts);
  return clause_report(domain.program, domain.conforms_goal, store, ClauseInfo::Kind::Conforms);
}

ConformanceReport check_conforms(const CompiledModel& model, const EvalOptions& opts) {
  return check_conforms(*model.domain, model.facts, opts);
}

// ---- queries -------------------------------------------------------------

std::vector<Binding> query(const CompiledGoal& goal, const FactStore& store, const SymbolTable& table) {
  std::set<std::vector<Term>> rows;
  Solver s(store, table);
  for (const auto& d : goal.disjuncts) {
    s.solve(d, {}, [&](const Binding& b) {
      std::vector<Term> row;
      for (const auto& v : goal.variables) {
        auto it = b.find(v);
        if (it == b.end()) return true;
        row.push_back(it->second);
      }
      rows.insert(std::move(row));
      return true;
    });
  }
  std::vector<Binding> out;
  for (const auto& row : rows) {
    Binding b;
    for (std::size_t i = 0; i < row.size(); ++i) b.emplace(goal.variables[i], row[i]);
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<Binding> query_model(const CompiledModel& model, const std::string& text, const EvalOptions& opts) {
  frontend::RawBody body = frontend::parse_body_text(text, "<query>");
  std::set<std::string> vars;
  ResolveContext ctx;
  ctx.table = &model.table;
  ctx.module = model.name;
  ctx.path = "<query>";
  ctx.labels = model.domain->labels;
  ctx.variables = &vars;
  CompiledGoal goal = compile_goal(body, ctx);
  FactStore store = evaluate(model.domain->program, model.facts, opts);
  return query(goal, store, model.domain->table());
}

}  // namespace lpmod
