#include <algorithm>
#include <functional>
#include <map>

#include "lpmod/modsys/modsys.hpp"

namespace lpmod {

// ---- renaming ----------------------------------------------------------

namespace {

Qualifiers with_prefix(const std::string& prefix, const Qualifiers& q) {
  Qualifiers out{prefix};
  out.insert(out.end(), q.begin(), q.end());
  return out;
}

struct Renamer {
  const std::string& prefix;
  const SymbolTable& source;

  QualName name(const QualName& n) const {
    const SymbolEntry* e = source.find(n);
    if (e && survives_renaming(*e)) return n;
    if (!e && !n.is_qualified() && (n.base == "TRUE" || n.base == "FALSE")) return n;
    return n.prefixed(Qualifiers{prefix});
  }

  Term term(const Term& t) const {
    switch (t.kind()) {
      case Term::Kind::Constant:
        return Term::constant(name(t.name()));
      case Term::Kind::Apply: {
        std::vector<Term> args;
        args.reserve(t.args().size());
        for (const auto& a : t.args()) args.push_back(term(a));
        return Term::apply(t.name().prefixed(Qualifiers{prefix}), std::move(args));
      }
      case Term::Kind::Relabel:
        return Term::relabel({with_prefix(prefix, t.relabeling().from), with_prefix(prefix, t.relabeling().to)},
                             term(t.inner()));
      default:
        return t;
    }
  }

  TypeExpr type(const TypeExpr& t) const { return relabel_type(RelabelingSpec{{}, {prefix}}, t); }

  Expr expr(const Expr& e) const {
    Expr x = e;
    x.term = term(e.term);
    for (auto& a : x.args) a = expr(a);
    if (x.comp) x.comp = comp(*x.comp);
    return x;
  }

  std::shared_ptr<const Comprehension> comp(const Comprehension& c) const {
    auto out = std::make_shared<Comprehension>();
    for (const auto& h : c.heads) out->heads.push_back(term(h));
    for (const auto& d : c.disjuncts) out->disjuncts.push_back(conj(d));
    out->outer = c.outer;
    return out;
  }

  Literal literal(const Literal& l) const {
    Literal x = l;
    x.pattern = term(l.pattern);
    x.type = type(l.type);
    x.lhs = expr(l.lhs);
    x.rhs = expr(l.rhs);
    if (l.comp) x.comp = comp(*l.comp);
    if (l.kind == Literal::Kind::Project) x.ctor = l.ctor.prefixed(Qualifiers{prefix});
    x.keys.clear();
    if (l.kind == Literal::Kind::Atom) x.keys = {x.pattern.index_key()};
    if (l.kind == Literal::Kind::Member) {
      for (const auto& c : x.type.ctors()) x.keys.push_back(c.str());
      for (const auto& k : x.type.constants())
        if (k.kind() == Term::Kind::Constant) x.keys.push_back(k.name().str());
    }
    return x;
  }

  Conjunction conj(const Conjunction& c) const {
    Conjunction out;
    out.reserve(c.size());
    for (const auto& l : c) out.push_back(literal(l));
    return out;
  }
};

}  // namespace

Term rename_term(const std::string& prefix, const Term& t, const SymbolTable& source) {
  return Renamer{prefix, source}.term(t);
}

CompiledRule rename_rule(const std::string& prefix, const CompiledRule& rule, const SymbolTable& source) {
  Renamer r{prefix, source};
  CompiledRule out = rule;
  out.head = r.term(rule.head);
  out.body = r.conj(rule.body);
  return out;
}

ClauseInfo rename_clause(const std::string& prefix, const ClauseInfo& clause, const SymbolTable& source) {
  Renamer r{prefix, source};
  ClauseInfo out = clause;
  out.symbol = r.name(clause.symbol);
  if (clause.witness) out.witness = r.comp(*clause.witness);
  return out;
}

// ---- symbols and dependencies -----------------------------------------

namespace {

void term_symbols(const Term& t, std::set<QualName>& out) {
  switch (t.kind()) {
    case Term::Kind::Constant:
      out.insert(t.name());
      break;
    case Term::Kind::Apply:
      out.insert(t.name());
      for (const auto& a : t.args()) term_symbols(a, out);
      break;
    case Term::Kind::Relabel:
      term_symbols(t.inner(), out);
      break;
    default:
      break;
  }
}

void type_symbols(const TypeExpr& t, std::set<QualName>& out) {
  for (const auto& c : t.ctors()) out.insert(c);
  for (const auto& k : t.constants()) term_symbols(k, out);
}

void conj_symbols(const Conjunction& c, std::set<QualName>& out);

void comp_symbols(const Comprehension& c, std::set<QualName>& out) {
  for (const auto& h : c.heads) term_symbols(h, out);
  for (const auto& d : c.disjuncts) conj_symbols(d, out);
}

void expr_symbols(const Expr& e, std::set<QualName>& out) {
  term_symbols(e.term, out);
  for (const auto& a : e.args) expr_symbols(a, out);
  if (e.comp) comp_symbols(*e.comp, out);
}

void conj_symbols(const Conjunction& c, std::set<QualName>& out) {
  for (const auto& l : c) {
    term_symbols(l.pattern, out);
    type_symbols(l.type, out);
    expr_symbols(l.lhs, out);
    expr_symbols(l.rhs, out);
    if (l.comp) comp_symbols(*l.comp, out);
    if (l.kind == Literal::Kind::Project) out.insert(l.ctor);
  }
}

/// Keys read by every generator anywhere inside a comprehension.
void comp_reads(const Comprehension& c, std::set<std::string>& out);

void conj_reads(const Conjunction& c, std::set<std::string>& out) {
  std::function<void(const Expr&)> in_expr = [&](const Expr& e) {
    if (e.comp) comp_reads(*e.comp, out);
    for (const auto& a : e.args) in_expr(a);
  };
  for (const auto& l : c) {
    for (const auto& k : l.keys) out.insert(k);
    if (l.comp) comp_reads(*l.comp, out);
    in_expr(l.lhs);
    in_expr(l.rhs);
  }
}

void comp_reads(const Comprehension& c, std::set<std::string>& out) {
  for (const auto& d : c.disjuncts) conj_reads(d, out);
}

}  // namespace

std::set<QualName> referenced_symbols(const CompiledRule& rule) {
  std::set<QualName> out;
  term_symbols(rule.head, out);
  conj_symbols(rule.body, out);
  return out;
}

std::set<DependencyEdge> dependency_edges(const std::vector<CompiledRule>& rules) {
  std::set<DependencyEdge> edges;
  for (const auto& r : rules) {
    const std::string head = r.head.index_key();
    std::function<void(const Expr&)> counts = [&](const Expr& e) {
      if (e.comp) {
        std::set<std::string> keys;
        comp_reads(*e.comp, keys);
        for (const auto& k : keys) edges.insert({k, head, true});
      }
      for (const auto& a : e.args) counts(a);
    };
    for (const auto& l : r.body) {
      for (const auto& k : l.keys) edges.insert({k, head, false});
      if (l.kind == Literal::Kind::No) {
        std::set<std::string> keys;
        comp_reads(*l.comp, keys);
        for (const auto& k : keys) edges.insert({k, head, true});
      }
      counts(l.lhs);
      counts(l.rhs);
    }
  }
  return edges;
}

void stratify(Program& program, const std::string& path) {
  auto edges = dependency_edges(program.rules);
  std::map<std::string, std::vector<std::pair<std::string, bool>>> succ;
  std::set<std::string> nodes;
  for (const auto& r : program.rules) nodes.insert(r.head.index_key());
  for (const auto& e : edges) {
    nodes.insert(e.from);
    nodes.insert(e.to);
    succ[e.from].emplace_back(e.to, e.negative);
  }

  // Tarjan, iterative over an explicit stack to survive deep chains.
  std::map<std::string, int> index, low, comp;
  std::map<std::string, bool> on_stack;
  std::vector<std::string> stack;
  int next = 0, ncomp = 0;
  std::function<void(const std::string&)> strong = [&](const std::string& v) {
    index[v] = low[v] = next++;
    stack.push_back(v);
    on_stack[v] = true;
    for (const auto& [w, neg] : succ[v]) {
      (void)neg;
      if (!index.count(w)) {
        strong(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      while (true) {
        std::string w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = ncomp;
        if (w == v) break;
      }
      ++ncomp;
    }
  };
  for (const auto& n : nodes)
    if (!index.count(n)) strong(n);

  for (const auto& e : edges) {
    if (!e.negative || comp[e.from] != comp[e.to]) continue;
    std::vector<std::string> members;
    for (const auto& [n, c] : comp)
      if (c == comp[e.from]) members.push_back(n);
    std::string list;
    for (std::size_t i = 0; i < members.size(); ++i) list += (i ? ", " : "") + members[i];
    Span span;
    std::string where = path;
    for (const auto& r : program.rules)
      if (r.head.index_key() == e.to) {
        span = r.span;
        if (!r.path.empty()) where = r.path;
        break;
      }
    throw Error(code::kStratify,
                "not stratifiable: " + e.to + " depends negatively on " + e.from + " within the cycle {" + list + "}",
                where, span);
  }

  // Tarjan numbers components in reverse topological order.
  std::vector<std::vector<std::pair<int, bool>>> preds(ncomp);
  for (const auto& e : edges)
    if (comp[e.from] != comp[e.to]) preds[comp[e.to]].emplace_back(comp[e.from], e.negative);
  std::vector<std::size_t> level(ncomp, 0);
  for (int c = ncomp - 1; c >= 0; --c)
    for (const auto& [p, neg] : preds[c]) level[c] = std::max(level[c], level[p] + (neg ? 1 : 0));

  std::size_t top = 0;
  for (auto& r : program.rules) {
    r.stratum = level[comp[r.head.index_key()]];
    top = std::max(top, r.stratum);
  }
  program.strata = top + 1;
  std::stable_sort(program.rules.begin(), program.rules.end(),
                   [](const CompiledRule& a, const CompiledRule& b) { return a.stratum < b.stratum; });
}

// ---- fun ----------------------------------------------------------------

CompiledRule desugar_fun(const QualName& ctor, std::size_t arity, std::size_t split, const QualName& clause_symbol) {
  std::vector<Term> xs, ys, zs;
  for (std::size_t i = 0; i < arity; ++i) {
    if (i < split) {
      Term x = Term::variable("~x" + std::to_string(i + 1));
      xs.push_back(x);
      ys.push_back(x);
      zs.push_back(x);
    } else {
      ys.push_back(Term::variable("~y" + std::to_string(i + 1)));
      zs.push_back(Term::variable("~z" + std::to_string(i + 1)));
    }
  }
  auto atom = [&](const std::vector<Term>& args) {
    Literal l;
    l.kind = Literal::Kind::Atom;
    l.pattern = Term::apply(ctor, args);
    l.keys = {ctor.str()};
    return l;
  };
  auto c = std::make_shared<Comprehension>();
  c->heads.push_back(Term::apply(ctor, ys));
  for (std::size_t i = split; i < arity; ++i) {
    Literal ne;
    ne.kind = Literal::Kind::Compare;
    ne.op = "!=";
    ne.lhs = Expr::of(ys[i]);
    ne.rhs = Expr::of(zs[i]);
    c->disjuncts.push_back({atom(ys), atom(zs), ne});
  }
  Literal no;
  no.kind = Literal::Kind::No;
  no.comp = c;
  CompiledRule r;
  r.head = Term::constant(clause_symbol);
  r.body = {no};
  return r;
}

}  // namespace lpmod
