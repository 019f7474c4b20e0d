#include "support.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lpmod/cli/cli.hpp"
#include "oracle_config.hpp"

namespace fs = std::filesystem;

namespace lpmod::test {

std::string corpus_path(const std::string& file) { return std::string(LPMOD_CORPUS_DIR) + "/" + file; }
std::string fixture_path(const std::string& file) { return std::string(LPMOD_FIXTURE_DIR) + "/" + file; }
std::string golden_path(const std::string& file) { return std::string(LPMOD_GOLDEN_DIR) + "/" + file; }

std::vector<std::string> corpus_files() {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(LPMOD_CORPUS_DIR))
    if (e.path().extension() == ".4ml") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ModuleEnv corpus_env(const std::vector<std::string>& fixtures) {
  ModuleEnv env;
  for (const auto& f : corpus_files()) env.load_file(f);
  for (const auto& f : fixtures) env.load_file(fixture_path(f));
  return env;
}

ModuleEnv text_env(const std::string& text) {
  ModuleEnv env;
  env.load_text(text, "<test>");
  return env;
}

ModuleEnv corpus_with(const std::string& text) {
  ModuleEnv env = corpus_env();
  env.load_text(text, "<test>");
  return env;
}

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliResult r;
  r.exit = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

FsmShape random_shape(std::mt19937& rng, int max_states, int max_events) {
  FsmShape s;
  s.states = std::uniform_int_distribution<int>(1, max_states)(rng);
  s.events = std::uniform_int_distribution<int>(1, max_events)(rng);
  s.transitions = std::uniform_int_distribution<int>(0, 2 * s.states)(rng);
  return s;
}

std::string fsm_model(const std::string& name, const FsmShape& shape, std::mt19937& rng) {
  std::uniform_int_distribution<int> st(1, shape.states), ev(0, shape.events - 1);
  std::ostringstream os;
  os << "model " << name << " of NonDetFSM {\n";
  for (int i = 1; i <= shape.states; ++i) os << "  State(" << i << ").\n";
  for (int i = 0; i < shape.events; ++i) os << "  Event(\"e" << i << "\").\n";
  os << "  Init(State(" << st(rng) << ")).\n";
  if (shape.broken) os << "  Init(State(100)).\n";
  for (int i = 0; i < shape.transitions; ++i)
    os << "  Trans(State(" << st(rng) << "), Event(\"e" << ev(rng) << "\"), State(" << st(rng) << ")).\n";
  os << "}\n";
  return os.str();
}

namespace {

bool atom_member(const Term& t, const TypeAtom& atom, const SymbolTable& ctx, int depth) {
  if (std::holds_alternative<AnyTerm>(atom)) return true;
  if (const auto* r = std::get_if<IntRange>(&atom)) {
    if (t.kind() != Term::Kind::Integer) return false;
    return (!r->lo || *r->lo <= t.int_value()) && (!r->hi || t.int_value() <= *r->hi);
  }
  if (std::holds_alternative<AllStrings>(atom)) return t.kind() == Term::Kind::String;
  if (const auto* c = std::get_if<ConstSet>(&atom))
    return std::find(c->values.begin(), c->values.end(), t) != c->values.end();
  const auto& name = std::get<CtorExt>(atom).name;
  if (t.kind() != Term::Kind::Apply || t.name() != name || depth == 0) return false;
  const SymbolEntry* e = ctx.find(name);
  if (!e || e->fields.size() != t.args().size()) return false;
  for (std::size_t i = 0; i < e->fields.size(); ++i)
    if (!oracle_member(t.args()[i], e->fields[i].type, ctx, depth - 1)) return false;
  return true;
}

}  // namespace

bool oracle_member(const Term& t, const TypeExpr& type, const SymbolTable& ctx, int depth) {
  for (const auto& a : type.atoms())
    if (atom_member(t, a, ctx, depth)) return true;
  return false;
}

std::vector<Term> bounded_universe(const SymbolTable& ctx) {
  std::vector<Term> layer;
  for (int i = kOracleIntLo; i <= kOracleIntHi; ++i) layer.push_back(Term::integer(i));
  for (const char* s : kOracleStrings) layer.push_back(Term::string(s));
  std::vector<std::pair<QualName, const SymbolEntry*>> ctors;
  for (const auto& [name, e] : ctx.entries()) {
    if (e.kind != SymbolKind::New && e.kind != SymbolKind::Derived) continue;
    if (e.arity == 0)
      layer.push_back(Term::constant(name));
    else
      ctors.emplace_back(name, &e);
  }
  std::set<Term> all(layer.begin(), layer.end());
  for (int d = 1; d <= kOracleDepth; ++d) {
    std::vector<Term> prev(all.begin(), all.end());
    for (const auto& [name, e] : ctors) {
      // Cartesian product of well-typed arguments.
      std::vector<std::vector<Term>> cols;
      for (const auto& f : e->fields) {
        std::vector<Term> col;
        for (const auto& t : prev)
          if (oracle_member(t, f.type, ctx)) col.push_back(t);
        cols.push_back(std::move(col));
      }
      std::vector<std::vector<Term>> tuples{{}};
      for (const auto& col : cols) {
        std::vector<std::vector<Term>> next;
        for (const auto& tup : tuples)
          for (const auto& t : col) {
            auto n = tup;
            n.push_back(t);
            next.push_back(std::move(n));
          }
        tuples = std::move(next);
      }
      for (auto& tup : tuples) all.insert(Term::apply(name, std::move(tup)));
      // One ill-typed application per constructor.
      all.insert(Term::apply(name, std::vector<Term>(e->arity, Term::string("zz"))));
    }
  }
  return {all.begin(), all.end()};
}

std::set<Term> oracle_denotation(const TypeExpr& type, const std::vector<Term>& universe, const SymbolTable& ctx) {
  std::set<Term> out;
  for (const auto& t : universe)
    if (oracle_member(t, type, ctx)) out.insert(t);
  return out;
}

namespace {

SymbolEntry ctor_entry(const std::string& name, std::size_t arity) {
  SymbolEntry e;
  e.arity = arity;
  e.denotation = TypeExpr::ctor(QualName::parse(name));
  for (std::size_t i = 0; i < arity; ++i) e.fields.push_back(Field{std::nullopt, TypeExpr::integers()});
  return e;
}

SymbolEntry union_entry(TypeExpr t) {
  SymbolEntry e;
  e.kind = SymbolKind::Union;
  e.denotation = std::move(t);
  return e;
}

}  // namespace

SymbolTable random_table(std::mt19937& rng) {
  static const std::vector<std::string> names = {"F", "G", "A.F", "Nil", "x", "U", "B.G"};
  std::uniform_int_distribution<int> pick(0, 5);
  SymbolTable t;
  for (const auto& n : names) {
    switch (pick(rng)) {
      case 0: break;
      case 1: t.insert_or_assign(QualName::parse(n), ctor_entry(n, 1)); break;
      case 2: t.insert_or_assign(QualName::parse(n), ctor_entry(n, 2)); break;
      case 3: t.insert_or_assign(QualName::parse(n), SymbolEntry{SymbolKind::Variable, 0, TypeExpr::any_term()}); break;
      case 4: t.insert_or_assign(QualName::parse(n), union_entry(TypeExpr::range(BigInt(0), BigInt(2)))); break;
      default: {
        std::vector<TypeAtom> cs{ConstSet{{Term::integer(2), Term::integer(1), Term::integer(0)}}};
        t.insert_or_assign(QualName::parse(n), union_entry(TypeExpr::from_atoms(cs)));
      }
    }
  }
  return t;
}

const SymbolTable& oracle_ctx() {
  static const SymbolTable table = [] {
    ModuleEnv env = text_env(R"(domain Ctx {
  F ::= new (Integer).
  G ::= new (String).
  H ::= new (F + G).
  P ::= new (Integer, H + { NIL }).
  U ::= { NIL, TRUE, FALSE } + F.
})");
    return env.domain("Ctx")->table();
  }();
  return table;
}

TypeExpr random_type(std::mt19937& rng) {
  // Bounds stay strictly inside the oracle window so a difference in
  // normal form always shows up on an enumerated integer.
  std::uniform_int_distribution<int> pick(0, 9), val(kOracleIntLo + 1, kOracleIntHi - 1), n(1, 3);
  std::vector<TypeAtom> atoms;
  for (int k = n(rng); k > 0; --k) {
    switch (pick(rng)) {
      case 0: atoms.push_back(CtorExt{QualName("F")}); break;
      case 1: atoms.push_back(CtorExt{QualName("G")}); break;
      case 2: atoms.push_back(CtorExt{QualName("H")}); break;
      case 3: atoms.push_back(CtorExt{QualName("P")}); break;
      case 4: atoms.push_back(AllStrings{}); break;
      case 5: {
        int a = val(rng), b = val(rng);
        atoms.push_back(IntRange{BigInt(std::min(a, b)), BigInt(std::max(a, b))});
        break;
      }
      case 6:
        atoms.push_back(pick(rng) < 5 ? IntRange{std::nullopt, BigInt(val(rng))}
                                      : IntRange{BigInt(val(rng)), std::nullopt});
        break;
      case 7: atoms.push_back(ConstSet{{Term::integer(val(rng)), Term::string(pick(rng) < 5 ? "a" : "b")}}); break;
      case 8: atoms.push_back(ConstSet{{Term::constant(QualName("NIL")), Term::boolean(pick(rng) < 5)}}); break;
      default: atoms.push_back(ConstSet{{Term::integer(val(rng))}}); break;
    }
  }
  return TypeExpr::from_atoms(atoms);
}

}  // namespace lpmod::test
