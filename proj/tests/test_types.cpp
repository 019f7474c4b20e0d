#include <gtest/gtest.h>

#include <random>

#include "lpmod/symtab/symbol_table.hpp"
#include "support.hpp"

using namespace lpmod;
using namespace lpmod::test;

namespace {

Term st(long long i) { return Term::apply(QualName("State"), {Term::integer(i)}); }
Term q(const std::string& dotted, std::vector<Term> args) { return Term::apply(QualName::parse(dotted), std::move(args)); }

TypeExpr decl_type(ModuleEnv& env, const std::string& domain, const std::string& sym) {
  const SymbolEntry* e = env.domain(domain)->table().find(QualName::parse(sym));
  if (!e) throw std::runtime_error("missing " + sym);
  return e->denotation;
}

}  // namespace

TEST(Subtype, IntegerInIntegerOrString) {
  EXPECT_TRUE(is_subtype(TypeExpr::integers(), TypeExpr::integers().unite(TypeExpr::strings())));
  EXPECT_FALSE(is_subtype(TypeExpr::integers().unite(TypeExpr::strings()), TypeExpr::integers()));
}

TEST(Subtype, NopInAction) {
  ModuleEnv env = corpus_env();
  EXPECT_TRUE(is_subtype(TypeExpr::constant(Term::constant(QualName("NOP"))), decl_type(env, "Actions", "Action")));
}

TEST(Subtype, TransNotInInit) {
  EXPECT_FALSE(is_subtype(TypeExpr::ctor(QualName("Trans")), TypeExpr::ctor(QualName("Init"))));
  // Oracle: a Trans term lies in the first denotation only.
  ModuleEnv env = corpus_env();
  const auto& t = env.domain("NonDetFSM")->table();
  Term w = Term::apply(QualName("Trans"), {st(1), Term::apply(QualName("Event"), {Term::string("a")}), st(1)});
  EXPECT_TRUE(oracle_member(w, TypeExpr::ctor(QualName("Trans")), t));
  EXPECT_FALSE(oracle_member(w, TypeExpr::ctor(QualName("Init")), t));
}

TEST(TypeEqual, UnionCommutes) {
  auto f = TypeExpr::ctor(QualName("F"));
  auto one = TypeExpr::constant(Term::integer(1));
  EXPECT_TRUE(type_equal(f.unite(one), one.unite(f)));
}

TEST(TypeEqual, RangeVersusConstSet) {
  std::vector<TypeAtom> cs{ConstSet{{Term::integer(0), Term::integer(1), Term::integer(2), Term::integer(3),
                                     Term::integer(4), Term::integer(5)}}};
  auto a = TypeExpr::range(BigInt(0), BigInt(5));
  auto b = TypeExpr::from_atoms(cs);
  EXPECT_TRUE(type_equal(a, b));
  for (int i = 0; i <= 5; ++i) {
    EXPECT_TRUE(oracle_member(Term::integer(i), a, oracle_ctx()));
    EXPECT_TRUE(oracle_member(Term::integer(i), b, oracle_ctx()));
  }
}

TEST(TypeEqual, ExprExpansion) {
  ModuleEnv env = corpus_env();
  auto expr = decl_type(env, "Actions", "Expr");
  auto spelled = TypeExpr::ctor(QualName("Var"))
                     .unite(TypeExpr::ctor(QualName("UnApp")))
                     .unite(TypeExpr::ctor(QualName("BnApp")))
                     .unite(TypeExpr::booleans())
                     .unite(TypeExpr::integers());
  EXPECT_TRUE(type_equal(expr, spelled));
}

TEST(Relabel, InToOut) {
  RelabelingSpec rho{{"in"}, {"out"}};
  EXPECT_EQ(relabel_term(rho, q("in.State", {Term::integer(1)})), q("out.State", {Term::integer(1)}));
}

TEST(Relabel, Identity) {
  RelabelingSpec id{};
  Term t = Term::apply(QualName("Trans"), {st(1), Term::apply(QualName("Event"), {Term::string("x")}), st(2)});
  EXPECT_EQ(relabel_term(id, t), t);
}

TEST(Relabel, LeftToEpsilonKeepsConstants) {
  RelabelingSpec rho{{"left"}, {}};
  Term t = q("left.Trans", {q("left.State", {Term::integer(1)}), q("left.Event", {Term::string("foo")}),
                            q("left.State", {Term::integer(2)})});
  Term want = Term::apply(QualName("Trans"), {st(1), Term::apply(QualName("Event"), {Term::string("foo")}), st(2)});
  EXPECT_EQ(relabel_term(rho, t), want);
}

TEST(Relabel, PrefixMismatchThrows) {
  RelabelingSpec rho{{"in"}, {"out"}};
  EXPECT_THROW(relabel_term(rho, st(1)), Error);
}

TEST(RelabelType, Examples) {
  RelabelingSpec rho{{"in"}, {"out"}};
  EXPECT_EQ(relabel_type(rho, TypeExpr::ctor(QualName::parse("in.State"))), TypeExpr::ctor(QualName::parse("out.State")));
  auto add = TypeExpr::constant(Term::constant(QualName("ADD")));
  EXPECT_EQ(relabel_type(RelabelingSpec{{"left"}, {"right"}}, add), add);
  auto mixed = TypeExpr::integers().unite(TypeExpr::ctor(QualName::parse("in.Var")));
  EXPECT_EQ(relabel_type(rho, mixed), TypeExpr::integers().unite(TypeExpr::ctor(QualName::parse("out.Var"))));
}

TEST(TermOrder, Examples) {
  EXPECT_EQ(term_order(Term::integer(1), Term::integer(2)), std::strong_ordering::less);
  EXPECT_EQ(term_order(st(1), st(1)), std::strong_ordering::equal);
  EXPECT_EQ(term_order(Term::apply(QualName("Event"), {Term::string("a")}), st(0)), std::strong_ordering::less);
  EXPECT_EQ(term_order(Term::string("z"), Term::constant(QualName("A"))), std::strong_ordering::less);
  EXPECT_EQ(term_order(Term::integer(99), Term::string("")), std::strong_ordering::less);
  EXPECT_EQ(term_order(Term::constant(QualName("NOP")), st(0)), std::strong_ordering::less);
}

TEST(Integers, ArbitraryPrecision) {
  BigInt big = BigInt(1) << 100;
  auto t = Term::integer(big);
  EXPECT_EQ(t.int_value(), big);
  EXPECT_TRUE(TypeExpr::integers().admits(t));
}

// Properties

TEST(TypeProperty, RelabelRoundTrip) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> d(0, 4), v(-20, 20);
  const std::vector<Qualifiers> prefixes = {{"in"}, {"a", "b"}, {"left"}};
  std::function<Term(const Qualifiers&, int)> gen = [&](const Qualifiers& p, int depth) -> Term {
    int k = depth == 0 ? d(rng) % 3 : d(rng);
    if (k == 0) return Term::integer(v(rng));
    if (k == 1) return Term::string(std::string(1, char('a' + (v(rng) + 20) % 3)));
    if (k == 2) return Term::constant(QualName("NOP"));
    std::vector<Term> args;
    for (int i = 0; i < k - 2; ++i) args.push_back(gen(p, depth - 1));
    return Term::apply(QualName(p, k == 3 ? "F" : "G"), std::move(args));
  };
  for (int i = 0; i < 200; ++i) {
    const auto& p = prefixes[i % 3];
    const auto& r = prefixes[(i + 1) % 3];
    Term t = gen(p, 3);
    RelabelingSpec fwd{p, r}, back{r, p};
    EXPECT_EQ(relabel_term(back, relabel_term(fwd, t)), t) << t;
  }
}

TEST(TypeProperty, SubtypeIsPreorder) {
  std::mt19937 rng(23);
  const auto universe = bounded_universe(oracle_ctx());
  for (int i = 0; i < 150; ++i) {
    auto a = random_type(rng), b = random_type(rng), c = random_type(rng);
    EXPECT_TRUE(is_subtype(a, a)) << a.str();
    if (is_subtype(a, b) && is_subtype(b, c)) EXPECT_TRUE(is_subtype(a, c)) << a.str() << " " << b.str() << " " << c.str();
    // Soundness against the enumeration.
    if (is_subtype(a, b)) {
      auto da = oracle_denotation(a, universe, oracle_ctx()), db = oracle_denotation(b, universe, oracle_ctx());
      EXPECT_TRUE(std::includes(db.begin(), db.end(), da.begin(), da.end())) << a.str() << " <= " << b.str();
    }
  }
}

TEST(TypeProperty, TypeEqualMatchesOracle) {
  std::mt19937 rng(5);
  const auto universe = bounded_universe(oracle_ctx());
  ASSERT_GT(universe.size(), 50u);
  int equal_pairs = 0;
  for (int i = 0; i < 400; ++i) {
    auto a = random_type(rng);
    auto b = i % 4 == 0 ? TypeExpr::from_atoms(a.atoms()).unite(random_type(rng).intersect(a)) : random_type(rng);
    bool oracle = oracle_denotation(a, universe, oracle_ctx()) == oracle_denotation(b, universe, oracle_ctx());
    EXPECT_EQ(type_equal(a, b), oracle) << a.str() << " vs " << b.str();
    equal_pairs += oracle;
  }
  EXPECT_GT(equal_pairs, 0);
}

TEST(TypeProperty, NormalizeIdempotent) {
  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    auto a = random_type(rng);
    auto once = TypeExpr::from_atoms(a.atoms());
    auto twice = TypeExpr::from_atoms(once.atoms());
    EXPECT_EQ(once, a);
    EXPECT_EQ(twice, once);
  }
}

TEST(TypeProperty, AdmitsAgreesWithOracleOnBaseTerms) {
  std::mt19937 rng(3);
  const auto universe = bounded_universe(oracle_ctx());
  for (int i = 0; i < 100; ++i) {
    auto a = random_type(rng);
    for (const auto& t : universe)
      if (t.kind() != Term::Kind::Apply) EXPECT_EQ(a.admits(t), oracle_member(t, a, oracle_ctx())) << a.str() << " " << t;
  }
}

TEST(TypeProperty, DeepMembershipMatchesOracle) {
  std::mt19937 rng(9);
  const auto universe = bounded_universe(oracle_ctx());
  for (int i = 0; i < 100; ++i) {
    auto a = random_type(rng);
    for (const auto& t : universe) EXPECT_EQ(is_member(t, a, oracle_ctx()), oracle_member(t, a, oracle_ctx())) << a.str() << " " << t;
  }
}
