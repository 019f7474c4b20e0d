#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "lpmod/engine/engine.hpp"
#include "lpmod/frontend/parser.hpp"
#include "lpmod/transform/transform.hpp"
#include "support.hpp"

using namespace lpmod;
using namespace lpmod::test;

namespace {

Term st(long long i) { return Term::apply(QualName("State"), {Term::integer(i)}); }
Term app(const std::string& f, std::vector<Term> args) { return Term::apply(QualName::parse(f), std::move(args)); }
Term cst(const std::string& c) { return Term::constant(QualName(c)); }

std::set<Term> keyed(const FactStore& s, const std::string& key) { return s.with_key(key); }

FactStore eval_model(const CompiledModel& m, const EvalOptions& o = {}) {
  return evaluate(m.domain->program, m.facts, o);
}

std::shared_ptr<const Comprehension> first_comprehension(const CompiledGoal& g) {
  for (const auto& l : g.disjuncts.at(0)) {
    if (l.comp) return l.comp;
    if (l.lhs.comp) return l.lhs.comp;
  }
  return nullptr;
}

CompiledGoal goal(const SymbolTable& t, const std::string& text) {
  ResolveContext ctx;
  ctx.table = &t;
  ctx.module = "query";
  return compile_goal(frontend::parse_body_text(text), ctx);
}

/// Every program the corpus can evaluate, with its input facts.
std::vector<std::pair<std::string, std::pair<const Program*, std::set<Term>>>> corpus_programs(ModuleEnv& env) {
  std::vector<std::pair<std::string, std::pair<const Program*, std::set<Term>>>> out;
  for (const auto& n : env.names())
    if (env.kind_of(n) == ModuleEnv::Kind::Model) {
      auto m = env.model(n);
      out.push_back({n, {&m->domain->program, m->facts}});
    }
  const std::vector<std::pair<std::string, std::vector<std::string>>> apps = {
      {"Prune", {"TwoStateMachPlus"}}, {"Prune", {"BadMach"}}, {"Parallelize", {"TwoStateMach", "OneStateMach"}}};
  for (const auto& [t, ins] : apps) {
    auto tr = env.transform(t);
    std::set<Term> edb;
    for (std::size_t i = 0; i < ins.size(); ++i) {
      auto f = label_facts(tr->inputs[i].label, env.model(ins[i])->facts);
      edb.insert(f.begin(), f.end());
    }
    out.push_back({t, {&tr->program, edb}});
  }
  for (const auto& d : {"NonDetFSM", "Actions", "DetFSMWithActions", "ParallelFSMs"})
    out.push_back({std::string(d) + "/empty", {&env.domain(d)->program, {}}});
  return out;
}

}  // namespace

TEST(Evaluate, ReachOnTwoStateMach) {
  auto env = corpus_env();
  auto s = eval_model(*env.model("TwoStateMach"));
  EXPECT_EQ(keyed(s, "Reach"), (std::set<Term>{app("Reach", {st(1)}), app("Reach", {st(2)})}));
}

TEST(Evaluate, EmptyEdb) {
  auto env = corpus_env();
  auto d = env.domain("NonDetFSM");
  auto s = evaluate(d->program, {});
  EXPECT_TRUE(keyed(s, "Reach").empty());
  EXPECT_FALSE(s.contains(Term::constant(d->conforms_goal)));
  for (const auto& f : s.all()) EXPECT_EQ(f.kind(), Term::Kind::Constant) << f;
}

TEST(Evaluate, TypeJudgeOnCntrActions) {
  auto env = corpus_env();
  auto s = eval_model(*env.model("CntrActions"));
  Term e = app("BnApp", {cst("ADD"), app("Var", {Term::string("X")}), Term::integer(1)});
  EXPECT_TRUE(s.contains(app("TypeJudge", {e, cst("INT")})));
  EXPECT_TRUE(s.contains(app("TypeJudge", {app("Asn", {Term::string("X"), Term::integer(0)}), cst("INT")})));
  EXPECT_TRUE(s.contains(app("TypeJudge", {app("Asn", {Term::string("X"), e}), cst("INT")})));
}

TEST(Conformance, OneStateMach) {
  auto env = corpus_env();
  EXPECT_TRUE(check_conforms(*env.model("OneStateMach")).conforms);
}

TEST(Conformance, BadMachWitness) {
  auto env = corpus_env();
  auto r = check_conforms(*env.model("BadMach"));
  EXPECT_FALSE(r.conforms);
  std::vector<const ClauseResult*> failed;
  for (const auto& c : r.clauses)
    if (!c.holds) failed.push_back(&c);
  ASSERT_EQ(failed.size(), 1u);
  EXPECT_EQ(failed[0]->clause.module, "NonDetFSM");
  EXPECT_EQ(failed[0]->clause.index, 2u);
  EXPECT_EQ(failed[0]->clause.span.line, 13);
  ASSERT_TRUE(failed[0]->witness);
  EXPECT_EQ(*failed[0]->witness, app("Init", {st(100)}));
}

TEST(Conformance, CntrMachAllClauses) {
  auto env = corpus_env();
  auto r = check_conforms(*env.model("CntrMach"));
  EXPECT_TRUE(r.conforms);
  EXPECT_EQ(r.goal, QualName::parse("DetFSMWithActions.conforms"));
  std::set<std::string> modules;
  for (const auto& c : r.clauses) {
    EXPECT_TRUE(c.holds) << c.clause.text;
    modules.insert(c.clause.module);
  }
  EXPECT_EQ(modules, (std::set<std::string>{"NonDetFSM", "Actions", "DetFSMWithActions"}));
}

TEST(Conformance, ReportIsConjunction) {
  auto env = corpus_env({"functional.4ml", "mutated_actions.4ml"});
  env.elaborate_all();
  for (const auto& n : env.names()) {
    if (env.kind_of(n) != ModuleEnv::Kind::Model) continue;
    auto r = check_conforms(*env.model(n));
    bool all = std::all_of(r.clauses.begin(), r.clauses.end(), [](const auto& c) { return c.holds; });
    EXPECT_EQ(r.conforms, all) << n;
  }
}

TEST(Comprehension, InitSetOfTwoStateMach) {
  auto env = corpus_env();
  auto m = env.model("TwoStateMach");
  auto s = eval_model(*m);
  auto g = goal(m->table, "count({ s | Init(s) }) = 1");
  auto comp = first_comprehension(g);
  ASSERT_TRUE(comp);
  EXPECT_EQ(eval_comprehension(*comp, {}, s, m->table), std::set<Term>{st(1)});
  EXPECT_EQ(query(g, s, m->table).size(), 1u);
}

TEST(Comprehension, OuterBindingCaptured) {
  auto env = corpus_env();
  auto m = env.model("BadMach");
  auto s = eval_model(*m);
  auto g = goal(m->table, "i is Init, no { s | s is State, s = i.st }");
  auto comp = first_comprehension(g);
  ASSERT_TRUE(comp);
  EXPECT_TRUE(eval_comprehension(*comp, {{"i", app("Init", {st(100)})}}, s, m->table).empty());
  EXPECT_EQ(eval_comprehension(*comp, {{"i", app("Init", {st(1)})}}, s, m->table), std::set<Term>{st(1)});
}

TEST(Comprehension, EmptyStore) {
  auto env = corpus_env();
  auto m = env.model("TwoStateMach");
  auto comp = first_comprehension(goal(m->table, "count({ s | Init(s) }) = 1"));
  EXPECT_TRUE(eval_comprehension(*comp, {}, FactStore{}, m->table).empty());
}

TEST(Query, ReachBindings) {
  auto env = corpus_env();
  auto m = env.model("TwoStateMach");
  auto b = query_model(*m, "Reach(x)");
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0].at("x"), st(1));
  EXPECT_EQ(b[1].at("x"), st(2));
  EXPECT_TRUE(query_model(*m, "Reach(State(7))").empty());
}

TEST(Query, TypeJudgeBoolIsEmpty) {
  auto env = corpus_env();
  auto m = env.model("CntrActions");
  EXPECT_TRUE(query_model(*m, "TypeJudge(e, BOOL)").empty());
  auto ints = query_model(*m, "TypeJudge(e, INT)");
  EXPECT_EQ(ints.size(), 6u);
}

TEST(Query, UnresolvedName) {
  auto env = corpus_env();
  EXPECT_EQ(error_code([&] { query_model(*env.model("TwoStateMach"), "Nope(x)"); }), code::kUnresolved);
}

TEST(Evaluate, ArithmeticAndComparisons) {
  auto env = text_env(
      "domain Ar { P ::= new (Integer). Q ::= (Integer). Q(z) :- P(x), P(y), x < y, z = x * y - 1. } "
      "model M of Ar { P(2). P(5). P(-3). }");
  auto s = eval_model(*env.model("M"));
  EXPECT_EQ(keyed(s, "Q"), (std::set<Term>{app("Q", {Term::integer(9)}), app("Q", {Term::integer(-7)}),
                                           app("Q", {Term::integer(-16)})}));
}

TEST(Evaluate, DivisionByZero) {
  auto env = text_env("domain Dv { P ::= new (Integer). Q ::= (Integer). Q(z) :- P(x), z = 10 / x. } "
                      "model M of Dv { P(0). }");
  EXPECT_EQ(error_code([&] { eval_model(*env.model("M")); }), code::kEvaluation);
}

TEST(Evaluate, FactCap) {
  auto env = text_env("domain Nat { N ::= (Integer). N(y) :- y = 0; N(x), y = x + 1. }");
  EvalOptions o;
  o.max_facts = 50;
  EXPECT_EQ(error_code([&] { evaluate(env.domain("Nat")->program, {}, o); }), code::kResourceLimit);
}

TEST(Evaluate, FactCapFromEnvironment) {
  ::setenv("LPMOD_MAX_FACTS", "123", 1);
  EXPECT_EQ(default_fact_cap(), 123u);
  ::unsetenv("LPMOD_MAX_FACTS");
  EXPECT_EQ(default_fact_cap(), 1000000u);
}

// Properties

TEST(EngineProperty, NaiveMatchesSemiNaiveOnCorpus) {
  auto env = corpus_env();
  EvalOptions naive;
  naive.naive = true;
  for (const auto& [name, prog] : corpus_programs(env)) {
    auto a = evaluate(*prog.first, prog.second);
    auto b = evaluate(*prog.first, prog.second, naive);
    EXPECT_EQ(a.serialize(), b.serialize()) << name;
  }
}

TEST(EngineProperty, NaiveMatchesSemiNaiveOnRandomFsms) {
  std::mt19937 rng(1234);
  std::string text;
  for (int i = 0; i < 50; ++i) {
    auto shape = random_shape(rng, 8, 3);
    shape.broken = i % 7 == 0;
    text += fsm_model("R" + std::to_string(i), shape, rng);
  }
  auto env = corpus_with(text);
  EvalOptions naive;
  naive.naive = true;
  auto prune = env.transform("Prune");
  for (int i = 0; i < 50; ++i) {
    auto m = env.model("R" + std::to_string(i));
    EXPECT_EQ(eval_model(*m), eval_model(*m, naive)) << i;
    auto edb = label_facts("in", m->facts);
    EXPECT_EQ(evaluate(prune->program, edb), evaluate(prune->program, edb, naive)) << i;
  }
}

TEST(EngineProperty, MonotoneInStratumZero) {
  std::mt19937 rng(77);
  auto env = corpus_env();
  const auto& prog = env.domain("NonDetFSM")->program;
  std::set<std::string> low;
  for (const auto& r : prog.rules)
    if (r.stratum == 0) low.insert(r.head.index_key());
  std::uniform_int_distribution<int> st_d(1, 8);
  for (int i = 0; i < 40; ++i) {
    auto shape = random_shape(rng, 8, 3);
    auto m = corpus_with(fsm_model("M", shape, rng)).model("M");
    auto before = evaluate(prog, m->facts);
    auto more = m->facts;
    more.insert(app("Trans", {st(st_d(rng)), app("Event", {Term::string("e0")}), st(st_d(rng))}));
    more.insert(app("Init", {st(st_d(rng))}));
    auto after = evaluate(prog, more);
    for (const auto& f : before.all())
      if (low.count(f.index_key()) || m->facts.count(f)) EXPECT_TRUE(after.contains(f)) << f;
  }
}

TEST(EngineProperty, Deterministic) {
  for (int round = 0; round < 2; ++round) {
    auto e1 = corpus_env(), e2 = corpus_env();
    for (const auto& [name, prog] : corpus_programs(e1)) {
      auto a = evaluate(*prog.first, prog.second).serialize();
      EXPECT_EQ(a, evaluate(*prog.first, prog.second).serialize()) << name;
    }
    for (const char* m : {"CntrMach", "ParallelCntrs", "TwoStateMachPlus"})
      EXPECT_EQ(eval_model(*e1.model(m)).serialize(), eval_model(*e2.model(m)).serialize()) << m;
  }
}

TEST(EngineProperty, ConformsIffConstantDerived) {
  std::mt19937 rng(4321);
  std::string text;
  for (int i = 0; i < 30; ++i) {
    auto shape = random_shape(rng, 6, 3);
    shape.broken = i % 3 == 0;
    text += fsm_model("C" + std::to_string(i), shape, rng);
  }
  auto env = corpus_with(text);
  int yes = 0, no = 0;
  for (const auto& n : env.names()) {
    if (env.kind_of(n) != ModuleEnv::Kind::Model) continue;
    auto m = env.model(n);
    bool in_p = eval_model(*m).contains(Term::constant(m->domain->conforms_goal));
    bool conforms = check_conforms(*m).conforms;
    EXPECT_EQ(in_p, conforms) << n;
    (conforms ? yes : no)++;
  }
  EXPECT_GT(yes, 0);
  EXPECT_GT(no, 0);
}
