#include <gtest/gtest.h>

#include "lpmod/frontend/parser.hpp"
#include "support.hpp"

using namespace lpmod;
using namespace lpmod::frontend;
using lpmod::test::corpus_files;
using lpmod::test::error_code;
using lpmod::test::slurp;

namespace {

std::vector<std::pair<Tok, std::string>> kinds(std::string_view text) {
  std::vector<std::pair<Tok, std::string>> out;
  for (const auto& t : tokenize(text)) out.emplace_back(t.kind, t.text);
  return out;
}

template <class T>
std::size_t count_items(const RawModuleDecl& d) {
  std::size_t n = 0;
  for (const auto& it : d.body) n += std::holds_alternative<T>(it);
  return n;
}

const RawModuleDecl& find_decl(const SourceUnit& u, const std::string& name) {
  for (const auto& d : u.decls)
    if (d.name == name) return d;
  throw std::runtime_error("no decl " + name);
}

}  // namespace

TEST(Tokenize, StateDeclaration) {
  auto got = kinds("State ::= new (id: Integer).");
  std::vector<std::pair<Tok, std::string>> want = {
      {Tok::Ident, "State"}, {Tok::Define, "::="}, {Tok::Keyword, "new"}, {Tok::LParen, "("},
      {Tok::Ident, "id"},    {Tok::Colon, ":"},    {Tok::Ident, "Integer"}, {Tok::RParen, ")"},
      {Tok::Dot, "."}};
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(got[i].first, want[i].first) << i;
    EXPECT_EQ(got[i].second, want[i].second) << i;
  }
}

TEST(Tokenize, EmptyText) { EXPECT_TRUE(tokenize("").empty()); }

TEST(Tokenize, PrimedIdentifier) {
  auto toks = tokenize("Trans(s', _, s)");
  ASSERT_EQ(toks.size(), 8u);
  EXPECT_EQ(toks[2].kind, Tok::Ident);
  EXPECT_EQ(toks[2].text, "s'");
  EXPECT_EQ(toks[4].kind, Tok::Wildcard);
}

TEST(Tokenize, CommentsDropped) {
  auto toks = tokenize("//// banner\nState // trailing\n");
  ASSERT_EQ(toks.size(), 1u);
  EXPECT_EQ(toks[0].span.line, 2);
}

TEST(Tokenize, NegativeIntegersAndStrings) {
  auto toks = tokenize(R"(X(-3, "a\"b"))");
  ASSERT_GE(toks.size(), 5u);
  EXPECT_EQ(toks[2].kind, Tok::Integer);
  EXPECT_EQ(toks[2].text, "-3");
  EXPECT_EQ(toks[4].kind, Tok::String);
  EXPECT_EQ(toks[4].text, "a\"b");
}

TEST(Tokenize, SpansAreOneBased) {
  auto toks = tokenize("a\n  bc");
  EXPECT_EQ(toks[1].span.line, 2);
  EXPECT_EQ(toks[1].span.col, 3);
  EXPECT_EQ(toks[1].span.length, 2);
}

TEST(Tokenize, LexErrors) {
  EXPECT_EQ(error_code([] { tokenize("\"open"); }), code::kLex);
  EXPECT_EQ(error_code([] { tokenize("State # x"); }), code::kLex);
}

TEST(Parse, NonDetFsmShape) {
  auto u = parse_source(slurp(lpmod::test::corpus_path("fsm.4ml")));
  const auto& d = find_decl(u, "NonDetFSM");
  EXPECT_EQ(d.kind, RawModuleDecl::Kind::Domain);
  std::size_t news = 0, derived = 0;
  for (const auto& it : d.body)
    if (const auto* t = std::get_if<TypeDecl>(&it)) {
      news += t->marker == TypeDecl::Marker::New;
      derived += t->marker == TypeDecl::Marker::None && t->form == TypeDecl::Form::Ctor;
    }
  EXPECT_EQ(news, 4u);
  EXPECT_EQ(derived, 1u);
  EXPECT_EQ(count_items<RawRule>(d), 1u);
  EXPECT_EQ(count_items<RawClause>(d), 5u);
}

TEST(Parse, ParallelFsmsHeader) {
  auto u = parse_source(slurp(lpmod::test::corpus_path("parallel.4ml")));
  const auto& d = find_decl(u, "ParallelFSMs");
  ASSERT_EQ(d.imports.size(), 2u);
  EXPECT_EQ(d.imports[0].mode, Import::Mode::Extends);
  EXPECT_EQ(d.imports[0].prefix, std::optional<std::string>("left"));
  EXPECT_EQ(d.imports[0].target, "DetFSMWithActions");
  EXPECT_EQ(d.imports[1].prefix, std::optional<std::string>("right"));
  EXPECT_TRUE(d.body.empty());
}

TEST(Parse, TransformSignature) {
  auto u = parse_source(slurp(lpmod::test::corpus_path("prune.4ml")));
  const auto& d = find_decl(u, "Prune");
  EXPECT_EQ(d.kind, RawModuleDecl::Kind::Transform);
  ASSERT_EQ(d.imports.size(), 2u);
  EXPECT_EQ(d.imports[0].mode, Import::Mode::Input);
  EXPECT_EQ(d.imports[1].mode, Import::Mode::Output);
}

TEST(Parse, PipelineEquations) {
  auto u = parse_source(slurp(lpmod::test::corpus_path("pipeline.4ml")));
  const auto& d = find_decl(u, "PruneAndParallelize");
  EXPECT_EQ(d.kind, RawModuleDecl::Kind::TransformSystem);
  EXPECT_EQ(count_items<PipelineEq>(d), 3u);
}

TEST(Parse, MissingDotReportsBrace) {
  try {
    parse_source("model M of D { X(1) }");
    FAIL() << "accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code::kSyntax);
    EXPECT_EQ(e.diagnostic().col, 21);
  }
}

TEST(Parse, DuplicateModule) {
  EXPECT_EQ(error_code([] { parse_source("domain A { } domain A { }"); }), code::kDuplicateModule);
}

TEST(Parse, MultiHeadRule) {
  auto u = parse_source("domain D { A ::= (Integer). A(x), A(y) :- A(x), y = x. }");
  const auto& r = std::get<RawRule>(u.decls[0].body[1]);
  EXPECT_EQ(r.heads.size(), 2u);
}

TEST(Parse, DisjunctionLooserThanConjunction) {
  auto b = parse_body_text("A(x), B(x); C(x)");
  ASSERT_EQ(b.disjuncts.size(), 2u);
  EXPECT_EQ(b.disjuncts[0].size(), 2u);
  EXPECT_EQ(b.disjuncts[1].size(), 1u);
}

TEST(Parse, PerArgumentRefinementRejected) {
  EXPECT_EQ(error_code([] { parse_source(slurp(lpmod::test::fixture_path("even_odd.4ml"))); }), code::kSyntax);
}

// Property: print then parse is the identity on every corpus file.
TEST(RoundTrip, Corpus) {
  for (const auto& f : corpus_files()) {
    auto u = parse_source(slurp(f), f);
    auto printed = print_unit(u);
    auto again = parse_source(printed, f);
    EXPECT_EQ(u, again) << f << "\n" << printed;
    EXPECT_EQ(print_unit(again), printed) << f;
  }
}

TEST(RoundTrip, Fixtures) {
  for (const char* f : {"copy.4ml", "functional.4ml", "lists.4ml", "mutated_actions.4ml", "negative_loop.4ml",
                        "rewrite_ambiguous.4ml", "rewrite_none.4ml", "symconst_cycle.4ml", "cyclic_pipeline.4ml"}) {
    auto u = parse_source(slurp(lpmod::test::fixture_path(f)));
    EXPECT_EQ(u, parse_source(print_unit(u))) << f;
  }
}

TEST(Parse, ActionsDomainParses) {
  auto u = parse_source(slurp(lpmod::test::corpus_path("actions.4ml")));
  const auto& d = find_decl(u, "Actions");
  EXPECT_GT(count_items<RawRule>(d), 5u);
  EXPECT_GE(count_items<RawClause>(d), 1u);
}
