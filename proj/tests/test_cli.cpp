#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "lpmod/cli/cli.hpp"
#include "lpmod/engine/engine.hpp"
#include "support.hpp"

using namespace lpmod::test;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kRoot = fs::path(LPMOD_CORPUS_DIR).parent_path().string() + "/";

std::vector<std::string> with_corpus(std::vector<std::string> args) {
  args.insert(args.begin() + 1, {"-I", LPMOD_CORPUS_DIR});
  return args;
}

/// Output with the checkout prefix stripped from paths.
std::string portable(std::string s) {
  for (std::size_t p; (p = s.find(kRoot)) != std::string::npos;) s.erase(p, kRoot.size());
  return s;
}

/// Compares against tests/golden/<name>; LPMOD_UPDATE_GOLDEN=1 rewrites it.
void expect_golden(const std::string& name, const std::string& text) {
  std::string got = portable(text);
  ASSERT_NO_THROW((void)json::parse(got)) << got;
  if (std::getenv("LPMOD_UPDATE_GOLDEN")) {
    std::ofstream(golden_path(name)) << got;
    return;
  }
  ASSERT_TRUE(fs::exists(golden_path(name))) << name;
  EXPECT_EQ(got, slurp(golden_path(name))) << name;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("lpmod_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Cli, CheckCorpus) {
  auto r = run_cli({"check", LPMOD_CORPUS_DIR});
  EXPECT_EQ(r.exit, lpmod::cli::kOk) << r.err;
}

TEST(Cli, CheckKindClash) {
  auto r = run_cli({"check", fixture_path("kind_clash.4ml")});
  EXPECT_EQ(r.exit, lpmod::cli::kCompileOrNoAnswer);
  EXPECT_NE(r.err.find("kind_clash.4ml:3:4: error:"), std::string::npos) << r.err;
}

TEST(Cli, CheckEmptyFile) {
  auto dir = scratch("empty");
  fs::create_directories(dir);
  std::ofstream(dir / "empty.4ml") << "";
  auto r = run_cli({"check", (dir / "empty.4ml").string()});
  EXPECT_EQ(r.exit, lpmod::cli::kOk);
  EXPECT_NE(r.err.find("warning: no modules loaded"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, CheckSyntaxError) {
  auto r = run_cli({"check", fixture_path("even_odd.4ml")});
  EXPECT_EQ(r.exit, lpmod::cli::kCompileOrNoAnswer);
}

TEST(Cli, ConformExitCodes) {
  EXPECT_EQ(run_cli(with_corpus({"conform", "OneStateMach"})).exit, lpmod::cli::kOk);
  EXPECT_EQ(run_cli(with_corpus({"conform", "CntrMach"})).exit, lpmod::cli::kOk);
  auto bad = run_cli(with_corpus({"conform", "BadMach"}));
  EXPECT_EQ(bad.exit, lpmod::cli::kNonConforming);
  EXPECT_NE(bad.out.find("Init(State(100))"), std::string::npos) << bad.out;
  auto unknown = run_cli(with_corpus({"conform", "Nope"}));
  EXPECT_EQ(unknown.exit, lpmod::cli::kCompileOrNoAnswer);
  EXPECT_EQ(unknown.err, "error: unknown model 'Nope'\n");
}

TEST(Cli, ApplyWritesOutput) {
  auto dir = scratch("apply");
  auto r = run_cli(with_corpus({"apply", "Prune", "TwoStateMach", "-o", dir.string()}));
  EXPECT_EQ(r.exit, lpmod::cli::kOk) << r.err;
  auto text = slurp((dir / "out.4ml").string());
  auto env = corpus_env();
  env.load_text(text, "out.4ml");
  EXPECT_EQ(env.model("Prune_out")->facts, env.model("TwoStateMach")->facts);
  fs::remove_all(dir);
}

TEST(Cli, ApplyContractExitCodes) {
  EXPECT_EQ(run_cli(with_corpus({"apply", "Prune", "BadMach"})).exit, lpmod::cli::kRequiresViolated);
  auto dir = scratch("contracts");
  fs::create_directories(dir);
  std::ofstream(dir / "drop.4ml") << "transform Drop (in:: NonDetFSM) returns (out:: NonDetFSM)\n"
                                     "{ ensures out.conforms. out.State(x) :- in.State(x). }\n";
  auto args = with_corpus({"apply", "-I", (dir / "drop.4ml").string(), "Drop", "TwoStateMach", "-o",
                           (dir / "out").string()});
  EXPECT_EQ(run_cli(args).exit, lpmod::cli::kEnsuresViolated);
  EXPECT_FALSE(fs::exists(dir / "out" / "out.4ml"));
  args.push_back("--force");
  EXPECT_EQ(run_cli(args).exit, lpmod::cli::kEnsuresViolated);
  EXPECT_TRUE(fs::exists(dir / "out" / "out.4ml"));
  fs::remove_all(dir);
}

TEST(Cli, RunPipeline) {
  auto dir = scratch("run");
  auto r = run_cli(with_corpus({"run", "PruneAndParallelize", "in1=TwoStateMach", "in2=TwoStateMach", "-o",
                                dir.string(), "--keep-intermediates", (dir / "k").string()}));
  EXPECT_EQ(r.exit, lpmod::cli::kOk) << r.err;
  EXPECT_TRUE(fs::exists(dir / "k" / "prune1.4ml"));
  auto env = corpus_env();
  env.load_text(slurp((dir / "out.4ml").string()), "out.4ml");
  std::string name;
  for (const auto& n : env.names())
    if (env.kind_of(n) == lpmod::ModuleEnv::Kind::Model && env.model(n)->domain->name == "ParallelFSMs" &&
        n != "ParallelCntrs")
      name = n;
  ASSERT_FALSE(name.empty());
  EXPECT_TRUE(lpmod::check_conforms(*env.model(name)).conforms);
  EXPECT_EQ(run_cli(with_corpus({"run", "-I", fixture_path("cyclic_pipeline.4ml"), "Loop", "in=TwoStateMach"})).exit,
            lpmod::cli::kCompileOrNoAnswer);
  fs::remove_all(dir);
}

TEST(Cli, SymbolsListing) {
  auto r = run_cli(with_corpus({"symbols", "NonDetFSM"}));
  EXPECT_EQ(r.exit, lpmod::cli::kOk);
  EXPECT_NE(r.out.find("| Reach | δ | 1\n"), std::string::npos);
  EXPECT_NE(r.out.find("NonDetFSM | conforms | δ | 0\n"), std::string::npos);
  auto listing = run_cli(with_corpus({"symbols", "ParallelCntrs"}));
  EXPECT_EQ(listing.out, slurp(fixture_path("parallel_cntrs_symbols.txt")));
}

TEST(Cli, SymbolsOfEmptyDomain) {
  auto dir = scratch("emptydomain");
  fs::create_directories(dir);
  std::ofstream(dir / "e.4ml") << "domain Empty { }\n";
  auto r = run_cli({"symbols", "-I", (dir / "e.4ml").string(), "Empty"});
  EXPECT_EQ(r.out, "Empty | conforms | δ | 0\n");
  fs::remove_all(dir);
}

TEST(Cli, QueryExitCodes) {
  auto two = run_cli(with_corpus({"query", "TwoStateMach", "Reach(x)"}));
  EXPECT_EQ(two.exit, lpmod::cli::kOk);
  EXPECT_EQ(two.out, "x = State(1)\nx = State(2)\n");
  EXPECT_EQ(run_cli(with_corpus({"query", "TwoStateMach", "Reach(State(9))"})).exit, lpmod::cli::kCompileOrNoAnswer);
  auto ints = run_cli(with_corpus({"query", "CntrActions", "TypeJudge(e, INT)"}));
  EXPECT_EQ(ints.exit, lpmod::cli::kOk);
  EXPECT_NE(ints.out.find("Asn(\"X\", BnApp(ADD, Var(\"X\"), 1))"), std::string::npos) << ints.out;
}

TEST(Cli, MaxFactsFlag) {
  auto dir = scratch("cap");
  fs::create_directories(dir);
  std::ofstream(dir / "nat.4ml") << "domain Nat { N ::= (Integer). N(y) :- y = 0; N(x), y = x + 1. }\n"
                                    "model Z of Nat { }\n";
  auto r = run_cli({"conform", "-I", (dir / "nat.4ml").string(), "Z", "--max-facts", "100"});
  EXPECT_EQ(r.exit, lpmod::cli::kCompileOrNoAnswer);
  EXPECT_NE(r.err.find("100"), std::string::npos) << r.err;
  fs::remove_all(dir);
}

TEST(Cli, UsageError) { EXPECT_NE(run_cli({"frobnicate"}).exit, lpmod::cli::kOk); }

TEST(Golden, ConformBadMach) { expect_golden("conform_badmach.json", run_cli(with_corpus({"conform", "BadMach", "--json"})).out); }
TEST(Golden, ConformCntrMach) { expect_golden("conform_cntrmach.json", run_cli(with_corpus({"conform", "CntrMach", "--json"})).out); }
TEST(Golden, ApplyPruneBadMach) { expect_golden("apply_prune_badmach.json", run_cli(with_corpus({"apply", "Prune", "BadMach", "--json"})).out); }
TEST(Golden, QueryReach) { expect_golden("query_reach.json", run_cli(with_corpus({"query", "TwoStateMach", "Reach(x)", "--json"})).out); }
TEST(Golden, SymbolsNonDetFsm) { expect_golden("symbols_nondetfsm.json", run_cli(with_corpus({"symbols", "NonDetFSM", "--json"})).out); }
TEST(Golden, CheckKindClash) { expect_golden("check_kind_clash.json", run_cli({"check", fixture_path("kind_clash.4ml"), "--json"}).out); }

TEST(Golden, RunPipeline) {
  auto dir = scratch("golden_run");
  auto r = run_cli(with_corpus({"run", "PruneAndParallelize", "in1=TwoStateMach", "in2=TwoStateMachPlus", "-o",
                                dir.string(), "--json"}));
  auto j = json::parse(r.out);
  ASSERT_TRUE(j.contains("outputs"));
  // The output directory varies per run.
  for (auto& o : j["outputs"]) o.erase("path");
  expect_golden("run_pipeline.json", j.dump(2) + "\n");
  fs::remove_all(dir);
}

TEST(Golden, StableAcrossRuns) {
  auto a = run_cli(with_corpus({"conform", "ParallelCntrs", "--json"})).out;
  auto b = run_cli(with_corpus({"conform", "ParallelCntrs", "--json"})).out;
  EXPECT_EQ(a, b);
  EXPECT_EQ(json::parse(a)["schema"], "lpmod.conform/1");
}
