#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "letrecopt/cli.hpp"
#include "letrecopt/corpus.hpp"

using namespace letrecopt;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = runCommand(args, out, err);
  return {code, out.str(), err.str()};
}

std::string corpusFile(const std::string& name) { return std::string(LETRECOPT_CORPUS_DIR) + "/" + name; }

fs::path scratchFile(const std::string& name, const std::string& content) {
  fs::path p = fs::temp_directory_path() / ("letrecopt_test_" + name);
  std::ofstream(p, std::ios::binary) << content;
  return p;
}

}  // namespace

TEST_CASE("corpus layout") {
  auto corpus = loadCorpus(LETRECOPT_CORPUS_DIR);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(LETRECOPT_CORPUS_DIR)) files += e.path().extension() == ".ll";
  CHECK(files >= 10);
  std::size_t paired = 0;
  for (const CorpusEntry& e : corpus) paired += e.expectedOptimized ? 1 : 0;
  CHECK(paired == files - corpus.size());
  CHECK(corpus.front().name == "append");
  CHECK_THROWS_AS(loadCorpus("/nonexistent-dir"), DataError);
}

TEST_CASE("bench setup files") {
  BenchSetup s = parseBenchSetup("-- comment\nsubst caseL = \\l. l\narg c\n\narg \\x. x\n");
  CHECK(s.substitutions.size() == 1);
  CHECK(s.args.size() == 2);
  CHECK(print(instantiate(parse("caseL f"), s)) == "(\\l. l) f c (\\x. x)");
  CHECK_THROWS_AS(parseBenchSetup("foo c"), ParseError);
  CHECK_THROWS_AS(parseBenchSetup("subst 1x = c"), ParseError);
  try {
    parseBenchSetup("arg c\narg (");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("parse subcommand and exit codes") {
  Run ok = run({"parse", corpusFile("repeat.ll")});
  CHECK(ok.code == 0);
  CHECK(ok.out == "letrec repeat = \\x. cons x (repeat x) in repeat\n");
  CHECK(run({"parse", "nosuchfile.ll"}).code == kExitData);
  CHECK(run({"parse", scratchFile("bad.ll", "\\x. (").string()}).code == kExitData);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"optimize", corpusFile("repeat.ll"), "--report", "yaml"}).code == kExitUsage);
  Run help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("check-equiv") != std::string::npos);
}

TEST_CASE("analyze emits edges and cycles") {
  Run r = run({"analyze", corpusFile("mutual.ll"), "--dominators"});
  REQUIRE(r.code == 0);
  CHECK(r.out.back() == '\n');
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["cycles"] == nlohmann::json::parse(R"([["x","y"]])"));
  bool ax = false;
  for (const auto& e : j["edges"]) ax = ax || (e["var"] == "x" && e["arg"] == "a");
  CHECK(ax);
  CHECK(j["dominators"].size() == 2);
  Run rep = run({"analyze", corpusFile("repeat.ll")});
  auto jr = nlohmann::json::parse(rep.out);
  CHECK(jr["edges"].size() == 2);
  CHECK(run({"analyze", scratchFile("selfapp.ll", "\\x. x x").string()}).code == kExitData);
}

TEST_CASE("dot subcommand") {
  Run r = run({"dot", corpusFile("repeat.ll")});
  CHECK(r.code == 0);
  CHECK(r.out == readFile(LETRECOPT_GOLDEN_DIR "/repeat.dot"));
}

TEST_CASE("optimize subcommand") {
  Run r = run({"optimize", corpusFile("repeat.ll")});
  CHECK(r.code == 0);
  CHECK(alphaEq(parse(r.out), loadTerm(corpusFile("repeat_opt.ll"))));

  Run j = run({"optimize", corpusFile("mutual.ll"), "--report", "json"});
  REQUIRE(j.code == 0);
  auto report = nlohmann::json::parse(j.out);
  CHECK(report["optimized"] == "letrec f = cons a g; g = cons a f in f");
  CHECK(report["binders_eliminated"] == nlohmann::json::parse(R"(["x","y"])"));
  CHECK(report["steps"].size() == 2);
  CHECK(report["steps"][0]["verification"]["verdict"] == "equivalent");

  fs::path out = fs::temp_directory_path() / "letrecopt_test_out.ll";
  Run o = run({"optimize", corpusFile("map.ll"), "-o", out.string()});
  CHECK(o.code == 0);
  CHECK(o.out.rfind("-- ", 0) == 0);
  CHECK(alphaEq(loadTerm(out), loadTerm(corpusFile("map_opt.ll"))));

  Run none = run({"optimize", corpusFile("intricate.ll"), "--max-unfolds", "0"});
  CHECK(none.out.find("no transformation applies") != std::string::npos);
}

TEST_CASE("reduce subcommand") {
  Run r = run({"reduce", corpusFile("repeat.ll"), "--arg", "c", "--depth", "3"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["approximation"] == "cons c (cons c (cons _|_ _|_))");
  CHECK(j["beta"] == 3);
  Run w = run({"reduce", scratchFile("id.ll", "(\\x. x) (\\y. y) z").string()});
  CHECK(nlohmann::json::parse(w.out)["term"] == "z");
  Run b = run({"reduce", scratchFile("lr.ll", "letrec f = \\x. x in f z").string(), "--strategy", "beta-only"});
  CHECK(nlohmann::json::parse(b.out)["unfold"] == 0);
  CHECK(run({"reduce", corpusFile("repeat.ll"), "--arg", "("}).code == kExitData);
}

TEST_CASE("bench subcommand is deterministic") {
  Run a = run({"bench", LETRECOPT_CORPUS_DIR, "--depth", "10", "--format", "csv"});
  Run b = run({"bench", LETRECOPT_CORPUS_DIR, "--depth", "10", "--format", "csv"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("name,variant,depth,beta,gbeta,unfold,saved_per_iter\n", 0) == 0);
  CHECK(a.out.find("repeat,optimized,10,1,") != std::string::npos);
  Run j = run({"bench", LETRECOPT_CORPUS_DIR, "--format", "json"});
  auto rows = nlohmann::json::parse(j.out);
  CHECK(rows.size() == 2 * loadCorpus(LETRECOPT_CORPUS_DIR).size());
  CHECK(rows[0]["depth"] == 12);
}

TEST_CASE("check-equiv subcommand") {
  CHECK(run({"check-equiv", corpusFile("map.ll"), corpusFile("map_opt.ll")}).code == 0);
  CHECK(run({"check-equiv", corpusFile("map.ll"), corpusFile("repeat.ll")}).code == 1);
  fs::path w = scratchFile("omega.ll", "letrec w = w in w");
  CHECK(run({"check-equiv", w.string(), w.string()}).code == 2);
  Run e = run({"check-equiv", corpusFile("mutual.ll"), corpusFile("mutual_opt.ll"), "--experiments", "5", "--seed", "42"});
  CHECK(e.code == 0);
  CHECK(nlohmann::json::parse(e.out).contains("experiments"));
}
