#include "letrecopt/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "letrecopt/binding.hpp"
#include "letrecopt/corpus.hpp"
#include "letrecopt/dominators.hpp"
#include "letrecopt/equivalence.hpp"
#include "letrecopt/transform.hpp"

namespace letrecopt {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

TypeEnv signatureFor(const std::string& file, const std::string& sigFlag) {
  if (!sigFlag.empty()) return loadSignature(sigFlag);
  fs::path sibling = fs::path(file).replace_extension(".sig");
  if (fs::exists(sibling)) return loadSignature(sibling);
  return {};
}

const char* nodeKind(BindingNode::Kind k) {
  switch (k) {
    case BindingNode::Kind::Variable: return "variable";
    case BindingNode::Kind::Expression: return "expression";
    case BindingNode::Kind::Blackhole: return "blackhole";
  }
  return "?";
}

Json nodeJson(const BindingNode& n) {
  Json j{{"kind", nodeKind(n.kind)}, {"label", n.label}};
  if (n.kind == BindingNode::Kind::Expression) j["pos"] = positionToString(n.at);
  return j;
}

Json statsJson(const ReductionStats& s) {
  return Json{{"beta", s.betaSteps},
              {"gbeta", s.gbetaSteps},
              {"unfold", s.unfoldSteps},
              {"fuel_used", s.fuelUsed},
              {"fuel_exhausted", s.fuelExhausted}};
}

const char* verdictKind(const Verdict& v) {
  switch (v.kind) {
    case Verdict::Kind::EquivalentToDepth: return "equivalent";
    case Verdict::Kind::Distinct: return "distinct";
    case Verdict::Kind::Inconclusive: return "inconclusive";
  }
  return "?";
}

Json verdictJson(const Verdict& v) {
  Json j{{"verdict", verdictKind(v)}, {"depth", v.depth}};
  if (!v.witness.empty() || v.distinct()) j["witness"] = v.witness;
  if (!v.reason.empty()) j["reason"] = v.reason;
  return j;
}

Json reportJson(const Term& result, const OptReport& r, std::size_t depth) {
  Json steps = Json::array();
  for (const OptStep& s : r.steps) {
    const Candidate& c = s.candidate;
    Json j{{"kind", c.kind == Candidate::Kind::RecurrentParam ? "recurrent-param" : "dominated-var"},
           {"variable", c.variable}};
    if (c.kind == Candidate::Kind::RecurrentParam) {
      j["function"] = c.function;
      j["index"] = c.paramIndex;
    } else {
      j["dominator"] = nodeJson(*c.dominator);
    }
    j["unfolded"] = s.unfolded;
    j["before"] = positionToString(s.before);
    j["after"] = positionToString(s.after);
    j["eliminated"] = s.eliminated;
    j["term_before"] = print(s.termBefore);
    j["term_after"] = print(s.termAfter);
    j["verification"] = verdictJson(s.verdict);
    steps.push_back(std::move(j));
  }
  return Json{{"optimized", print(result)},
              {"steps", steps},
              {"binders_eliminated", r.binderEliminated},
              {"aborted", r.aborted},
              {"error", r.error},
              {"verify_depth", depth},
              {"stats_before", statsJson(r.statsBefore)},
              {"stats_after", statsJson(r.statsAfter)}};
}

std::string reportText(const OptReport& r, std::size_t depth) {
  std::ostringstream out;
  if (r.steps.empty()) out << "-- no transformation applies\n";
  for (std::size_t i = 0; i < r.steps.size(); ++i) {
    const OptStep& s = r.steps[i];
    out << "-- step " << i + 1 << ": ";
    if (!s.unfolded.empty()) {
      out << "unfold";
      for (const auto& f : s.unfolded) out << ' ' << f;
      out << ", then ";
    }
    out << describe(s.candidate) << " at " << positionToString(s.before);
    if (!s.eliminated.empty()) {
      out << "; removed binders";
      for (const auto& v : s.eliminated) out << ' ' << v;
    }
    out << "; " << printVerdict(s.verdict) << "\n";
  }
  if (r.aborted) out << "-- aborted: " << r.error << "\n";
  out << "-- beta steps to depth " << depth << ": " << r.statsBefore.betaSteps << " -> " << r.statsAfter.betaSteps
      << "\n";
  return out.str();
}

int combine(const Verdict& a, const std::optional<Verdict>& b) {
  if (a.distinct() || (b && b->distinct())) return 1;
  if (!a.equivalent() || (b && !b->equivalent())) return 2;
  return 0;
}

}  // namespace

int runCommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Static analysis and optimization of letrec terms", "letrec-opt"};
  app.require_subcommand(1);

  std::string file, file2, sigFile, output, report = "text", strategy = "normal", format = "csv";
  bool withDominators = false;
  std::size_t benchDepth = 12, equivDepth = 8, maxUnfolds = 1, verifyDepth = 8, rounds = 0;
  std::uint64_t fuel = kDefaultFuel;
  std::uint32_t seed = 42;
  std::vector<std::string> extraArgs;
  std::optional<std::size_t> reduceDepth;

  auto* parseCmd = app.add_subcommand("parse", "Parse a term and print it normalized");
  parseCmd->add_option("file", file, "Term file (.ll)")->required();

  auto* analyzeCmd = app.add_subcommand("analyze", "Binding graph, parameter cycles and dominators as JSON");
  analyzeCmd->add_option("file", file, "Term file (.ll)")->required();
  analyzeCmd->add_option("--sig", sigFile, "Signature for free names (default: sibling .sig)");
  analyzeCmd->add_flag("--dominators", withDominators, "Include strong domination pairs");

  auto* dotCmd = app.add_subcommand("dot", "Binding graph in DOT");
  dotCmd->add_option("file", file, "Term file (.ll)")->required();
  dotCmd->add_option("--sig", sigFile, "Signature for free names (default: sibling .sig)");

  auto* optCmd = app.add_subcommand("optimize", "Apply verified transformations");
  optCmd->add_option("file", file, "Term file (.ll)")->required();
  optCmd->add_option("--sig", sigFile, "Signature for free names (default: sibling .sig)");
  optCmd->add_option("--max-unfolds", maxUnfolds, "Letrec unfoldings allowed")->capture_default_str();
  optCmd->add_option("--verify-depth", verifyDepth, "Approximation depth for verification")->capture_default_str();
  optCmd->add_option("--fuel", fuel, "Per-node evaluation budget")->capture_default_str();
  optCmd->add_option("--report", report, "Report format")->check(CLI::IsMember({"json", "text"}));
  optCmd->add_option("-o,--output", output, "Write the optimized term here");

  auto* reduceCmd = app.add_subcommand("reduce", "Evaluate and print step counts as JSON");
  reduceCmd->add_option("file", file, "Term file (.ll)")->required();
  reduceCmd->add_option("--strategy", strategy, "Evaluation strategy")
      ->check(CLI::IsMember({"normal", "beta-only"}));
  reduceCmd->add_option("--fuel", fuel, "Evaluation budget")->capture_default_str();
  reduceCmd->add_option("--depth", reduceDepth, "Approximate to this depth instead of stopping at head normal form");
  reduceCmd->add_option("--arg", extraArgs, "Apply the term to this argument (repeatable)");

  auto* benchCmd = app.add_subcommand("bench", "Step counts for every corpus term and its optimized form");
  benchCmd->add_option("dir", file, "Corpus directory")->required();
  benchCmd->add_option("--depth", benchDepth, "Approximation depth")->capture_default_str();
  benchCmd->add_option("--fuel", fuel, "Per-node evaluation budget")->capture_default_str();
  benchCmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  auto* equivCmd = app.add_subcommand("check-equiv", "Compare two terms up to a depth");
  equivCmd->add_option("first", file, "Term file (.ll)")->required();
  equivCmd->add_option("second", file2, "Term file (.ll)")->required();
  equivCmd->add_option("--depth", equivDepth, "Approximation depth")->capture_default_str();
  equivCmd->add_option("--fuel", fuel, "Per-node evaluation budget")->capture_default_str();
  equivCmd->add_option("--experiments", rounds, "Rounds of applicative experiments (0 = none)");
  equivCmd->add_option("--seed", seed, "Seed for the experiment probes")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "letrec-opt: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (parseCmd->parsed()) {
      out << print(loadTerm(file)) << "\n";
      return 0;
    }
    if (analyzeCmd->parsed()) {
      Analysis a = analyze(loadTerm(file), signatureFor(file, sigFile));
      const BindingGraph& g = a.graph;
      Json edges = Json::array();
      for (const auto& [from, to] : g.edges()) {
        const BindingNode& src = g.node(from);
        Json e{{"var", g.node(to).label}, {"arg", src.label}, {"kind", nodeKind(src.kind)}};
        if (src.kind == BindingNode::Kind::Expression) e["pos"] = positionToString(src.at);
        edges.push_back(std::move(e));
      }
      Json j{{"term", print(a.term)}, {"edges", edges}, {"cycles", parameterCycles(g)}};
      if (withDominators) {
        Json pairs = Json::array();
        for (const auto& [v, w] : strongDomFixpoint(g.digraph())) {
          pairs.push_back(Json{{"dominator", nodeJson(g.node(v))}, {"dominated", nodeJson(g.node(w))}});
        }
        j["dominators"] = pairs;
      }
      out << j.dump(2) << "\n";
      return 0;
    }
    if (dotCmd->parsed()) {
      out << toDot(analyze(loadTerm(file), signatureFor(file, sigFile)).graph) << "\n";
      return 0;
    }
    if (optCmd->parsed()) {
      OptOptions o;
      o.maxUnfolds = maxUnfolds;
      o.verifyDepth = verifyDepth;
      o.fuel = fuel;
      o.sig = signatureFor(file, sigFile);
      OptResult r = optimize(loadTerm(file), o);
      const std::string term = print(r.term) + "\n";
      if (!output.empty()) {
        std::ofstream f(output, std::ios::binary);
        if (!f) throw DataError(output + ": cannot write");
        f << term;
      }
      if (report == "json") {
        out << reportJson(r.term, r.report, verifyDepth).dump(2) << "\n";
      } else {
        if (output.empty()) out << term;
        out << reportText(r.report, verifyDepth);
      }
      return r.report.aborted ? kExitData : 0;
    }
    if (reduceCmd->parsed()) {
      std::vector<Term> applied;
      for (const auto& a : extraArgs) {
        try {
          applied.push_back(parse(a));
        } catch (const ParseError& e) {
          throw DataError(std::string("--arg: ") + e.what());
        }
      }
      Term t = Term::apps(loadTerm(file), applied);
      Json j;
      if (reduceDepth) {
        ReductionStats stats;
        FiniteApprox a = boehmApprox(t, *reduceDepth, fuel, &stats);
        j = Json{{"approximation", printApprox(a)}, {"depth", *reduceDepth}};
        j.update(statsJson(stats));
      } else {
        EvalResult r = normalOrderEval(t, fuel, strategy == "beta-only" ? Strategy::BetaOnly : Strategy::Normal);
        j = Json{{"term", print(r.term)}};
        j.update(statsJson(r.stats));
      }
      out << j.dump() << "\n";
      return 0;
    }
    if (benchCmd->parsed()) {
      auto rows = benchmark(loadCorpus(file), benchDepth, fuel);
      out << (format == "json" ? benchJson(rows) : benchCsv(rows));
      return 0;
    }
    if (equivCmd->parsed()) {
      Term a = loadTerm(file);
      Term b = loadTerm(file2);
      Verdict v = checkOpEq(a, b, equivDepth, fuel);
      std::optional<Verdict> e;
      if (rounds > 0) e = applicativeExperiments(a, b, rounds, seed, fuel);
      Json j{{"approximation", verdictJson(v)}};
      if (e) j["experiments"] = verdictJson(*e);
      out << j.dump() << "\n";
      return combine(v, e);
    }
  } catch (const DataError& e) {
    err << "letrec-opt: " << e.what() << "\n";
    return kExitData;
  } catch (const TypeError& e) {
    err << "letrec-opt: " << file << ": analysis unsupported: " << e.what() << "\n";
    return kExitData;
  } catch (const NotApplicable& e) {
    err << "letrec-opt: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "letrec-opt: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace letrecopt
