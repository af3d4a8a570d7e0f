#include "letrecopt/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace letrecopt {

namespace fs = std::filesystem;

std::string readFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError(p.string() + ": cannot open");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Term loadTerm(const fs::path& p) {
  std::string text = readFile(p);
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw DataError(p.string() + ":" + e.what());
  }
}

TypeEnv loadSignature(const fs::path& p) {
  std::string text = readFile(p);
  try {
    return parseSignature(text);
  } catch (const ParseError& e) {
    throw DataError(p.string() + ":" + e.what());
  }
}

BenchSetup parseBenchSetup(std::string_view text) {
  BenchSetup setup;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    std::string_view v(line);
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
    if (v.empty() || v.starts_with("--")) continue;
    try {
      if (v.starts_with("arg ")) {
        setup.args.push_back(parse(v.substr(4)));
      } else if (v.starts_with("subst ")) {
        auto eq = v.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected 'subst NAME = TERM'", lineNo, 1);
        std::string name(v.substr(6, eq - 6));
        name.erase(name.find_last_not_of(" \t") + 1);
        name.erase(0, name.find_first_not_of(" \t"));
        if (!isValidVarName(name)) throw ParseError("invalid name '" + name + "'", lineNo, 7);
        setup.substitutions.emplace_back(name, parse(v.substr(eq + 1)));
      } else {
        throw ParseError("expected 'arg' or 'subst'", lineNo, 1);
      }
    } catch (const ParseError& e) {
      if (e.line() == lineNo) throw;
      throw ParseError(e.what(), lineNo, e.column());
    }
  }
  return setup;
}

Term instantiate(const Term& t, const BenchSetup& setup) {
  std::map<VarName, Term> subst(setup.substitutions.begin(), setup.substitutions.end());
  return Term::apps(substituteMany(t, subst), setup.args);
}

std::vector<CorpusEntry> loadCorpus(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError(dir.string() + ": not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".ll") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<CorpusEntry> out;
  for (const fs::path& f : files) {
    std::string stem = f.stem().string();
    if (stem.ends_with("_opt")) continue;
    CorpusEntry e;
    e.name = stem;
    e.term = loadTerm(f);
    fs::path opt = dir / (stem + "_opt.ll");
    if (fs::exists(opt)) e.expectedOptimized = loadTerm(opt);
    fs::path sig = dir / (stem + ".sig");
    if (fs::exists(sig)) e.sig = loadSignature(sig);
    fs::path bench = dir / (stem + ".bench");
    if (fs::exists(bench)) {
      try {
        e.bench = parseBenchSetup(readFile(bench));
      } catch (const ParseError& err) {
        throw DataError(bench.string() + ":" + err.what());
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::string printSaved(const BenchRow& row) {
  if (row.savedDen == 1) return std::to_string(row.savedNum);
  return std::to_string(row.savedNum) + "/" + std::to_string(row.savedDen);
}

std::vector<BenchRow> benchmark(const std::vector<CorpusEntry>& corpus, std::size_t depth, std::uint64_t fuel,
                                const OptOptions& opts) {
  std::vector<BenchRow> rows;
  for (const CorpusEntry& e : corpus) {
    OptOptions o = opts;
    o.sig = e.sig;
    Term optimized = optimize(e.term, o).term;
    BenchRow orig{e.name, "original", depth, countStepsToDepth(instantiate(e.term, e.bench), depth, fuel)};
    BenchRow opt{e.name, "optimized", depth, countStepsToDepth(instantiate(optimized, e.bench), depth, fuel)};
    long long num = static_cast<long long>(orig.stats.betaSteps) - static_cast<long long>(opt.stats.betaSteps);
    long long den = depth == 0 ? 1 : static_cast<long long>(depth);
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num == 0) den = 1;
    orig.savedNum = opt.savedNum = num;
    orig.savedDen = opt.savedDen = den;
    rows.push_back(orig);
    rows.push_back(opt);
  }
  return rows;
}

std::string benchCsv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "name,variant,depth,beta,gbeta,unfold,saved_per_iter\n";
  for (const BenchRow& r : rows) {
    out << r.name << ',' << r.variant << ',' << r.depth << ',' << r.stats.betaSteps << ',' << r.stats.gbetaSteps
        << ',' << r.stats.unfoldSteps << ',' << printSaved(r) << '\n';
  }
  return out.str();
}

std::string benchJson(const std::vector<BenchRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const BenchRow& r : rows) {
    arr.push_back({{"name", r.name},
                   {"variant", r.variant},
                   {"depth", r.depth},
                   {"beta", r.stats.betaSteps},
                   {"gbeta", r.stats.gbetaSteps},
                   {"unfold", r.stats.unfoldSteps},
                   {"fuel_exhausted", r.stats.fuelExhausted},
                   {"saved_per_iter", printSaved(r)}});
  }
  return arr.dump(2) + "\n";
}

}  // namespace letrecopt
