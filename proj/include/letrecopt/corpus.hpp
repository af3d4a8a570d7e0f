#pragma once

// Corpus directories and step-count benchmarks.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "letrecopt/reduction.hpp"
#include "letrecopt/transform.hpp"
#include "letrecopt/typing.hpp"

namespace letrecopt {

/// Malformed or unreadable input file; the message names the file.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string readFile(const std::filesystem::path& p);
Term loadTerm(const std::filesystem::path& p);
TypeEnv loadSignature(const std::filesystem::path& p);

/// How a term is driven in a benchmark: free names replaced, then the
/// result applied to the arguments.
struct BenchSetup {
  std::vector<std::pair<VarName, Term>> substitutions;
  std::vector<Term> args;
};

/// Lines `subst NAME = TERM` and `arg TERM`; `--` comments.
BenchSetup parseBenchSetup(std::string_view text);
Term instantiate(const Term& t, const BenchSetup& setup);

struct CorpusEntry {
  std::string name;
  Term term;
  std::optional<Term> expectedOptimized;
  TypeEnv sig;
  BenchSetup bench;
};

/// Every NAME.ll that is not NAME_opt.ll, sorted by name, with its optional
/// NAME_opt.ll, NAME.sig and NAME.bench.
std::vector<CorpusEntry> loadCorpus(const std::filesystem::path& dir);

struct BenchRow {
  std::string name;
  std::string variant;  // original | optimized
  std::size_t depth = 0;
  ReductionStats stats;
  /// (original beta − optimized beta) / depth, reduced; both rows carry it.
  long long savedNum = 0;
  long long savedDen = 1;
};

std::string printSaved(const BenchRow& row);

std::vector<BenchRow> benchmark(const std::vector<CorpusEntry>& corpus, std::size_t depth,
                                std::uint64_t fuel = kDefaultFuel, const OptOptions& opts = {});

/// Header `name,variant,depth,beta,gbeta,unfold,saved_per_iter`.
std::string benchCsv(const std::vector<BenchRow>& rows);
std::string benchJson(const std::vector<BenchRow>& rows);

}  // namespace letrecopt
