#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "letrecopt/syntax.hpp"

namespace testsupport {

inline letrecopt::VarName pick(std::mt19937& rng, const std::vector<std::string>& pool) {
  return pool[rng() % pool.size()];
}

/// Small random term over a narrow name pool so that shadowing and capture
/// situations are frequent.
inline letrecopt::Term randomTerm(std::mt19937& rng, int depth) {
  using letrecopt::Term;
  static const std::vector<std::string> names{"a", "b", "x", "y", "f"};
  if (depth <= 0) return Term::var(pick(rng, names));
  switch (rng() % 6) {
    case 0:
      return Term::var(pick(rng, names));
    case 1:
    case 2:
      return Term::abs(pick(rng, names), randomTerm(rng, depth - 1));
    case 3:
    case 4:
      return Term::app(randomTerm(rng, depth - 1), randomTerm(rng, depth - 1));
    default: {
      std::vector<std::pair<letrecopt::VarName, Term>> defs;
      std::vector<std::string> pool = names;
      std::shuffle(pool.begin(), pool.end(), rng);
      std::size_t n = 1 + rng() % 2;
      for (std::size_t i = 0; i < n; ++i) defs.emplace_back(pool[i], randomTerm(rng, depth - 2));
      return Term::letrec(std::move(defs), randomTerm(rng, depth - 1));
    }
  }
}

}  // namespace testsupport
