#pragma once

#include <set>
#include <utility>
#include <vector>

#include "mea/conllu.hpp"
#include "mea/events.hpp"

namespace oracle {

// (pattern, sorted bound tokens)
using Binding = std::pair<mea::PatternId, std::vector<int>>;

// Every assignment of distinct tokens to a pattern's variables that satisfies
// its arcs and tag classes, for all ten patterns.
std::vector<Binding> all_bindings(const mea::ParsedSentence& s);

// Size-desc, pattern-asc, tokens-asc greedy pick of token-disjoint bindings.
std::set<Binding> select_disjoint(std::vector<Binding> bindings);

inline std::set<Binding> expected_matches(const mea::ParsedSentence& s) {
  return select_disjoint(all_bindings(s));
}

}  // namespace oracle
