#pragma once

#include <vector>

#include "mea/nature_graph.hpp"

namespace oracle {

// Warshall closure over the transmitting edges, applied to a seed.
class Reachability {
 public:
  explicit Reachability(const mea::NatureGraph& g);
  mea::NodeSet closure(mea::NodeSet seed) const;

 private:
  std::vector<std::vector<bool>> reach_;
};

// Depth-first topological order of a directed graph on 0..n-1; empty when
// the graph has a cycle.
std::vector<int> topological_order(int n, const std::vector<std::pair<int, int>>& arcs);

}  // namespace oracle
