#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mea {

// The closed set of innate nodes. Declaration order is the canonical order
// used wherever node sets are listed or serialized.
enum class NodeId : std::uint8_t {
  food,
  experience_feeling_pos,
  experience_feeling_neg,
  emo_pos,
  emo_neg,
  need_food_pos,
  need_food_neg,
  past_experience,
  action_pos,
  action_neg,
  mental_action,
  physical_action,
  social_action,
};

inline constexpr std::size_t kNodeCount = 13;

inline constexpr std::array<NodeId, kNodeCount> kAllNodes = {
    NodeId::food,           NodeId::experience_feeling_pos,
    NodeId::experience_feeling_neg,
    NodeId::emo_pos,        NodeId::emo_neg,
    NodeId::need_food_pos,  NodeId::need_food_neg,
    NodeId::past_experience,
    NodeId::action_pos,     NodeId::action_neg,
    NodeId::mental_action,  NodeId::physical_action,
    NodeId::social_action,
};

constexpr std::size_t index_of(NodeId n) { return static_cast<std::size_t>(n); }

std::string_view to_string(NodeId n);
std::optional<NodeId> node_from_string(std::string_view name);
// One-line description of what the node stands for.
std::string_view describe(NodeId n);

// Swaps pos/neg within the emo, experience_feeling, need_food and action
// families. Throws NoOppositeError for the other five nodes.
NodeId opposite_node(NodeId n);
std::optional<NodeId> try_opposite(NodeId n);

// Fixed-size set of nodes, iterated in canonical order.
class NodeSet {
 public:
  constexpr NodeSet() = default;
  constexpr NodeSet(std::initializer_list<NodeId> nodes) {
    for (auto n : nodes) insert(n);
  }
  static constexpr NodeSet from_bits(std::uint16_t bits) {
    NodeSet s;
    s.bits_ = bits & kMask;
    return s;
  }
  static constexpr NodeSet all() { return from_bits(kMask); }

  constexpr bool contains(NodeId n) const { return (bits_ >> index_of(n)) & 1U; }
  constexpr void insert(NodeId n) { bits_ |= static_cast<std::uint16_t>(1U << index_of(n)); }
  constexpr void erase(NodeId n) { bits_ &= static_cast<std::uint16_t>(~(1U << index_of(n))); }
  constexpr void insert_all(NodeSet other) { bits_ |= other.bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint16_t bits() const { return bits_; }
  std::size_t size() const;
  constexpr bool is_subset_of(NodeSet other) const { return (bits_ & ~other.bits_) == 0; }

  std::vector<NodeId> to_vector() const;

  friend constexpr bool operator==(NodeSet, NodeSet) = default;

 private:
  static constexpr std::uint16_t kMask = (1U << kNodeCount) - 1;
  std::uint16_t bits_ = 0;
};

struct NatureEdge {
  NodeId head;
  NodeId tail;
  bool transmits = true;

  friend bool operator==(const NatureEdge&, const NatureEdge&) = default;
};

// Directed graph over the innate nodes. Immutable once built; the mutating
// members exist for assembling override graphs and for tests, and never
// validate acyclicity themselves (see validate_graph).
class NatureGraph {
 public:
  // Empty graph holding all 13 nodes and no edges.
  NatureGraph();

  const NodeSet& nodes() const { return nodes_; }
  const std::vector<NatureEdge>& edges() const { return edges_; }

  // Throws InputError on self loops and on an edge already present with the
  // same endpoints. Endpoints are added to the node set.
  void add_edge(NatureEdge e);
  // Drops the node and every edge touching it.
  void remove_node(NodeId n);

  bool has_edge(NodeId head, NodeId tail) const;
  std::optional<NatureEdge> find_edge(NodeId head, NodeId tail) const;
  // Tails of all edges leaving n with transmits=true.
  NodeSet transmitting_mask(NodeId n) const { return transmit_adj_[index_of(n)]; }
  NodeSet all_tails(NodeId n) const { return adj_[index_of(n)]; }

  friend bool operator==(const NatureGraph&, const NatureGraph&) = default;

 private:
  NodeSet nodes_ = NodeSet::all();
  std::vector<NatureEdge> edges_;
  std::array<NodeSet, kNodeCount> adj_{};
  std::array<NodeSet, kNodeCount> transmit_adj_{};
};

// The canonical 13-node, 16-edge design.
const NatureGraph& default_graph();

struct GraphValidation {
  enum class Status { ok, cycle, node_set };
  Status status = Status::ok;
  // One offending cycle, first node repeated at the end.
  std::vector<NodeId> cycle;
  std::vector<NodeId> missing;
  std::string message;

  bool ok() const { return status == Status::ok; }
};

GraphValidation validate_graph(const NatureGraph& g);

// Throws UnknownNodeError if n is not in the graph.
NodeSet transmitting_tails(const NatureGraph& g, NodeId n);

// Edge override file: `head<TAB>tail<TAB>0|1` per line, `#` comments.
// Throws ParseError; the result has all 13 nodes and is validated, a cyclic
// file raises CycleError.
NatureGraph parse_graph(std::istream& in, const std::string& source_name);
NatureGraph load_graph_file(const std::string& path);
void write_graph(std::ostream& out, const NatureGraph& g);

}  // namespace mea
