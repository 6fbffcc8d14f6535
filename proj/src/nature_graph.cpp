#include "mea/nature_graph.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>

#include "mea/error.hpp"
#include "mea/text.hpp"

namespace mea {

namespace {

struct NodeInfo {
  NodeId id;
  std::string_view name;
  std::string_view description;
};

constexpr std::array<NodeInfo, kNodeCount> kNodeInfo = {{
    {NodeId::food, "food", "a food entity is mentioned"},
    {NodeId::experience_feeling_pos, "experience_feeling_pos", "pleasant sensory or practical feeling"},
    {NodeId::experience_feeling_neg, "experience_feeling_neg", "unpleasant sensory or practical feeling"},
    {NodeId::emo_pos, "emo_pos", "positive emotion"},
    {NodeId::emo_neg, "emo_neg", "negative emotion"},
    {NodeId::need_food_pos, "need_food_pos", "the need for food is met"},
    {NodeId::need_food_neg, "need_food_neg", "the need for food is not met"},
    {NodeId::past_experience, "past_experience", "an earlier action that changed the need state"},
    {NodeId::action_pos, "action_pos", "action that keeps the need being met"},
    {NodeId::action_neg, "action_neg", "action that avoids the need going unmet again"},
    {NodeId::mental_action, "mental_action", "internal, invisible action"},
    {NodeId::physical_action, "physical_action", "external, visible action"},
    {NodeId::social_action, "social_action", "action directed at other people"},
}};

std::string node_list(const std::vector<NodeId>& nodes) {
  std::string out;
  for (auto n : nodes) {
    if (!out.empty()) out += ", ";
    out += to_string(n);
  }
  return out;
}

}  // namespace

std::string_view to_string(NodeId n) { return kNodeInfo[index_of(n)].name; }

std::optional<NodeId> node_from_string(std::string_view name) {
  if (!name.empty() && name.front() == '#') name.remove_prefix(1);
  for (const auto& info : kNodeInfo)
    if (info.name == name) return info.id;
  return std::nullopt;
}

std::string_view describe(NodeId n) { return kNodeInfo[index_of(n)].description; }

std::optional<NodeId> try_opposite(NodeId n) {
  switch (n) {
    case NodeId::experience_feeling_pos: return NodeId::experience_feeling_neg;
    case NodeId::experience_feeling_neg: return NodeId::experience_feeling_pos;
    case NodeId::emo_pos: return NodeId::emo_neg;
    case NodeId::emo_neg: return NodeId::emo_pos;
    case NodeId::need_food_pos: return NodeId::need_food_neg;
    case NodeId::need_food_neg: return NodeId::need_food_pos;
    case NodeId::action_pos: return NodeId::action_neg;
    case NodeId::action_neg: return NodeId::action_pos;
    default: return std::nullopt;
  }
}

NodeId opposite_node(NodeId n) {
  if (auto o = try_opposite(n)) return *o;
  throw NoOppositeError("node " + std::string(to_string(n)) + " has no polar opposite");
}

std::size_t NodeSet::size() const { return static_cast<std::size_t>(std::popcount(bits_)); }

std::vector<NodeId> NodeSet::to_vector() const {
  std::vector<NodeId> out;
  for (auto n : kAllNodes)
    if (contains(n)) out.push_back(n);
  return out;
}

NatureGraph::NatureGraph() = default;

void NatureGraph::add_edge(NatureEdge e) {
  if (e.head == e.tail)
    throw InputError("self loop on " + std::string(to_string(e.head)));
  if (has_edge(e.head, e.tail))
    throw InputError("duplicate edge " + std::string(to_string(e.head)) + " -> " +
                     std::string(to_string(e.tail)));
  nodes_.insert(e.head);
  nodes_.insert(e.tail);
  auto pos = std::lower_bound(edges_.begin(), edges_.end(), e, [](const auto& a, const auto& b) {
    return std::pair(a.head, a.tail) < std::pair(b.head, b.tail);
  });
  edges_.insert(pos, e);
  adj_[index_of(e.head)].insert(e.tail);
  if (e.transmits) transmit_adj_[index_of(e.head)].insert(e.tail);
}

void NatureGraph::remove_node(NodeId n) {
  nodes_.erase(n);
  std::erase_if(edges_, [n](const NatureEdge& e) { return e.head == n || e.tail == n; });
  adj_ = {};
  transmit_adj_ = {};
  for (const auto& e : edges_) {
    adj_[index_of(e.head)].insert(e.tail);
    if (e.transmits) transmit_adj_[index_of(e.head)].insert(e.tail);
  }
}

bool NatureGraph::has_edge(NodeId head, NodeId tail) const {
  return adj_[index_of(head)].contains(tail);
}

std::optional<NatureEdge> NatureGraph::find_edge(NodeId head, NodeId tail) const {
  for (const auto& e : edges_)
    if (e.head == head && e.tail == tail) return e;
  return std::nullopt;
}

const NatureGraph& default_graph() {
  static const NatureGraph graph = [] {
    using N = NodeId;
    NatureGraph g;
    for (auto tail : {N::experience_feeling_pos, N::experience_feeling_neg, N::emo_pos, N::emo_neg})
      g.add_edge({N::past_experience, tail, false});
    g.add_edge({N::experience_feeling_pos, N::need_food_pos, true});
    g.add_edge({N::emo_pos, N::need_food_pos, true});
    g.add_edge({N::experience_feeling_neg, N::need_food_neg, true});
    g.add_edge({N::emo_neg, N::need_food_neg, true});
    g.add_edge({N::need_food_pos, N::action_pos, true});
    g.add_edge({N::need_food_neg, N::action_neg, true});
    for (auto head : {N::action_pos, N::action_neg})
      for (auto tail : {N::mental_action, N::physical_action, N::social_action})
        g.add_edge({head, tail, true});
    return g;
  }();
  return graph;
}

GraphValidation validate_graph(const NatureGraph& g) {
  GraphValidation result;

  std::vector<NodeId> missing;
  for (auto n : kAllNodes)
    if (!g.nodes().contains(n)) missing.push_back(n);
  if (!missing.empty()) {
    result.status = GraphValidation::Status::node_set;
    result.missing = std::move(missing);
    result.message = "missing nodes: " + node_list(result.missing);
    return result;
  }

  // Iterative three-colour DFS; the grey stack is the current path.
  enum class Colour { white, grey, black };
  std::array<Colour, kNodeCount> colour{};
  std::vector<NodeId> path;
  std::vector<std::vector<NodeId>> pending;

  for (auto start : kAllNodes) {
    if (colour[index_of(start)] != Colour::white) continue;
    colour[index_of(start)] = Colour::grey;
    path = {start};
    pending = {g.all_tails(start).to_vector()};
    while (!path.empty()) {
      auto& todo = pending.back();
      if (todo.empty()) {
        colour[index_of(path.back())] = Colour::black;
        path.pop_back();
        pending.pop_back();
        continue;
      }
      NodeId next = todo.back();
      todo.pop_back();
      if (colour[index_of(next)] == Colour::grey) {
        auto it = std::find(path.begin(), path.end(), next);
        result.status = GraphValidation::Status::cycle;
        result.cycle.assign(it, path.end());
        result.cycle.push_back(next);
        result.message = "cycle: " + node_list(result.cycle);
        return result;
      }
      if (colour[index_of(next)] == Colour::white) {
        colour[index_of(next)] = Colour::grey;
        path.push_back(next);
        pending.push_back(g.all_tails(next).to_vector());
      }
    }
  }
  return result;
}

NodeSet transmitting_tails(const NatureGraph& g, NodeId n) {
  if (!g.nodes().contains(n))
    throw UnknownNodeError("node " + std::string(to_string(n)) + " is not in the graph");
  return g.transmitting_mask(n);
}

NatureGraph parse_graph(std::istream& in, const std::string& source_name) {
  NatureGraph g;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    text::chomp(line);
    auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto fields = text::split(body, '\t');
    if (fields.size() != 3)
      throw ParseError(source_name, line_no, "expected head<TAB>tail<TAB>0|1");
    auto head = node_from_string(text::trim(fields[0]));
    auto tail = node_from_string(text::trim(fields[1]));
    if (!head) throw ParseError(source_name, line_no, "unknown node '" + fields[0] + "'");
    if (!tail) throw ParseError(source_name, line_no, "unknown node '" + fields[1] + "'");
    auto flag = text::trim(fields[2]);
    if (flag != "0" && flag != "1")
      throw ParseError(source_name, line_no, "transmits flag must be 0 or 1");
    try {
      g.add_edge({*head, *tail, flag == "1"});
    } catch (const InputError& e) {
      throw ParseError(source_name, line_no, e.what());
    }
  }
  auto check = validate_graph(g);
  if (check.status == GraphValidation::Status::cycle)
    throw CycleError(source_name + ": " + check.message);
  return g;
}

NatureGraph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open graph file " + path);
  return parse_graph(in, path);
}

void write_graph(std::ostream& out, const NatureGraph& g) {
  out << "# head\ttail\ttransmits\n";
  for (const auto& e : g.edges())
    out << to_string(e.head) << '\t' << to_string(e.tail) << '\t' << (e.transmits ? 1 : 0) << '\n';
}

}  // namespace mea
