#include "mea/mea_dag.hpp"

#include <algorithm>
#include <array>
#include <type_traits>
#include <deque>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mea {

using nlohmann::json;

std::string event_id(int index) { return "e" + std::to_string(index); }

std::vector<NodeId> forward_transmit_trace(NodeSet seed, const NatureGraph& g) {
  std::vector<NodeId> order = seed.to_vector();
  NodeSet seen = seed;
  std::deque<NodeId> queue(order.begin(), order.end());
  while (!queue.empty()) {
    NodeId n = queue.front();
    queue.pop_front();
    for (NodeId tail : g.transmitting_mask(n).to_vector()) {
      if (seen.contains(tail)) continue;
      seen.insert(tail);
      order.push_back(tail);
      queue.push_back(tail);
    }
  }
  return order;
}

NodeSet forward_transmit(NodeSet seed, const NatureGraph& g) {
  NodeSet out;
  for (auto n : forward_transmit_trace(seed, g)) out.insert(n);
  return out;
}

bool is_valid(NodeSet activated) {
  return activated.contains(NodeId::need_food_pos) != activated.contains(NodeId::need_food_neg);
}

bool is_valid(const MeaDag& dag) { return is_valid(dag.activated); }

namespace {

const ParsedSentence* sentence_for(std::span<const ParsedSentence> sentences, const Event& e) {
  for (const auto& s : sentences)
    if (s.sentence_index == e.sentence_index) return &s;
  return nullptr;
}

}  // namespace

void link_perceptions(MeaDag& dag, std::span<const ParsedSentence> sentences, const BeliefLexicon& lex) {
  for (std::size_t i = 0; i < dag.events.size(); ++i) {
    const auto& e = dag.events[i];
    const auto* s = sentence_for(sentences, e);
    if (!s) continue;
    for (auto& p : detect_perception(e, *s, lex)) {
      dag.links.push_back({static_cast<int>(i), p.node,
                           BeliefJustification{std::move(p.word), p.combo, p.flipped, p.token_index}});
      dag.activated.insert(p.node);
    }
  }
}

void link_actions(MeaDag& dag, std::span<const ParsedSentence> sentences, ActionClassifier& classifier,
                  const ActionLinkOptions& options) {
  const NodeSet subtypes{NodeId::mental_action, NodeId::physical_action, NodeId::social_action};
  for (std::size_t i = 0; i < dag.events.size(); ++i) {
    const auto& e = dag.events[i];
    if (!is_action_pattern(e.pattern_id) || !e.subject_lemma || !is_first_person(*e.subject_lemma))
      continue;
    const auto* s = sentence_for(sentences, e);
    if (!s) continue;
    const int id = static_cast<int>(i);
    if (classify_tense(e, *s) == Tense::Past) {
      const auto& verb = s->token(e.verb_index);
      dag.links.push_back({id, NodeId::past_experience, TenseJustification{verb.lemma, verb.pos_tag}});
      dag.activated.insert(NodeId::past_experience);
      continue;
    }
    if (NodeSet::from_bits(dag.activated.bits() & subtypes.bits()).empty()) {
      dag.unlinked_events.push_back(id);
      continue;
    }
    ActionClass cls;
    try {
      cls = classifier.classify(e.text);
    } catch (const ResponseParseError& err) {
      if (!options.on_parse_error) throw;
      options.on_parse_error(e, err);
      dag.unlinked_events.push_back(id);
      continue;
    }
    NodeId node = action_node(cls);
    if (dag.activated.contains(node))
      dag.links.push_back({id, node, ClassJustification{cls}});
    else
      dag.unlinked_events.push_back(id);
  }
}

void finalize(MeaDag& dag, const NatureGraph& g) {
  dag.nature_edges.clear();
  for (const auto& edge : g.edges())
    if (dag.activated.contains(edge.head) && dag.activated.contains(edge.tail))
      dag.nature_edges.push_back(edge);
  dag.valid = is_valid(dag);
}

MeaDag build_mea_dag(const std::string& review_id, std::span<const ParsedSentence> sentences,
                     const NatureGraph& g, const BeliefLexicon& lex, ActionClassifier& classifier,
                     const ActionLinkOptions& options) {
  MeaDag dag;
  dag.review_id = review_id;
  for (const auto& s : sentences)
    for (auto& e : extract_events(s)) dag.events.push_back(std::move(e));
  link_perceptions(dag, sentences, lex);
  dag.activated = forward_transmit(dag.activated, g);
  link_actions(dag, sentences, classifier, options);
  finalize(dag, g);
  return dag;
}

std::vector<std::string> check_invariants(const MeaDag& dag, const NatureGraph& g) {
  std::vector<std::string> problems;
  const int n_events = static_cast<int>(dag.events.size());

  NodeSet direct;
  for (const auto& l : dag.links) {
    if (l.event < 0 || l.event >= n_events)
      problems.push_back("link references missing event " + std::to_string(l.event));
    if (!dag.activated.contains(l.node))
      problems.push_back("link target " + std::string(to_string(l.node)) + " is not activated");
    direct.insert(l.node);
    if (const auto* b = std::get_if<BeliefJustification>(&l.justification); b && b->word.empty())
      problems.push_back("belief justification without a word");
    if (const auto* t = std::get_if<TenseJustification>(&l.justification); t && t->tag.empty())
      problems.push_back("tense justification without a tag");
  }
  if (!dag.activated.is_subset_of(forward_transmit(direct, g)))
    problems.push_back("activated node neither linked nor reachable from a linked node");

  // Event vertices only have outgoing arcs, so acyclicity of the union
  // reduces to the nature edges. Kahn's algorithm over them.
  std::array<int, kNodeCount> indegree{};
  for (const auto& e : dag.nature_edges) {
    if (!g.has_edge(e.head, e.tail)) problems.push_back("nature edge not in graph");
    if (!dag.activated.contains(e.head) || !dag.activated.contains(e.tail))
      problems.push_back("nature edge touches an inactive node");
    ++indegree[index_of(e.tail)];
  }
  std::vector<NodeId> ready;
  for (auto n : kAllNodes)
    if (indegree[index_of(n)] == 0) ready.push_back(n);
  std::size_t visited = 0;
  while (!ready.empty()) {
    NodeId n = ready.back();
    ready.pop_back();
    ++visited;
    for (const auto& e : dag.nature_edges)
      if (e.head == n && --indegree[index_of(e.tail)] == 0) ready.push_back(e.tail);
  }
  if (visited != kNodeCount) problems.push_back("links form a cycle");

  for (int u : dag.unlinked_events)
    if (u < 0 || u >= n_events) problems.push_back("unlinked entry references missing event");
  if (dag.valid != is_valid(dag.activated)) problems.push_back("valid flag disagrees with activation");
  return problems;
}

// JSON ------------------------------------------------------------------------

namespace {

json nodes_json(const std::vector<NodeId>& nodes) {
  json out = json::array();
  for (auto n : nodes) out.push_back(std::string(to_string(n)));
  return out;
}

NodeId node_of(const json& j) {
  auto name = j.get<std::string>();
  auto n = node_from_string(name);
  if (!n) throw InputError("unknown node '" + name + "' in MEA-DAG document");
  return *n;
}

json justification_json(const Justification& j) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, BeliefJustification>) {
          return {{"type", "belief"},
                  {"word", v.word},
                  {"combo", std::string(to_string(v.combo))},
                  {"flipped", v.flipped},
                  {"token", v.token_index}};
        } else if constexpr (std::is_same_v<T, TenseJustification>) {
          return {{"type", "tense"}, {"word", v.verb}, {"tag", v.tag}};
        } else {
          return {{"type", "action_class"}, {"class", std::string(to_string(v.action_class))}};
        }
      },
      j);
}

Justification justification_from(const json& j) {
  auto type = j.at("type").get<std::string>();
  if (type == "belief") {
    auto combo = combo_from_string(j.at("combo").get<std::string>());
    if (!combo) throw InputError("unknown perception combo in MEA-DAG document");
    return BeliefJustification{j.at("word").get<std::string>(), *combo, j.at("flipped").get<bool>(),
                               j.at("token").get<int>()};
  }
  if (type == "tense")
    return TenseJustification{j.at("word").get<std::string>(), j.at("tag").get<std::string>()};
  if (type == "action_class") {
    auto cls = action_class_from_string(j.at("class").get<std::string>());
    if (!cls) throw InputError("unknown action class in MEA-DAG document");
    return ClassJustification{*cls};
  }
  throw InputError("unknown justification type '" + type + "'");
}

int event_index_of(const std::string& id, std::size_t n_events) {
  if (id.size() < 2 || id.front() != 'e') throw InputError("bad event id '" + id + "'");
  int idx = std::stoi(id.substr(1));
  if (idx < 0 || static_cast<std::size_t>(idx) >= n_events)
    throw InputError("event id '" + id + "' out of range");
  return idx;
}

}  // namespace

json to_json(const MeaDag& dag) {
  json events = json::array();
  for (std::size_t i = 0; i < dag.events.size(); ++i) {
    const auto& e = dag.events[i];
    events.push_back({{"id", event_id(static_cast<int>(i))},
                      {"text", e.text},
                      {"pattern_id", std::string(to_string(e.pattern_id))},
                      {"negated", e.negated},
                      {"sentence_index", e.sentence_index},
                      {"tokens", e.token_indices},
                      {"core", e.core},
                      {"verb_index", e.verb_index},
                      {"subject", e.subject_lemma ? json(*e.subject_lemma) : json(nullptr)}});
  }
  json links = json::array();
  for (const auto& l : dag.links)
    links.push_back({{"event_id", event_id(l.event)},
                     {"node", std::string(to_string(l.node))},
                     {"justification", justification_json(l.justification)}});
  for (const auto& e : dag.nature_edges)
    links.push_back({{"from_node", std::string(to_string(e.head))},
                     {"node", std::string(to_string(e.tail))},
                     {"justification", {{"type", "transmission"}, {"transmits", e.transmits}}}});
  json unlinked = json::array();
  for (int u : dag.unlinked_events) unlinked.push_back(event_id(u));

  json doc;
  doc["review_id"] = dag.review_id;
  doc["events"] = std::move(events);
  doc["activated"] = nodes_json(dag.activated.to_vector());
  doc["links"] = std::move(links);
  doc["unlinked_events"] = std::move(unlinked);
  doc["valid"] = dag.valid;
  return doc;
}

MeaDag from_json(const json& doc) {
  MeaDag dag;
  dag.review_id = doc.at("review_id").get<std::string>();
  for (const auto& je : doc.at("events")) {
    Event e;
    e.review_id = dag.review_id;
    e.text = je.at("text").get<std::string>();
    auto p = pattern_from_string(je.at("pattern_id").get<std::string>());
    if (!p) throw InputError("unknown pattern id in MEA-DAG document");
    e.pattern_id = *p;
    e.negated = je.at("negated").get<bool>();
    e.sentence_index = je.at("sentence_index").get<int>();
    e.token_indices = je.at("tokens").get<std::vector<int>>();
    e.core = je.at("core").get<std::vector<int>>();
    e.verb_index = je.at("verb_index").get<int>();
    if (!je.at("subject").is_null()) e.subject_lemma = je.at("subject").get<std::string>();
    if (je.at("id").get<std::string>() != event_id(static_cast<int>(dag.events.size())))
      throw InputError("events must be numbered e0, e1, ... in order");
    dag.events.push_back(std::move(e));
  }
  for (const auto& n : doc.at("activated")) dag.activated.insert(node_of(n));
  for (const auto& jl : doc.at("links")) {
    NodeId node = node_of(jl.at("node"));
    if (jl.contains("event_id")) {
      dag.links.push_back({event_index_of(jl.at("event_id").get<std::string>(), dag.events.size()), node,
                           justification_from(jl.at("justification"))});
    } else {
      dag.nature_edges.push_back(
          {node_of(jl.at("from_node")), node, jl.at("justification").at("transmits").get<bool>()});
    }
  }
  for (const auto& u : doc.at("unlinked_events"))
    dag.unlinked_events.push_back(event_index_of(u.get<std::string>(), dag.events.size()));
  dag.valid = doc.at("valid").get<bool>();
  return dag;
}

std::string to_json_string(const MeaDag& dag) { return to_json(dag).dump(2) + "\n"; }

namespace {

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string link_label(const Justification& j) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, BeliefJustification>)
          return "(\"" + v.word + "\")" + (v.flipped ? " not" : "");
        else if constexpr (std::is_same_v<T, TenseJustification>)
          return v.tag;
        else
          return std::string(to_string(v.action_class));
      },
      j);
}

}  // namespace

std::string to_dot(const MeaDag& dag) {
  // Events green, activated nature nodes red.
  std::ostringstream out;
  out << "digraph \"" << dot_escape(dag.review_id) << "\" {\n  rankdir=LR;\n";
  for (std::size_t i = 0; i < dag.events.size(); ++i)
    out << "  \"" << event_id(static_cast<int>(i)) << "\" [shape=box, color=green, label=\""
        << dot_escape(dag.events[i].text) << "\"];\n";
  for (auto n : dag.activated.to_vector())
    out << "  \"" << to_string(n) << "\" [shape=ellipse, color=red, label=\"#" << to_string(n) << "\"];\n";
  for (const auto& l : dag.links)
    out << "  \"" << event_id(l.event) << "\" -> \"" << to_string(l.node) << "\" [label=\""
        << dot_escape(link_label(l.justification)) << "\"];\n";
  for (const auto& e : dag.nature_edges) {
    out << "  \"" << to_string(e.head) << "\" -> \"" << to_string(e.tail) << "\"";
    if (!e.transmits) out << " [style=dashed]";
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace mea
