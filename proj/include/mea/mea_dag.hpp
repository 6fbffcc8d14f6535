#pragma once

#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mea/action_classifier.hpp"
#include "mea/belief_lexicon.hpp"
#include "mea/conllu.hpp"
#include "mea/events.hpp"
#include "mea/nature_graph.hpp"

namespace mea {

// A belief tuple licensed by one of the perception combinations.
struct BeliefJustification {
  std::string word;
  PerceptionCombo combo;
  bool flipped = false;
  int token_index = 0;

  friend bool operator==(const BeliefJustification&, const BeliefJustification&) = default;
};

// Past tense on the event verb.
struct TenseJustification {
  std::string verb;
  std::string tag;

  friend bool operator==(const TenseJustification&, const TenseJustification&) = default;
};

struct ClassJustification {
  ActionClass action_class;

  friend bool operator==(const ClassJustification&, const ClassJustification&) = default;
};

using Justification = std::variant<BeliefJustification, TenseJustification, ClassJustification>;

struct EventLink {
  int event = 0;  // position in MeaDag::events
  NodeId node;
  Justification justification;

  friend bool operator==(const EventLink&, const EventLink&) = default;
};

struct MeaDag {
  std::string review_id;
  std::vector<Event> events;
  NodeSet activated;
  std::vector<EventLink> links;
  // Graph edges whose endpoints are both activated.
  std::vector<NatureEdge> nature_edges;
  // Non-past first-person action events that found no activated subtype
  // node, or whose classification failed.
  std::vector<int> unlinked_events;
  bool valid = false;

  friend bool operator==(const MeaDag&, const MeaDag&) = default;
};

std::string event_id(int index);

// Least superset of seed closed under transmitting edges.
NodeSet forward_transmit(NodeSet seed, const NatureGraph& g);
// Same closure as an activation sequence: seed nodes in canonical order,
// then breadth-first over transmitting tails.
std::vector<NodeId> forward_transmit_trace(NodeSet seed, const NatureGraph& g);

bool is_valid(NodeSet activated);
bool is_valid(const MeaDag& dag);

void link_perceptions(MeaDag& dag, std::span<const ParsedSentence> sentences, const BeliefLexicon& lex);

struct ActionLinkOptions {
  // When set, an unparseable classifier answer is reported here and the
  // event is left unlinked. Otherwise the error propagates.
  std::function<void(const Event&, const ResponseParseError&)> on_parse_error;
};

// Tense rule first; non-past events are classified only when some action
// subtype node is active, and linked only to an active subtype.
void link_actions(MeaDag& dag, std::span<const ParsedSentence> sentences, ActionClassifier& classifier,
                  const ActionLinkOptions& options = {});

// Fills nature_edges and valid from the current activation.
void finalize(MeaDag& dag, const NatureGraph& g);

// extract -> link_perceptions -> forward_transmit -> link_actions -> finalize.
MeaDag build_mea_dag(const std::string& review_id, std::span<const ParsedSentence> sentences,
                     const NatureGraph& g, const BeliefLexicon& lex, ActionClassifier& classifier,
                     const ActionLinkOptions& options = {});

// Empty when every structural invariant holds.
std::vector<std::string> check_invariants(const MeaDag& dag, const NatureGraph& g);

nlohmann::json to_json(const MeaDag& dag);
MeaDag from_json(const nlohmann::json& doc);
// Two-space indented document with a trailing newline.
std::string to_json_string(const MeaDag& dag);
std::string to_dot(const MeaDag& dag);

}  // namespace mea
