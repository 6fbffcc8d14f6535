#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mea/belief_lexicon.hpp"
#include "mea/conllu.hpp"
#include "mea/nature_graph.hpp"

namespace mea {

// STATE marks a clause that matched no first-person action pattern.
enum class PatternId : std::uint8_t { STATE = 0, P1, P2, P3, P4, P5, P6, P7, P8, P9, P10 };

inline constexpr int kActionPatternCount = 10;

std::string_view to_string(PatternId p);
std::optional<PatternId> pattern_from_string(std::string_view s);
constexpr bool is_action_pattern(PatternId p) { return p != PatternId::STATE; }

// Number of tokens each action pattern binds (subject and verb included).
int pattern_arity(PatternId p);

struct Event {
  std::string review_id;
  int sentence_index = 0;
  // Clause span, ascending.
  std::vector<int> token_indices;
  // Pattern-bound tokens in role order (subject, v1, ...). For STATE events
  // this is just the clause head.
  std::vector<int> core;
  PatternId pattern_id = PatternId::STATE;
  int verb_index = 0;
  std::optional<std::string> subject_lemma;
  bool negated = false;
  std::string text;

  friend bool operator==(const Event&, const Event&) = default;
};

// Dependency label with UD v2 names folded onto the names the patterns use
// (obj -> dobj, obl -> nmod, nsubj:pass -> nsubjpass, aux:pass -> auxpass)
// and any other subtype stripped.
std::string normalize_deprel(std::string_view deprel);

bool is_verb_tag(std::string_view tag);
bool is_noun_tag(std::string_view tag);
bool is_adjective_tag(std::string_view tag);
bool is_first_person(std::string_view lemma);

// Root, tokens with a subject of their own, and predicates attached by a
// clausal relation (ccomp, advcl, parataxis, acl, csubj, conj of a
// predicate). Ascending.
std::vector<int> clause_heads(const ParsedSentence& s);
// The head plus its descendants, not descending into nested clause heads.
std::vector<int> clause_span(const ParsedSentence& s, int head);

// Every selected first-person match of the ten action patterns. Candidates
// are ranked by bound-token count (desc), then pattern number, then bound
// indices; a candidate is kept unless it shares a token with a kept one.
std::vector<Event> match_action_patterns(const ParsedSentence& s);

// One event per clause. Clauses whose head anchors a selected action match
// carry that pattern; the rest are STATE events.
std::vector<Event> extract_events(const ParsedSentence& s);

// True iff a token of the event has lemma "not" or surface "n't".
bool detect_negation(const Event& e, const ParsedSentence& s);

enum class PerceptionCombo { food_feeling, food_emotion, firstperson_emotion, emotional_action };

std::string_view to_string(PerceptionCombo c);
std::optional<PerceptionCombo> combo_from_string(std::string_view s);

struct PerceptionLink {
  std::string word;
  NodeId node;
  PerceptionCombo combo;
  bool flipped = false;
  int token_index = 0;

  friend bool operator==(const PerceptionLink&, const PerceptionLink&) = default;
};

// Keyword combinations within one event:
//   food noun + feeling adjective        -> food_feeling
//   food noun + emotion adjective        -> food_emotion
//   I/we subject + emotion adjective     -> firstperson_emotion
//   event verb in the emotion lexicon    -> emotional_action
// Food nouns are emitted alongside combos 1-2. Under negation feeling and
// emotion nodes are replaced by their opposites. Links come out in token
// order.
std::vector<PerceptionLink> detect_perception(const Event& e, const ParsedSentence& s,
                                              const BeliefLexicon& lex);

enum class Tense { Past, Other };

Tense classify_tense(std::string_view verb_tag);
Tense classify_tense(const Event& e, const ParsedSentence& s);

}  // namespace mea
