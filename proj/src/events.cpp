#include "mea/events.hpp"

#include <algorithm>
#include <array>
#include <tuple>

#include "mea/text.hpp"

namespace mea {

namespace {

constexpr std::array<std::string_view, 11> kPatternNames = {
    "STATE", "P1", "P2", "P3", "P4", "P5", "P6", "P7", "P8", "P9", "P10"};

constexpr std::array<int, 11> kArity = {1, 2, 3, 3, 4, 4, 4, 4, 3, 4, 5};

// Children of each token grouped for quick relation lookups.
class DepIndex {
 public:
  explicit DepIndex(const ParsedSentence& s) : s_(s), children_(static_cast<std::size_t>(s.size()) + 1) {
    for (const auto& t : s.tokens) {
      children_[static_cast<std::size_t>(t.head)].push_back(t.index);
      rel_.push_back(normalize_deprel(t.deprel));
    }
  }

  const Token& tok(int i) const { return s_.token(i); }
  const std::string& rel(int i) const { return rel_[static_cast<std::size_t>(i - 1)]; }
  const std::vector<int>& children(int i) const { return children_[static_cast<std::size_t>(i)]; }

  template <typename Pred>
  std::vector<int> children_with(int head, std::string_view relation, Pred pred) const {
    std::vector<int> out;
    for (int c : children(head))
      if (rel(c) == relation && pred(tok(c))) out.push_back(c);
    return out;
  }

 private:
  const ParsedSentence& s_;
  std::vector<std::vector<int>> children_;
  std::vector<std::string> rel_;
};

bool any_tag(const Token&) { return true; }
bool noun(const Token& t) { return is_noun_tag(t.pos_tag); }
bool verb(const Token& t) { return is_verb_tag(t.pos_tag); }
bool adjective(const Token& t) { return is_adjective_tag(t.pos_tag); }
bool adjective_or_participle(const Token& t) { return adjective(t) || t.pos_tag == "VBN"; }
bool be(const Token& t) { return t.lemma == "be"; }

struct Candidate {
  PatternId pattern;
  std::vector<int> core;
};

std::vector<int> sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

void collect_candidates(const DepIndex& dx, int subject, int v1, std::vector<Candidate>& out) {
  auto add = [&](PatternId p, std::vector<int> core) { out.push_back({p, std::move(core)}); };
  const int s = subject;

  add(PatternId::P1, {s, v1});
  for (int n2 : dx.children_with(v1, "dobj", noun)) add(PatternId::P2, {s, v1, n2});
  for (int a : dx.children_with(v1, "xcomp", adjective)) add(PatternId::P3, {s, v1, a});
  for (int n2 : dx.children_with(v1, "iobj", noun))
    for (int n3 : dx.children_with(v1, "dobj", noun)) add(PatternId::P4, {s, v1, n2, n3});
  for (int a1 : dx.children_with(v1, "xcomp", adjective_or_participle)) {
    for (int b : dx.children_with(a1, "cop", be)) add(PatternId::P5, {s, v1, a1, b});
    if (dx.tok(a1).pos_tag == "VBN")
      for (int b : dx.children_with(a1, "auxpass", be)) add(PatternId::P5, {s, v1, a1, b});
  }
  for (int n2 : dx.children_with(v1, "xcomp", noun))
    for (int b : dx.children_with(n2, "cop", be)) add(PatternId::P6, {s, v1, n2, b});
  for (int v2 : dx.children_with(v1, "xcomp", verb)) {
    for (int n2 : dx.children_with(v2, "dobj", noun)) add(PatternId::P7, {s, v1, v2, n2});
    add(PatternId::P8, {s, v1, v2});
  }
  for (int n2 : dx.children_with(v1, "nmod", noun))
    for (int p1 : dx.children_with(n2, "case", any_tag)) add(PatternId::P9, {s, v1, n2, p1});
  for (int n2 : dx.children_with(v1, "dobj", noun))
    for (int n3 : dx.children_with(v1, "nmod", noun))
      for (int p1 : dx.children_with(n3, "case", any_tag)) add(PatternId::P10, {s, v1, n2, n3, p1});
}

std::vector<Candidate> select(std::vector<Candidate> cands) {
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    auto ka = std::make_tuple(-static_cast<int>(a.core.size()), a.pattern, sorted(a.core));
    auto kb = std::make_tuple(-static_cast<int>(b.core.size()), b.pattern, sorted(b.core));
    return ka < kb;
  });
  std::vector<Candidate> kept;
  std::vector<bool> used;
  for (auto& c : cands) {
    bool clash = false;
    for (int i : c.core)
      if (static_cast<std::size_t>(i) < used.size() && used[static_cast<std::size_t>(i)]) clash = true;
    if (clash) continue;
    for (int i : c.core) {
      if (used.size() <= static_cast<std::size_t>(i)) used.resize(static_cast<std::size_t>(i) + 1);
      used[static_cast<std::size_t>(i)] = true;
    }
    kept.push_back(std::move(c));
  }
  return kept;
}

std::optional<int> subject_of(const DepIndex& dx, int head) {
  for (std::string_view rel : {"nsubj", "nsubjpass"})
    for (int c : dx.children(head))
      if (dx.rel(c) == rel) return c;
  return std::nullopt;
}

bool is_predicate(const DepIndex& dx, int i) {
  if (is_verb_tag(dx.tok(i).pos_tag)) return true;
  for (int c : dx.children(i)) {
    const auto& r = dx.rel(c);
    if (r == "nsubj" || r == "nsubjpass" || r == "cop") return true;
  }
  return false;
}

bool is_clause_head(const DepIndex& dx, int i) {
  const auto& t = dx.tok(i);
  if (t.head == 0) return true;
  if (subject_of(dx, i)) return true;
  const auto& r = dx.rel(i);
  if (r == "ccomp" || r == "advcl" || r == "parataxis" || r == "acl" || r == "csubj") return true;
  if (r == "conj" && is_predicate(dx, i)) return true;
  return false;
}

std::vector<int> span_of(const DepIndex& dx, int head) {
  std::vector<int> out{head};
  std::vector<int> stack{head};
  while (!stack.empty()) {
    int cur = stack.back();
    stack.pop_back();
    for (int c : dx.children(cur)) {
      if (is_clause_head(dx, c)) continue;
      out.push_back(c);
      stack.push_back(c);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string join_surfaces(const ParsedSentence& s, const std::vector<int>& indices) {
  std::string out;
  for (int i : indices) {
    if (!out.empty()) out.push_back(' ');
    out += s.token(i).surface;
  }
  return out;
}

Event make_event(const ParsedSentence& s, const DepIndex& dx, PatternId p, std::vector<int> core,
                 int verb_index) {
  Event e;
  e.review_id = s.review_id;
  e.sentence_index = s.sentence_index;
  e.pattern_id = p;
  e.verb_index = verb_index;
  e.token_indices = span_of(dx, verb_index);
  for (int i : core)
    if (!std::binary_search(e.token_indices.begin(), e.token_indices.end(), i)) {
      e.token_indices.push_back(i);
      std::sort(e.token_indices.begin(), e.token_indices.end());
    }
  e.core = std::move(core);
  if (is_action_pattern(p)) {
    e.subject_lemma = dx.tok(e.core.front()).lemma;
  } else if (auto subj = subject_of(dx, verb_index)) {
    e.subject_lemma = dx.tok(*subj).lemma;
  }
  e.text = join_surfaces(s, e.token_indices);
  e.negated = detect_negation(e, s);
  return e;
}

std::vector<Candidate> selected_matches(const DepIndex& dx, const ParsedSentence& s) {
  std::vector<Candidate> cands;
  for (const auto& t : s.tokens) {
    if (t.head == 0 || dx.rel(t.index) != "nsubj" || !is_first_person(t.lemma)) continue;
    if (!is_verb_tag(dx.tok(t.head).pos_tag)) continue;
    collect_candidates(dx, t.index, t.head, cands);
  }
  return select(std::move(cands));
}

}  // namespace

std::string_view to_string(PatternId p) { return kPatternNames[static_cast<std::size_t>(p)]; }

std::optional<PatternId> pattern_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kPatternNames.size(); ++i)
    if (kPatternNames[i] == s) return static_cast<PatternId>(i);
  return std::nullopt;
}

int pattern_arity(PatternId p) { return kArity[static_cast<std::size_t>(p)]; }

std::string normalize_deprel(std::string_view deprel) {
  auto rel = text::to_lower(deprel);
  if (rel == "nsubj:pass") return "nsubjpass";
  if (rel == "aux:pass") return "auxpass";
  if (auto colon = rel.find(':'); colon != std::string::npos) rel.resize(colon);
  if (rel == "obj") return "dobj";
  if (rel == "obl") return "nmod";
  return rel;
}

bool is_verb_tag(std::string_view tag) { return tag.starts_with("VB"); }
bool is_noun_tag(std::string_view tag) { return tag.starts_with("NN") || tag == "PRP"; }
bool is_adjective_tag(std::string_view tag) { return tag.starts_with("JJ"); }
bool is_first_person(std::string_view lemma) { return lemma == "i" || lemma == "we"; }

std::vector<int> clause_heads(const ParsedSentence& s) {
  DepIndex dx(s);
  std::vector<int> out;
  for (const auto& t : s.tokens)
    if (is_clause_head(dx, t.index)) out.push_back(t.index);
  return out;
}

std::vector<int> clause_span(const ParsedSentence& s, int head) {
  DepIndex dx(s);
  return span_of(dx, head);
}

std::vector<Event> match_action_patterns(const ParsedSentence& s) {
  DepIndex dx(s);
  std::vector<Event> out;
  for (auto& c : selected_matches(dx, s)) {
    int v1 = c.core[1];
    out.push_back(make_event(s, dx, c.pattern, std::move(c.core), v1));
  }
  std::sort(out.begin(), out.end(), [](const Event& a, const Event& b) {
    return std::tie(a.verb_index, a.core) < std::tie(b.verb_index, b.core);
  });
  return out;
}

std::vector<Event> extract_events(const ParsedSentence& s) {
  DepIndex dx(s);
  auto matches = selected_matches(dx, s);
  std::vector<Event> out;
  for (const auto& t : s.tokens) {
    if (!is_clause_head(dx, t.index)) continue;
    auto m = std::find_if(matches.begin(), matches.end(),
                          [&](const Candidate& c) { return c.core[1] == t.index; });
    if (m != matches.end())
      out.push_back(make_event(s, dx, m->pattern, m->core, t.index));
    else
      out.push_back(make_event(s, dx, PatternId::STATE, {t.index}, t.index));
  }
  return out;
}

bool detect_negation(const Event& e, const ParsedSentence& s) {
  for (int i : e.token_indices) {
    const auto& t = s.token(i);
    if (t.lemma == "not" || text::to_lower(t.surface) == "n't") return true;
  }
  return false;
}

std::string_view to_string(PerceptionCombo c) {
  switch (c) {
    case PerceptionCombo::food_feeling: return "food_feeling";
    case PerceptionCombo::food_emotion: return "food_emotion";
    case PerceptionCombo::firstperson_emotion: return "firstperson_emotion";
    case PerceptionCombo::emotional_action: return "emotional_action";
  }
  return "?";
}

std::optional<PerceptionCombo> combo_from_string(std::string_view s) {
  for (auto c : {PerceptionCombo::food_feeling, PerceptionCombo::food_emotion,
                 PerceptionCombo::firstperson_emotion, PerceptionCombo::emotional_action})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

std::vector<PerceptionLink> detect_perception(const Event& e, const ParsedSentence& s,
                                              const BeliefLexicon& lex) {
  auto pick = [](NodeSet nodes, NodeId pos, NodeId neg) -> std::optional<NodeId> {
    if (nodes.contains(pos)) return pos;
    if (nodes.contains(neg)) return neg;
    return std::nullopt;
  };

  struct Candidate {
    int index;
    bool food = false;
    std::optional<NodeId> feeling;
    std::optional<NodeId> emotion;
    std::optional<NodeId> action;
  };
  std::vector<Candidate> tokens;
  bool has_food = false, has_feeling = false, has_emotion_adj = false, has_emotional_verb = false;
  for (int i : e.token_indices) {
    const auto& t = s.token(i);
    auto nodes = lex.lookup(t.lemma);
    if (nodes.empty()) continue;
    Candidate c;
    c.index = i;
    if (is_noun_tag(t.pos_tag) && nodes.contains(NodeId::food)) c.food = true;
    if (is_adjective_tag(t.pos_tag)) {
      c.feeling = pick(nodes, NodeId::experience_feeling_pos, NodeId::experience_feeling_neg);
      c.emotion = pick(nodes, NodeId::emo_pos, NodeId::emo_neg);
    }
    if (i == e.verb_index && is_verb_tag(t.pos_tag))
      c.action = pick(nodes, NodeId::emo_pos, NodeId::emo_neg);
    has_food |= c.food;
    has_feeling |= c.feeling.has_value();
    has_emotion_adj |= c.emotion.has_value();
    has_emotional_verb |= c.action.has_value();
    tokens.push_back(c);
  }

  const bool first_person = e.subject_lemma && is_first_person(*e.subject_lemma);
  const bool food_feeling = has_food && has_feeling;
  const bool food_emotion = has_food && has_emotion_adj;
  const bool person_emotion = first_person && has_emotion_adj;
  const bool emotional_action = has_emotional_verb;
  const bool negated = detect_negation(e, s);

  std::vector<PerceptionLink> out;
  auto emit = [&](int index, NodeId node, PerceptionCombo combo, bool polar) {
    bool flip = polar && negated;
    out.push_back({s.token(index).lemma, flip ? opposite_node(node) : node, combo, flip, index});
  };
  for (const auto& c : tokens) {
    if (c.food && (food_feeling || food_emotion))
      emit(c.index, NodeId::food,
           food_feeling ? PerceptionCombo::food_feeling : PerceptionCombo::food_emotion, false);
    if (c.feeling && food_feeling) emit(c.index, *c.feeling, PerceptionCombo::food_feeling, true);
    if (c.emotion && (food_emotion || person_emotion))
      emit(c.index, *c.emotion,
           food_emotion ? PerceptionCombo::food_emotion : PerceptionCombo::firstperson_emotion, true);
    if (c.action && emotional_action)
      emit(c.index, *c.action, PerceptionCombo::emotional_action, true);
  }
  return out;
}

Tense classify_tense(std::string_view verb_tag) {
  return verb_tag == "VBD" || verb_tag == "VBN" ? Tense::Past : Tense::Other;
}

Tense classify_tense(const Event& e, const ParsedSentence& s) {
  return classify_tense(s.token(e.verb_index).pos_tag);
}

}  // namespace mea
