#include "mea/belief_lexicon.hpp"

#include <cctype>
#include <charconv>
#include <deque>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mea/error.hpp"
#include "mea/text.hpp"

namespace mea {

std::string_view to_string(BeliefSource s) {
  switch (s) {
    case BeliefSource::wordnet_hyponym: return "wordnet_hyponym";
    case BeliefSource::sentiwordnet: return "sentiwordnet";
    case BeliefSource::emotion_base: return "emotion_base";
    case BeliefSource::emotion_extension: return "emotion_extension";
  }
  return "?";
}

std::string_view to_string(PosClass p) {
  switch (p) {
    case PosClass::noun: return "noun";
    case PosClass::adjective: return "adjective";
    case PosClass::verb: return "verb";
  }
  return "?";
}

std::string_view to_string(EmotionClass c) {
  switch (c) {
    case EmotionClass::Anger: return "Anger";
    case EmotionClass::Fear: return "Fear";
    case EmotionClass::Joy: return "Joy";
    case EmotionClass::Love: return "Love";
    case EmotionClass::Sadness: return "Sadness";
    case EmotionClass::Surprise: return "Surprise";
  }
  return "?";
}

std::optional<BeliefSource> belief_source_from_string(std::string_view s) {
  for (auto v : {BeliefSource::wordnet_hyponym, BeliefSource::sentiwordnet,
                 BeliefSource::emotion_base, BeliefSource::emotion_extension})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

std::optional<PosClass> pos_class_from_string(std::string_view s) {
  if (s == "noun" || s == "n") return PosClass::noun;
  if (s == "adjective" || s == "a" || s == "s" || s == "adj") return PosClass::adjective;
  if (s == "verb" || s == "v") return PosClass::verb;
  return std::nullopt;
}

std::optional<EmotionClass> emotion_class_from_string(std::string_view s) {
  for (auto c : {EmotionClass::Anger, EmotionClass::Fear, EmotionClass::Joy, EmotionClass::Love,
                 EmotionClass::Sadness, EmotionClass::Surprise})
    if (to_string(c) == s) return c;
  // Short form of Sadness.
  if (s == "Sad") return EmotionClass::Sadness;
  return std::nullopt;
}

std::string normalize_lemma(std::string_view raw) {
  std::string out;
  bool pending_space = false;
  for (char c : text::trim(raw)) {
    if (c == '_' || std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

bool is_perception_node(NodeId n) {
  switch (n) {
    case NodeId::food:
    case NodeId::experience_feeling_pos:
    case NodeId::experience_feeling_neg:
    case NodeId::emo_pos:
    case NodeId::emo_neg:
      return true;
    default:
      return false;
  }
}

void check_tuple(const BeliefTuple& t) {
  if (t.word.empty()) throw InputError("belief word is empty");
  if (normalize_lemma(t.word) != t.word)
    throw InputError("belief word '" + t.word + "' is not a normalized lowercase lemma");
  if (!is_perception_node(t.node))
    throw InputError("belief '" + t.word + "' points at non-perception node " +
                     std::string(to_string(t.node)));
  if (t.source == BeliefSource::wordnet_hyponym &&
      (t.node != NodeId::food || t.pos_class != PosClass::noun))
    throw InputError("hyponym belief '" + t.word + "' must be a food noun");
}

BeliefLexicon::BeliefLexicon(const BeliefSet& tuples) { insert_all(tuples); }

bool BeliefLexicon::insert(const BeliefTuple& t) {
  check_tuple(t);
  auto it = index_.find(t.word);
  if (it != index_.end()) {
    if (it->second.contains(t.node)) return false;
    if (auto opposite = try_opposite(t.node); opposite && it->second.contains(*opposite))
      throw InputError("belief '" + t.word + "' maps to both " + std::string(to_string(t.node)) +
                       " and " + std::string(to_string(*opposite)));
  }
  tuples_.insert(t);
  index_[t.word].insert(t.node);
  return true;
}

void BeliefLexicon::insert_all(const BeliefSet& tuples) {
  for (const auto& t : tuples) insert(t);
}

NodeSet BeliefLexicon::lookup(std::string_view word) const {
  auto it = index_.find(normalize_lemma(word));
  return it == index_.end() ? NodeSet{} : it->second;
}

const BeliefTuple* BeliefLexicon::find(std::string_view word, NodeId node) const {
  BeliefTuple probe{normalize_lemma(word), node, BeliefSource::sentiwordnet, PosClass::adjective};
  auto it = tuples_.find(probe);
  return it == tuples_.end() ? nullptr : &*it;
}

// -----------------------------------------------------------------------------

Taxonomy parse_taxonomy(std::istream& in, const std::string& source_name) {
  Taxonomy tax;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    text::chomp(line);
    if (text::trim(line).empty() || line.front() == '#') continue;
    auto f = text::split(line, '\t');
    if (f.size() != 3 || f[1].empty() || f[2].empty())
      throw ParseError(source_name, line_no, "expected kind<TAB>synset<TAB>value");
    if (f[0] == "hyponym") {
      tax.children[f[1]].push_back(f[2]);
    } else if (f[0] == "lemma") {
      tax.lemmas[f[1]].push_back(f[2]);
    } else {
      throw ParseError(source_name, line_no, "unknown row kind '" + f[0] + "'");
    }
  }
  return tax;
}

namespace {

void check_acyclic(const Taxonomy& tax) {
  enum class Colour { grey, black };
  std::map<std::string_view, Colour> colour;
  for (const auto& [root, _] : tax.children) {
    if (colour.count(root)) continue;
    std::vector<std::pair<std::string_view, std::size_t>> stack{{root, 0}};
    colour[root] = Colour::grey;
    while (!stack.empty()) {
      auto& [node, next_child] = stack.back();
      auto it = tax.children.find(std::string(node));
      if (it == tax.children.end() || next_child >= it->second.size()) {
        colour[node] = Colour::black;
        stack.pop_back();
        continue;
      }
      std::string_view child = it->second[next_child++];
      auto c = colour.find(child);
      if (c == colour.end()) {
        colour[child] = Colour::grey;
        stack.emplace_back(child, 0);
      } else if (c->second == Colour::grey) {
        throw CycleError("hyponym taxonomy has a cycle through " + std::string(child));
      }
    }
  }
}

}  // namespace

BeliefSet compile_food_lexicon(const Taxonomy& tax, const std::set<std::string>& exclusions) {
  check_acyclic(tax);

  std::set<std::string> excluded;
  for (const auto& e : exclusions) excluded.insert(normalize_lemma(e));

  std::deque<std::string> queue;
  std::set<std::string> seen;
  for (const auto& [synset, words] : tax.lemmas) {
    for (const auto& w : words) {
      if (normalize_lemma(w) == "food" && seen.insert(synset).second) queue.push_back(synset);
    }
  }

  BeliefSet out;
  while (!queue.empty()) {
    std::string synset = std::move(queue.front());
    queue.pop_front();
    if (auto it = tax.lemmas.find(synset); it != tax.lemmas.end()) {
      for (const auto& w : it->second) {
        auto word = normalize_lemma(w);
        if (word.empty() || excluded.count(word)) continue;
        out.insert({word, NodeId::food, BeliefSource::wordnet_hyponym, PosClass::noun});
      }
    }
    if (auto it = tax.children.find(synset); it != tax.children.end()) {
      for (const auto& child : it->second)
        if (seen.insert(child).second) queue.push_back(child);
    }
  }
  return out;
}

namespace {

double parse_score(const std::string& field, const std::string& source, std::size_t line) {
  auto s = text::trim(field);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError(source, line, "bad score '" + field + "'");
  return value;
}

}  // namespace

std::vector<SenseRecord> parse_sense_dump(std::istream& in, const std::string& source_name) {
  std::vector<SenseRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    text::chomp(line);
    if (text::trim(line).empty() || line.front() == '#') continue;
    auto f = text::split(line, '\t');
    if (f.size() != 5) throw ParseError(source_name, line_no, "expected 5 tab-separated fields");
    if (f[1] == "r") continue;
    auto pos = pos_class_from_string(f[1]);
    if (!pos) throw ParseError(source_name, line_no, "unknown pos class '" + f[1] + "'");
    SenseRecord r{normalize_lemma(f[0]), *pos, parse_score(f[2], source_name, line_no),
                  parse_score(f[3], source_name, line_no), f[4]};
    if (r.lemma.empty()) throw ParseError(source_name, line_no, "empty lemma");
    if (r.pos_score < 0 || r.neg_score < 0 || r.pos_score + r.neg_score > 1.0 + 1e-9)
      throw ParseError(source_name, line_no, "scores must be non-negative and sum to at most 1");
    out.push_back(std::move(r));
  }
  return out;
}

PolarBeliefs compile_feeling_lexicon(const std::vector<SenseRecord>& senses) {
  struct Votes {
    bool pos = false;
    bool neg = false;
  };
  std::map<std::string, Votes> votes;
  for (const auto& s : senses) {
    if (s.pos_score < 0 || s.neg_score < 0 || s.pos_score > 1 || s.neg_score > 1 ||
        s.pos_score + s.neg_score > 1.0 + 1e-9)
      throw InputError("sense " + s.sense_id + " has scores outside [0,1]");
    if (s.pos_class != PosClass::adjective) continue;
    auto& v = votes[normalize_lemma(s.lemma)];
    v.pos |= s.pos_score > kFeelingThreshold;
    v.neg |= s.neg_score > kFeelingThreshold;
  }
  PolarBeliefs out;
  for (const auto& [lemma, v] : votes) {
    if (lemma.empty() || v.pos == v.neg) continue;
    auto node = v.pos ? NodeId::experience_feeling_pos : NodeId::experience_feeling_neg;
    (v.pos ? out.pos : out.neg).insert({lemma, node, BeliefSource::sentiwordnet, PosClass::adjective});
  }
  return out;
}

std::vector<EmotionBaseWord> parse_emotion_file(std::istream& in, const std::string& source_name) {
  std::vector<EmotionBaseWord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    text::chomp(line);
    if (text::trim(line).empty() || line.front() == '#') continue;
    auto f = text::split(line, '\t');
    if (f.size() != 4) throw ParseError(source_name, line_no, "expected 4 tab-separated fields");
    auto word = normalize_lemma(f[0]);
    if (word.empty()) throw ParseError(source_name, line_no, "empty word");
    auto cls = emotion_class_from_string(text::trim(f[1]));
    if (!cls) throw InputError(source_name + ":" + std::to_string(line_no) +
                               ": unknown emotion class '" + f[1] + "'");
    auto pos = pos_class_from_string(text::trim(f[2]));
    if (!pos) throw ParseError(source_name, line_no, "unknown pos class '" + f[2] + "'");
    auto kind = text::trim(f[3]);
    if (kind == "base") {
      out.push_back({word, *cls, *pos, {}});
    } else if (kind == "extension") {
      if (out.empty()) throw ParseError(source_name, line_no, "extension before any base word");
      if (out.back().emotion_class != *cls)
        throw InputError(source_name + ":" + std::to_string(line_no) + ": extension '" + word +
                         "' changes the class of base word '" + out.back().word + "'");
      out.back().extensions.emplace_back(word, *pos);
    } else {
      throw ParseError(source_name, line_no, "last field must be base or extension");
    }
  }
  return out;
}

PolarBeliefs compile_emotion_lexicon(const std::vector<EmotionBaseWord>& bases) {
  PolarBeliefs out;
  auto polarity = [](EmotionClass c) -> std::optional<NodeId> {
    switch (c) {
      case EmotionClass::Joy:
      case EmotionClass::Love:
        return NodeId::emo_pos;
      case EmotionClass::Anger:
      case EmotionClass::Fear:
      case EmotionClass::Sadness:
        return NodeId::emo_neg;
      case EmotionClass::Surprise:
        return std::nullopt;
    }
    return std::nullopt;
  };
  auto add = [&](const std::string& raw, PosClass pos, NodeId node, BeliefSource src) {
    if (pos == PosClass::noun) return;
    auto word = normalize_lemma(raw);
    if (word.empty()) return;
    (node == NodeId::emo_pos ? out.pos : out.neg).insert({word, node, src, pos});
  };
  for (const auto& b : bases) {
    auto node = polarity(b.emotion_class);
    if (!node) continue;
    add(b.word, b.pos_class, *node, BeliefSource::emotion_base);
    for (const auto& [word, pos] : b.extensions) add(word, pos, *node, BeliefSource::emotion_extension);
  }
  // Words filed under both polarities are dropped from both.
  std::vector<std::string> conflicts;
  for (const auto& t : out.pos) {
    BeliefTuple probe{t.word, NodeId::emo_neg, t.source, t.pos_class};
    if (out.neg.count(probe)) conflicts.push_back(t.word);
  }
  for (const auto& w : conflicts) {
    out.pos.erase({w, NodeId::emo_pos, BeliefSource::emotion_base, PosClass::adjective});
    out.neg.erase({w, NodeId::emo_neg, BeliefSource::emotion_base, PosClass::adjective});
  }
  return out;
}

// -----------------------------------------------------------------------------

void serialize(std::ostream& out, const BeliefLexicon& lex) {
  out << kLexiconHeader << '\n';
  for (const auto& t : lex.tuples())
    out << t.word << '\t' << to_string(t.node) << '\t' << to_string(t.source) << '\t'
        << to_string(t.pos_class) << '\n';
}

std::string serialize(const BeliefLexicon& lex) {
  std::ostringstream out;
  serialize(out, lex);
  return out.str();
}

BeliefLexicon deserialize(std::istream& in, const std::string& source_name) {
  BeliefLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    text::chomp(line);
    if (!saw_header) {
      if (line != kLexiconHeader)
        throw ParseError(source_name, line_no, "missing '" + std::string(kLexiconHeader) + "' header");
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    auto f = text::split(line, '\t');
    if (f.size() != 4) throw ParseError(source_name, line_no, "expected 4 tab-separated fields");
    auto node = node_from_string(f[1]);
    auto source = belief_source_from_string(f[2]);
    auto pos = pos_class_from_string(f[3]);
    if (!node) throw ParseError(source_name, line_no, "unknown node '" + f[1] + "'");
    if (!source) throw ParseError(source_name, line_no, "unknown source '" + f[2] + "'");
    if (!pos) throw ParseError(source_name, line_no, "unknown pos class '" + f[3] + "'");
    try {
      if (!lex.insert({f[0], *node, *source, *pos}))
        throw ParseError(source_name, line_no, "duplicate belief " + f[0] + "/" + f[1]);
    } catch (const InputError& e) {
      throw ParseError(source_name, line_no, e.what());
    }
  }
  if (!saw_header) throw ParseError(source_name, 0, "empty lexicon file");
  return lex;
}

BeliefLexicon load_lexicon_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open lexicon " + path);
  return deserialize(in, path);
}

}  // namespace mea
