#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mea/nature_graph.hpp"

namespace mea {

enum class BeliefSource { wordnet_hyponym, sentiwordnet, emotion_base, emotion_extension };
enum class PosClass { noun, adjective, verb };
enum class EmotionClass { Anger, Fear, Joy, Love, Sadness, Surprise };

std::string_view to_string(BeliefSource s);
std::string_view to_string(PosClass p);
std::string_view to_string(EmotionClass c);
std::optional<BeliefSource> belief_source_from_string(std::string_view s);
// Accepts full names and the one-letter WordNet codes (n, a, s, v).
std::optional<PosClass> pos_class_from_string(std::string_view s);
std::optional<EmotionClass> emotion_class_from_string(std::string_view s);

// A (word, node) belief. The word is a lowercase lemma, multi-word lemmas
// use single spaces.
struct BeliefTuple {
  std::string word;
  NodeId node;
  BeliefSource source;
  PosClass pos_class;

  friend bool operator==(const BeliefTuple&, const BeliefTuple&) = default;
};

// Ordering used for sets and serialization: word, then node.
struct BeliefOrder {
  bool operator()(const BeliefTuple& a, const BeliefTuple& b) const {
    return std::pair(std::string_view(a.word), a.node) < std::pair(std::string_view(b.word), b.node);
  }
};

using BeliefSet = std::set<BeliefTuple, BeliefOrder>;

// Nodes a belief may point at.
bool is_perception_node(NodeId n);

// Throws InputError describing the first violated tuple invariant.
void check_tuple(const BeliefTuple& t);

// Indexed, conflict-free set of beliefs.
class BeliefLexicon {
 public:
  BeliefLexicon() = default;
  explicit BeliefLexicon(const BeliefSet& tuples);

  // Returns false when (word, node) is already present. Throws InputError
  // on an invalid tuple or on a pos/neg conflict within one family.
  bool insert(const BeliefTuple& t);
  void insert_all(const BeliefSet& tuples);

  // Case-insensitive. Empty for unknown words.
  NodeSet lookup(std::string_view word) const;
  const BeliefTuple* find(std::string_view word, NodeId node) const;

  const BeliefSet& tuples() const { return tuples_; }
  std::size_t size() const { return tuples_.size(); }
  bool empty() const { return tuples_.empty(); }

  friend bool operator==(const BeliefLexicon& a, const BeliefLexicon& b) {
    return a.tuples_ == b.tuples_;
  }

 private:
  BeliefSet tuples_;
  std::map<std::string, NodeSet, std::less<>> index_;
};

// Rule-based compilers -----------------------------------------------------

// Noun taxonomy: `hyponym<TAB>parent<TAB>child` and `lemma<TAB>synset<TAB>word`
// rows, `#` comments.
struct Taxonomy {
  std::map<std::string, std::vector<std::string>> children;
  std::map<std::string, std::vector<std::string>> lemmas;
};

Taxonomy parse_taxonomy(std::istream& in, const std::string& source_name);

// Lemmas of every synset reachable (reflexively) by hyponym links from a
// synset that lists the lemma "food". Throws CycleError on a cyclic
// taxonomy.
BeliefSet compile_food_lexicon(const Taxonomy& taxonomy, const std::set<std::string>& exclusions);

struct SenseRecord {
  std::string lemma;
  PosClass pos_class;
  double pos_score = 0.0;
  double neg_score = 0.0;
  std::string sense_id;
};

// Sense dump: lemma, pos_class, pos_score, neg_score, sense_id (tab
// separated). Adverb rows (r) are skipped. Throws ParseError/InputError.
std::vector<SenseRecord> parse_sense_dump(std::istream& in, const std::string& source_name);

inline constexpr double kFeelingThreshold = 0.6;

struct PolarBeliefs {
  BeliefSet pos;
  BeliefSet neg;
};

// Adjective senses only. A lemma is positive when it has a sense with
// pos_score above the threshold and none with neg_score above it, and
// symmetrically for negative.
PolarBeliefs compile_feeling_lexicon(const std::vector<SenseRecord>& senses);

struct EmotionBaseWord {
  std::string word;
  EmotionClass emotion_class;
  PosClass pos_class;
  std::vector<std::pair<std::string, PosClass>> extensions;
};

// Emotion file rows: word, emotion_class, pos_class, base|extension.
// Extension rows attach to the nearest preceding base row and must carry
// its class.
std::vector<EmotionBaseWord> parse_emotion_file(std::istream& in, const std::string& source_name);

// Joy/Love -> emo_pos, Anger/Fear/Sadness -> emo_neg, Surprise dropped;
// adjectives and verbs only. A word landing on both sides is dropped.
PolarBeliefs compile_emotion_lexicon(const std::vector<EmotionBaseWord>& bases);

// Lexicon file ---------------------------------------------------------------

inline constexpr std::string_view kLexiconHeader = "#mea-lexicon v1";

void serialize(std::ostream& out, const BeliefLexicon& lex);
std::string serialize(const BeliefLexicon& lex);
BeliefLexicon deserialize(std::istream& in, const std::string& source_name);
BeliefLexicon load_lexicon_file(const std::string& path);

// Lowercases, trims and turns underscores into spaces.
std::string normalize_lemma(std::string_view raw);

}  // namespace mea
