#pragma once

// Tuple sets worked out by hand from the dumps under data/lexicon.

#include <set>
#include <string>
#include <tuple>

#include "mea/belief_lexicon.hpp"

namespace expected {

using Row = std::tuple<std::string, mea::NodeId, mea::BeliefSource, mea::PosClass>;

inline std::set<Row> rows(const mea::BeliefSet& s) {
  std::set<Row> out;
  for (const auto& t : s) out.emplace(t.word, t.node, t.source, t.pos_class);
  return out;
}

inline std::set<Row> food() {
  std::set<Row> out;
  for (const char* w : {"food", "nutrient", "solid food", "beverage", "drink", "drinkable", "coffee", "dish",
                        "meatball", "pizza", "pasta", "alimentary paste", "green goods", "apple", "vegetable",
                        "veggie", "baked goods", "bread", "breadstuff", "cookie", "cooky", "biscuit", "candy",
                        "confect", "taffy", "condiment", "sauce", "ketchup", "catsup"})
    out.emplace(w, mea::NodeId::food, mea::BeliefSource::wordnet_hyponym, mea::PosClass::noun);
  return out;
}

inline std::set<Row> feelings(mea::NodeId node, std::initializer_list<const char*> words) {
  std::set<Row> out;
  for (const char* w : words) out.emplace(w, node, mea::BeliefSource::sentiwordnet, mea::PosClass::adjective);
  return out;
}

inline std::set<Row> feeling_pos() {
  return feelings(mea::NodeId::experience_feeling_pos, {"perfect", "delicious", "tasty", "good", "nice", "sweet"});
}

inline std::set<Row> feeling_neg_unfiltered() {
  return feelings(mea::NodeId::experience_feeling_neg,
                  {"bitter", "hard", "stale", "bland", "disappointing", "awful", "asymptotic"});
}

inline std::set<Row> feeling_neg_filtered() {
  return feelings(mea::NodeId::experience_feeling_neg, {"bitter", "hard", "stale", "bland", "disappointing", "awful"});
}

inline std::set<Row> emo_pos_unfiltered() {
  using mea::BeliefSource;
  using mea::PosClass;
  auto n = mea::NodeId::emo_pos;
  return {{"happy", n, BeliefSource::emotion_base, PosClass::adjective},
          {"glad", n, BeliefSource::emotion_extension, PosClass::adjective},
          {"delighted", n, BeliefSource::emotion_extension, PosClass::adjective},
          {"love", n, BeliefSource::emotion_base, PosClass::verb},
          {"adore", n, BeliefSource::emotion_extension, PosClass::verb},
          {"fond", n, BeliefSource::emotion_extension, PosClass::adjective}};
}

inline std::set<Row> emo_pos_filtered() {
  auto out = emo_pos_unfiltered();
  out.erase({"fond", mea::NodeId::emo_pos, mea::BeliefSource::emotion_extension, mea::PosClass::adjective});
  return out;
}

inline std::set<Row> emo_neg() {
  using mea::BeliefSource;
  using mea::PosClass;
  auto n = mea::NodeId::emo_neg;
  return {{"angry", n, BeliefSource::emotion_base, PosClass::adjective},
          {"furious", n, BeliefSource::emotion_extension, PosClass::adjective},
          {"hate", n, BeliefSource::emotion_extension, PosClass::verb},
          {"afraid", n, BeliefSource::emotion_base, PosClass::adjective},
          {"scared", n, BeliefSource::emotion_extension, PosClass::adjective},
          {"sad", n, BeliefSource::emotion_base, PosClass::adjective},
          {"unhappy", n, BeliefSource::emotion_extension, PosClass::adjective},
          {"disappointed", n, BeliefSource::emotion_extension, PosClass::adjective}};
}

}  // namespace expected
