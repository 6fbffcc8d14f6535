#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "lexicon_expectations.hpp"
#include "mea/belief_lexicon.hpp"
#include "mea/error.hpp"
#include "test_support.hpp"

using namespace mea;
using testing_support::data_path;

namespace {

template <class F>
auto from_file(const std::string& rel, F parse) {
  std::ifstream in(data_path(rel));
  return parse(in, rel);
}

Taxonomy fixture_taxonomy() { return from_file("lexicon/wordnet_nouns.tsv", parse_taxonomy); }

}  // namespace

TEST(FoodLexicon, FixtureClosure) {
  auto food = compile_food_lexicon(fixture_taxonomy(), {"produce", "java"});
  EXPECT_EQ(expected::rows(food), expected::food());
}

TEST(FoodLexicon, ExclusionsAndUnrelatedBranches) {
  auto food = compile_food_lexicon(fixture_taxonomy(), {});
  BeliefLexicon lex(food);
  EXPECT_FALSE(lex.lookup("produce").empty());
  EXPECT_FALSE(lex.lookup("java").empty());
  EXPECT_TRUE(lex.lookup("oven").empty());
  EXPECT_TRUE(lex.lookup("apple tree").empty());
  EXPECT_TRUE(lex.lookup("flora").empty());
  EXPECT_EQ(food.size(), expected::food().size() + 2);
}

TEST(FoodLexicon, CycleIsRejected) {
  std::istringstream in("lemma\tfood.n.01\tfood\nhyponym\tfood.n.01\ta.n.01\nhyponym\ta.n.01\tfood.n.01\n");
  auto tax = parse_taxonomy(in, "cyc");
  EXPECT_THROW(compile_food_lexicon(tax, {}), CycleError);
}

TEST(FoodLexicon, MalformedTaxonomy) {
  std::istringstream in("lemma\tfood.n.01\tfood\nsynonym\tfood.n.01\tgrub\n");
  try {
    parse_taxonomy(in, "bad");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(FeelingLexicon, FixtureSets) {
  auto polar = compile_feeling_lexicon(from_file("lexicon/sentiwordnet.tsv", parse_sense_dump));
  EXPECT_EQ(expected::rows(polar.pos), expected::feeling_pos());
  EXPECT_EQ(expected::rows(polar.neg), expected::feeling_neg_unfiltered());
}

TEST(FeelingLexicon, ThresholdIsStrict) {
  auto make = [](double pos, double neg) {
    return compile_feeling_lexicon({{"w", PosClass::adjective, pos, neg, "w.a.01"}});
  };
  EXPECT_TRUE(make(0.6, 0).pos.empty());
  EXPECT_EQ(make(0.6000001, 0).pos.size(), 1u);
  EXPECT_TRUE(make(0, 0.6).neg.empty());
  EXPECT_EQ(make(0, 0.625).neg.size(), 1u);
}

TEST(FeelingLexicon, MixedPolarityAndNonAdjectivesDropped) {
  auto polar = compile_feeling_lexicon({{"hot", PosClass::adjective, 0.7, 0, "hot.a.01"},
                                        {"hot", PosClass::adjective, 0, 0.7, "hot.a.02"},
                                        {"love", PosClass::verb, 0.9, 0, "love.v.01"},
                                        {"good", PosClass::noun, 0.9, 0, "good.n.01"}});
  EXPECT_TRUE(polar.pos.empty());
  EXPECT_TRUE(polar.neg.empty());
}

TEST(FeelingLexicon, PosAndNegAreDisjointOnRandomDumps) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> score(0, 1);
  for (int round = 0; round < 100; ++round) {
    std::vector<SenseRecord> senses;
    for (int i = 0; i < 60; ++i) {
      double p = score(rng), n = score(rng) * (1 - p);
      if (rng() % 2) std::swap(p, n);
      senses.push_back({"w" + std::to_string(rng() % 20), PosClass::adjective, p, n, std::to_string(i)});
    }
    auto polar = compile_feeling_lexicon(senses);
    for (const auto& t : polar.pos)
      ASSERT_EQ(polar.neg.count({t.word, NodeId::experience_feeling_neg, t.source, t.pos_class}), 0u);
  }
}

TEST(FeelingLexicon, SenseDumpValidation) {
  std::istringstream bad_sum("x\ta\t0.8\t0.5\tx.a.01\n");
  EXPECT_THROW(parse_sense_dump(bad_sum, "s"), ParseError);
  std::istringstream bad_cols("x\ta\t0.8\n");
  EXPECT_THROW(parse_sense_dump(bad_cols, "s"), ParseError);
  std::istringstream adverb("well\tr\t0.75\t0\twell.r.01\n");
  EXPECT_TRUE(parse_sense_dump(adverb, "s").empty());
}

TEST(EmotionLexicon, FixtureSets) {
  auto polar = compile_emotion_lexicon(from_file("lexicon/emotions.tsv", parse_emotion_file));
  EXPECT_EQ(expected::rows(polar.pos), expected::emo_pos_unfiltered());
  EXPECT_EQ(expected::rows(polar.neg), expected::emo_neg());
}

TEST(EmotionLexicon, FileErrors) {
  std::istringstream orphan("glad\tJoy\tadjective\textension\n");
  EXPECT_THROW(parse_emotion_file(orphan, "e"), ParseError);
  std::istringstream switched("happy\tJoy\tadjective\tbase\nangry\tAnger\tadjective\textension\n");
  EXPECT_THROW(parse_emotion_file(switched, "e"), InputError);
  std::istringstream unknown("meh\tBoredom\tadjective\tbase\n");
  EXPECT_THROW(parse_emotion_file(unknown, "e"), InputError);
}

TEST(BeliefLexicon, InsertRules) {
  BeliefLexicon lex;
  EXPECT_TRUE(lex.insert({"happy", NodeId::emo_pos, BeliefSource::emotion_base, PosClass::adjective}));
  EXPECT_FALSE(lex.insert({"happy", NodeId::emo_pos, BeliefSource::emotion_extension, PosClass::adjective}));
  EXPECT_THROW(lex.insert({"happy", NodeId::emo_neg, BeliefSource::emotion_base, PosClass::adjective}),
               InputError);
  EXPECT_THROW(lex.insert({"Happy", NodeId::emo_pos, BeliefSource::emotion_base, PosClass::adjective}),
               InputError);
  EXPECT_THROW(lex.insert({"joy", NodeId::need_food_pos, BeliefSource::emotion_base, PosClass::noun}),
               InputError);
  EXPECT_TRUE(lex.insert({"happy", NodeId::experience_feeling_pos, BeliefSource::sentiwordnet,
                          PosClass::adjective}));
  EXPECT_EQ(lex.lookup("HAPPY"), (NodeSet{NodeId::emo_pos, NodeId::experience_feeling_pos}));
  EXPECT_TRUE(lex.lookup("sad").empty());
  ASSERT_NE(lex.find("happy", NodeId::emo_pos), nullptr);
  EXPECT_EQ(lex.find("happy", NodeId::emo_pos)->source, BeliefSource::emotion_base);
}

TEST(BeliefLexicon, NormalizeLemma) {
  EXPECT_EQ(normalize_lemma("  Solid_Food "), "solid food");
  EXPECT_EQ(normalize_lemma("ice__cream"), "ice cream");
}

TEST(BeliefLexicon, SerializeRoundTripIsDeterministic) {
  BeliefLexicon lex(compile_food_lexicon(fixture_taxonomy(), {}));
  auto polar = compile_emotion_lexicon(from_file("lexicon/emotions.tsv", parse_emotion_file));
  lex.insert_all(polar.pos);
  lex.insert_all(polar.neg);
  auto text = serialize(lex);
  std::istringstream in(text);
  auto back = deserialize(in, "rt");
  EXPECT_EQ(back, lex);
  EXPECT_EQ(serialize(back), text);

  BeliefLexicon reversed;
  std::vector<BeliefTuple> tuples(lex.tuples().begin(), lex.tuples().end());
  for (auto it = tuples.rbegin(); it != tuples.rend(); ++it) reversed.insert(*it);
  EXPECT_EQ(serialize(reversed), text);
}

TEST(BeliefLexicon, DeserializeErrorsCarryLines) {
  std::istringstream no_header("meatball\tfood\twordnet_hyponym\tnoun\n");
  EXPECT_THROW(deserialize(no_header, "x"), ParseError);
  std::istringstream bad_node("#mea-lexicon v1\nmeatball\tfood\twordnet_hyponym\tnoun\nx\tneed_water\tsentiwordnet\tadjective\n");
  try {
    deserialize(bad_node, "x");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream dup("#mea-lexicon v1\nmeatball\tfood\twordnet_hyponym\tnoun\nmeatball\tfood\twordnet_hyponym\tnoun\n");
  EXPECT_THROW(deserialize(dup, "x"), ParseError);
}

TEST(BeliefLexicon, CommittedFixtureLexiconLoads) {
  auto lex = load_lexicon_file(data_path("lexicon/lexicon.tsv"));
  std::set<expected::Row> want = expected::food();
  for (const auto& part : {expected::feeling_pos(), expected::feeling_neg_filtered(), expected::emo_pos_filtered(),
                           expected::emo_neg()})
    want.insert(part.begin(), part.end());
  EXPECT_EQ(expected::rows(lex.tuples()), want);
}
