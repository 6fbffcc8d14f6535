#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "mea/corpus.hpp"
#include "mea/llm_client.hpp"
#include "mea/mea_dag.hpp"
#include "test_support.hpp"

#include <unistd.h>

using namespace mea;
using testing_support::data_path;
using testing_support::slurp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("mea_corpus_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  return p;
}

IngestResult ingest(const std::string& doc, ReviewFormat f) {
  std::istringstream in(doc);
  return ingest_reviews(in, f, "mem");
}

std::vector<IndexEntry> synthetic_index(int n) {
  std::vector<IndexEntry> out;
  for (int i = 0; i < n; ++i) out.push_back({"r" + std::to_string(i), 1 + i % 7, 2, i % 3 != 2});
  return out;
}

struct GoldRun {
  RunResult result;
  fs::path out;
};

GoldRun run_fixture_corpus(const std::string& tag, std::size_t workers) {
  ClientConfig cfg;
  cfg.mode = ClientMode::replay;
  cfg.replay_file = data_path("replay/glm4_replay.jsonl");
  LlmClient client(cfg);
  RunConfig rc;
  rc.out_dir = scratch(tag).string();
  rc.workers = workers;
  rc.write_dot = true;
  auto reviews = ingest_reviews(data_path("corpus/reviews.snap"), ReviewFormat::snap);
  auto parses = read_parses(data_path("corpus/parses.conllu"));
  auto lex = load_lexicon_file(data_path("lexicon/lexicon.tsv"));
  return {run_pipeline(reviews, parses, default_graph(), lex, client, rc), rc.out_dir};
}

}  // namespace

TEST(Ingest, SnapBlocks) {
  auto r = ingest(
      "product/productId: B1\nreview/text: Great taffy.\n\nproduct/productId: B2\nreview/text:   \n\n"
      "product/productId: B3\nreview/summary: x\n\n\nproduct/productId: B4\nreview/text: It is fine: really.\n",
      ReviewFormat::snap);
  ASSERT_EQ(r.records.size(), 2u);
  EXPECT_EQ(r.records[0].review_id, "1");
  EXPECT_EQ(r.records[0].text, "Great taffy.");
  EXPECT_EQ(r.records[1].review_id, "4");
  EXPECT_EQ(r.records[1].text, "It is fine: really.");
  ASSERT_EQ(r.rejected.size(), 2u);
  EXPECT_EQ(r.rejected[0].review_id, "2");
  EXPECT_EQ(r.rejected[1].review_id, "3");
}

TEST(Ingest, FixtureCorpus) {
  auto r = ingest_reviews(data_path("corpus/reviews.snap"), ReviewFormat::snap);
  EXPECT_EQ(r.records.size(), 23u);
  EXPECT_TRUE(r.rejected.empty());
  EXPECT_EQ(r.records.back().review_id, "23");
}

TEST(Ingest, CsvQuotedFields) {
  auto r = ingest(
      "Id,ProductId,Score,Text\r\n7,B1,5,\"Sweet, \"\"soft\"\" taffy\nwith a second line\"\r\n8,B2,1,\r\n9,B3,4,Fine\n",
      ReviewFormat::csv);
  ASSERT_EQ(r.records.size(), 2u);
  EXPECT_EQ(r.records[0].review_id, "7");
  EXPECT_EQ(r.records[0].text, "Sweet, \"soft\" taffy\nwith a second line");
  EXPECT_EQ(r.records[1].text, "Fine");
  ASSERT_EQ(r.rejected.size(), 1u);
  EXPECT_EQ(r.rejected[0].review_id, "8");
  EXPECT_THROW(ingest("Name,Body\nx,y\n", ReviewFormat::csv), InputError);
  EXPECT_THROW(ingest("Id,Text\n1,a\n1,b\n", ReviewFormat::csv), InputError);
}

TEST(Pipeline, EmptyCorpus) {
  HeuristicClassifier cls;
  RunConfig rc;
  rc.out_dir = scratch("empty").string();
  auto result = run_pipeline({}, {}, default_graph(), BeliefLexicon{}, cls, rc);
  EXPECT_EQ(result.stats, CorpusStats{});
  EXPECT_EQ(result.exit_code(), 0);
  EXPECT_TRUE(fs::exists(fs::path(rc.out_dir) / "stats.json"));
  EXPECT_TRUE(read_index(rc.out_dir).empty());
  fs::remove_all(rc.out_dir);
}

TEST(Pipeline, FixtureCorpusMatchesGold) {
  auto [result, out] = run_fixture_corpus("gold", 1);
  const auto& s = result.stats;
  EXPECT_EQ(s.total_reviews, 23u);
  EXPECT_EQ(s.failed_reviews, 0u);
  EXPECT_EQ(s.reviews_with_events, 23u);
  EXPECT_EQ(s.valid_dags, 20u);
  EXPECT_EQ(s.invalid_both_needs, 1u);
  EXPECT_EQ(s.invalid_no_need, 2u);
  EXPECT_TRUE(s.consistent());
  EXPECT_EQ(s.classifier_calls, 21u);
  EXPECT_EQ(s.classifier_cache_hits, 21u);
  const std::map<std::string, std::size_t> patterns = {{"STATE", 28}, {"P1", 2}, {"P2", 14}, {"P3", 1},
                                                       {"P4", 1},     {"P5", 1}, {"P6", 1},  {"P7", 1},
                                                       {"P8", 1},     {"P9", 1}, {"P10", 2}};
  EXPECT_EQ(s.pattern_counts, patterns);
  ASSERT_EQ(result.warnings.size(), 1u);
  EXPECT_EQ(result.warnings[0].rfind("23: skipped action event 'I reheat them .'", 0), 0u);
  EXPECT_EQ(result.exit_code(), 0);

  for (int id = 1; id <= 23; ++id) {
    auto name = std::to_string(id) + ".json";
    auto got = nlohmann::json::parse(slurp((out / "dags" / name).string()));
    auto want = nlohmann::json::parse(slurp(data_path("corpus/gold/" + name)));
    EXPECT_EQ(got, want) << "review " << id << "\n" << nlohmann::json::diff(want, got).dump(1);
    EXPECT_TRUE(fs::exists(out / "dags" / (std::to_string(id) + ".dot")));
  }
  auto index = read_index(out.string());
  ASSERT_EQ(index.size(), 23u);
  EXPECT_EQ(index[16].review_id, "17");
  EXPECT_EQ(index[16].sentence_count, 5);
  EXPECT_EQ(nlohmann::json::parse(slurp((out / "stats.json").string())), to_json(s));
  fs::remove_all(out);
}

TEST(Pipeline, WorkerCountDoesNotChangeOutput) {
  auto one = run_fixture_corpus("w1", 1);
  auto four = run_fixture_corpus("w4", 4);
  EXPECT_EQ(one.result.stats, four.result.stats);
  for (const auto& entry : fs::directory_iterator(one.out / "dags"))
    EXPECT_EQ(slurp(entry.path().string()), slurp((four.out / "dags" / entry.path().filename()).string()));
  EXPECT_EQ(slurp((one.out / "index.tsv").string()), slurp((four.out / "index.tsv").string()));
  EXPECT_EQ(slurp((one.out / "failures.log").string()), slurp((four.out / "failures.log").string()));
  fs::remove_all(one.out);
  fs::remove_all(four.out);
}

TEST(Pipeline, QuarantinesBadReviews) {
  HeuristicClassifier cls;
  RunConfig rc;
  rc.out_dir = scratch("robust").string();
  auto reviews = ingest_reviews(data_path("robust/reviews.snap"), ReviewFormat::snap);
  auto parses = read_parses(data_path("robust/parses.conllu"));
  auto lex = load_lexicon_file(data_path("lexicon/lexicon.tsv"));
  auto result = run_pipeline(reviews, parses, default_graph(), lex, cls, rc);
  EXPECT_EQ(result.exit_code(), 2);
  ASSERT_EQ(result.failures.size(), 2u);
  EXPECT_EQ(result.failures[0].review_id, "3");
  EXPECT_EQ(result.failures[1].review_id, "4");
  EXPECT_NE(result.failures[1].reason.find("malformed parse"), std::string::npos);
  EXPECT_EQ(result.stats.total_reviews, 5u);
  EXPECT_EQ(result.stats.failed_reviews, 2u);
  EXPECT_EQ(result.stats.reviews_with_events, 3u);
  auto log = slurp((fs::path(rc.out_dir) / "failures.log").string());
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 2);
  fs::remove_all(rc.out_dir);
}

TEST(Pipeline, OrphanParsesAreQuarantined) {
  HeuristicClassifier cls;
  RunConfig rc;
  rc.out_dir = scratch("orphan").string();
  auto reviews = ingest("review/text: I love pizza .\n", ReviewFormat::snap);
  std::istringstream in("# review_id = 1\n1\tI\tI\t_\tPRP\t_\t2\tnsubj\t_\t_\n2\tgo\tgo\t_\tVBP\t_\t0\troot\t_\t_\n\n"
                        "# review_id = 99\n1\tgo\tgo\t_\tVB\t_\t0\troot\t_\t_\n");
  auto parses = read_conllu(in, "mem");
  auto result = run_pipeline(reviews, parses, default_graph(), BeliefLexicon{}, cls, rc);
  ASSERT_EQ(result.failures.size(), 1u);
  EXPECT_EQ(result.failures[0].review_id, "99");
  EXPECT_EQ(result.stats.reviews_with_events, 1u);
  fs::remove_all(rc.out_dir);
}

TEST(Index, RoundTripAndErrors) {
  auto idx = synthetic_index(6);
  std::ostringstream out;
  write_index(out, idx);
  auto path = scratch("index.tsv");
  std::ofstream(path) << out.str();
  auto back = read_index(path.string());
  ASSERT_EQ(back.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    EXPECT_EQ(back[i].review_id, idx[i].review_id);
    EXPECT_EQ(back[i].sentence_count, idx[i].sentence_count);
    EXPECT_EQ(back[i].valid, idx[i].valid);
  }
  std::ofstream(path) << "r1\t2\t3\tyes\n";
  EXPECT_THROW(read_index(path.string()), ParseError);
  fs::remove(path);
  EXPECT_THROW(read_index(path.string()), InputError);
}

TEST(Sampling, SplitBoundary) {
  EXPECT_EQ(split_for(1), Split::short_review);
  EXPECT_EQ(split_for(4), Split::short_review);
  EXPECT_EQ(split_for(5), Split::long_review);
  EXPECT_EQ(split_for(12), Split::long_review);
  std::vector<IndexEntry> idx = {{"a", 4, 1, true}, {"b", 5, 1, true}};
  auto m = sample_for_evaluation(idx, 2, 1);
  ASSERT_EQ(m.entries.size(), 2u);
  EXPECT_EQ(m.entries[0].split, Split::short_review);
  EXPECT_EQ(m.entries[1].split, Split::long_review);
}

TEST(Sampling, DeterministicValidOnly) {
  auto idx = synthetic_index(300);
  auto a = to_json(sample_for_evaluation(idx, 100, 42));
  auto b = to_json(sample_for_evaluation(idx, 100, 42));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, to_json(sample_for_evaluation(idx, 100, 43)));
  std::set<std::string> ids;
  for (const auto& e : a["entries"]) {
    ids.insert(e["review_id"].get<std::string>());
    int k = std::stoi(e["review_id"].get<std::string>().substr(1));
    EXPECT_NE(k % 3, 2);
    ASSERT_EQ(e["annotations"].size(), 1u);
    EXPECT_EQ(e["annotations"][0]["error_type"], "");
  }
  EXPECT_EQ(ids.size(), 100u);
  EXPECT_THROW(sample_for_evaluation(idx, 201, 1), InputError);
  EXPECT_EQ(sample_for_evaluation(idx, 200, 1).entries.size(), 200u);
}

TEST(Sampling, RoughlyUniform) {
  std::vector<IndexEntry> idx;
  for (int i = 0; i < 20; ++i) idx.push_back({"r" + std::to_string(i), 3, 1, true});
  std::vector<int> hits(20, 0);
  const int trials = 4000;
  for (int t = 0; t < trials; ++t)
    for (const auto& e : sample_for_evaluation(idx, 10, static_cast<std::uint64_t>(t)).entries)
      ++hits[static_cast<std::size_t>(std::stoi(e.review_id.substr(1)))];
  for (int h : hits) EXPECT_NEAR(static_cast<double>(h) / trials, 0.5, 0.05);
}

TEST(Manifest, BlankSlotsAndUnknownLabels) {
  auto m = sample_for_evaluation(synthetic_index(30), 5, 9);
  auto back = manifest_from_json(to_json(m));
  ASSERT_EQ(back.entries.size(), 5u);
  for (const auto& e : back.entries) EXPECT_TRUE(e.annotations.empty());
  EXPECT_EQ(back.seed, 9u);

  auto doc = to_json(m);
  doc["entries"][0]["annotations"] = {{{"error_type", "Wrong Belief"}, {"note", "n"}},
                                      {{"error_type", "wrong_past_action"}, {"note", ""}}};
  doc["entries"][1]["annotations"] = {{{"error_type", "Spelling"}, {"note", ""}}};
  doc["entries"][2]["annotations"] = {{{"error_type", "Sarcasm"}, {"note", ""}}};
  try {
    manifest_from_json(doc);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    ASSERT_EQ(e.offenders().size(), 2u);
    EXPECT_NE(e.offenders()[0].find("Spelling"), std::string::npos);
    EXPECT_NE(e.offenders()[1].find("Sarcasm"), std::string::npos);
  }
  doc["entries"][1]["annotations"] = {{{"error_type", " "}, {"note", "looked fine"}}};
  doc["entries"][2]["annotations"] = nlohmann::json::array();
  auto ok = manifest_from_json(doc);
  ASSERT_EQ(ok.entries[0].annotations.size(), 2u);
  EXPECT_EQ(ok.entries[0].annotations[0].error_type, ErrorType::WrongBelief);
  EXPECT_EQ(ok.entries[0].annotations[1].error_type, ErrorType::WrongPastAction);
}

TEST(Report, EmptyManifest) {
  auto r = report_errors(Manifest{});
  EXPECT_EQ(r.total.samples, 0u);
  EXPECT_EQ(percent(0, 0), "0.0");
  auto text = format_report(r);
  EXPECT_NE(text.find("Short-Test"), std::string::npos);
  EXPECT_NE(text.find("0.0%"), std::string::npos);
}

TEST(Report, TwoErrorsOnOneSample) {
  Manifest m;
  m.entries.push_back({"a", 2, Split::short_review,
                       {{"a", ErrorType::NegationLoss, ""}, {"a", ErrorType::WrongBelief, ""}}});
  m.entries.push_back({"b", 6, Split::long_review, {}});
  auto r = report_errors(m);
  EXPECT_EQ(r.total.samples, 2u);
  EXPECT_EQ(r.total.incorrect, 1u);
  EXPECT_EQ(r.total.total_errors, 2u);
  EXPECT_EQ(r.short_test.incorrect, 1u);
  EXPECT_EQ(r.long_test.incorrect, 0u);
  EXPECT_EQ(r.long_test.samples, 1u);
  auto j = to_json(r);
  EXPECT_EQ(j["test"]["incorrect_percent"], "50.0");
  EXPECT_EQ(j["test"]["errors"]["NegationLoss"]["percent"], "50.0");
}

TEST(Report, PercentagesSumToHundred) {
  auto r = report_errors(load_manifest(data_path("eval/annotated_manifest.json")));
  for (const auto* s : {&r.total, &r.short_test, &r.long_test}) {
    double sum = 0;
    for (auto c : s->errors) sum += std::stod(percent(c, s->total_errors));
    EXPECT_NEAR(sum, 100.0, 0.1 + 1e-9);
  }
  EXPECT_EQ(error_type_from_string("ASER Extraction Loss"), ErrorType::AserExtractionLoss);
  EXPECT_EQ(error_type_from_string("negationloss"), ErrorType::NegationLoss);
  EXPECT_FALSE(error_type_from_string("Negation"));
}
