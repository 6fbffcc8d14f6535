// mea: batch front end for MEA-DAG extraction.
//
//   mea run --reviews R --format snap|csv --parses P --lexicon L --out DIR
//   mea compile-lexicon --wordnet W --sentiwordnet S --emotions E --out FILE
//   mea sample --index DIR --n 100 --seed S --out manifest.json
//   mea report --manifest FILE
//
// Exit status: 0 success, 1 fatal input error, 2 some reviews quarantined.

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mea/belief_lexicon.hpp"
#include "mea/corpus.hpp"
#include "mea/llm_client.hpp"
#include "mea/nature_graph.hpp"
#include "mea/text.hpp"

namespace {

struct ClassifierFlags {
  std::string mode = "heuristic";
  std::string replay_file;
  std::string cache_file;
  std::string template_dir;
  std::size_t max_in_flight = 4;
};

void add_classifier_flags(CLI::App* cmd, ClassifierFlags& f) {
  cmd->add_option("--classifier", f.mode, "live, replay or heuristic")
      ->check(CLI::IsMember({"live", "replay", "heuristic"}));
  cmd->add_option("--replay-file", f.replay_file, "JSONL fixture served in replay mode");
  cmd->add_option("--cache-file", f.cache_file, "JSONL response cache for live mode");
  cmd->add_option("--templates", f.template_dir, "directory of <template>.txt prompt overrides");
  cmd->add_option("--max-in-flight", f.max_in_flight, "concurrent live requests")->check(CLI::Range(1, 64));
}

std::unique_ptr<mea::LlmClient> make_client(const ClassifierFlags& f) {
  mea::ClientConfig cfg;
  cfg.apply_environment();
  cfg.mode = *mea::client_mode_from_string(f.mode);
  cfg.replay_file = f.replay_file;
  cfg.cache_file = f.cache_file;
  cfg.template_dir = f.template_dir;
  cfg.max_in_flight = f.max_in_flight;
  return std::make_unique<mea::LlmClient>(cfg);
}

std::set<std::string> read_word_list(const std::string& path) {
  std::set<std::string> out;
  if (path.empty()) return out;
  std::ifstream in(path);
  if (!in) throw mea::InputError("cannot open " + path);
  std::string line;
  while (std::getline(in, line)) {
    auto w = mea::text::trim(line);
    if (w.empty() || w.front() == '#') continue;
    out.insert(mea::normalize_lemma(w));
  }
  return out;
}

template <class Parse>
auto with_file(const std::string& path, Parse parse) {
  std::ifstream in(path);
  if (!in) throw mea::InputError("cannot open " + path);
  return parse(in, path);
}

std::vector<std::string> words_of(const mea::BeliefSet& set) {
  std::vector<std::string> out;
  for (const auto& t : set) out.push_back(t.word);
  return out;
}

mea::BeliefSet keep_words(const mea::BeliefSet& set, const std::vector<std::string>& kept) {
  std::set<std::string> keep(kept.begin(), kept.end());
  mea::BeliefSet out;
  for (const auto& t : set)
    if (keep.count(t.word)) out.insert(t);
  return out;
}

int cmd_run(const std::string& reviews_path, const std::string& format, const std::string& parses_path,
            const std::string& lexicon_path, const std::string& graph_path, const ClassifierFlags& cf,
            const mea::RunConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  auto reviews = mea::ingest_reviews(reviews_path, *mea::review_format_from_string(format));
  auto parses = mea::read_parses(parses_path);
  auto lex = mea::load_lexicon_file(lexicon_path);
  mea::NatureGraph graph = graph_path.empty() ? mea::default_graph() : mea::load_graph_file(graph_path);
  auto client = make_client(cf);

  auto result = mea::run_pipeline(reviews, parses, graph, lex, *client, cfg);
  for (const auto& w : client->warnings()) std::cerr << "warning: " << w << '\n';
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& f : result.failures) std::cerr << "quarantined " << f.review_id << ": " << f.reason << '\n';

  const auto& s = result.stats;
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  std::cout << "reviews " << s.total_reviews << ", with events " << s.reviews_with_events << ", valid "
            << s.valid_dags << ", both needs " << s.invalid_both_needs << ", no need " << s.invalid_no_need
            << ", failed " << s.failed_reviews << " (" << ms.count() << " ms)\n";
  return result.exit_code();
}

int cmd_compile(const std::string& wordnet, const std::string& senti, const std::string& emotions,
                const std::string& exclusions, bool llm_filter, const ClassifierFlags& cf, const std::string& out) {
  auto taxonomy = with_file(wordnet, mea::parse_taxonomy);
  auto food = mea::compile_food_lexicon(taxonomy, read_word_list(exclusions));
  auto feelings = mea::compile_feeling_lexicon(with_file(senti, mea::parse_sense_dump));
  auto emotion = mea::compile_emotion_lexicon(with_file(emotions, mea::parse_emotion_file));

  std::unique_ptr<mea::LlmClient> client;
  if (llm_filter) {
    client = make_client(cf);
    auto feeling_tmpl = client->prompt(mea::TemplateName::filter_feeling_neg);
    auto emotion_tmpl = client->prompt(mea::TemplateName::filter_emotion);
    if (!feelings.neg.empty())
      feelings.neg = keep_words(feelings.neg, client->filter_candidates(words_of(feelings.neg), feeling_tmpl));
    if (!emotion.pos.empty())
      emotion.pos = keep_words(emotion.pos, client->filter_candidates(words_of(emotion.pos), emotion_tmpl));
    if (!emotion.neg.empty())
      emotion.neg = keep_words(emotion.neg, client->filter_candidates(words_of(emotion.neg), emotion_tmpl));
    for (const auto& w : client->warnings()) std::cerr << "warning: " << w << '\n';
  }

  mea::BeliefLexicon lex;
  for (const auto* set : {&food, &feelings.pos, &feelings.neg, &emotion.pos, &emotion.neg}) lex.insert_all(*set);
  std::ofstream file(out, std::ios::binary);
  if (!file) throw mea::InputError("cannot write " + out);
  mea::serialize(file, lex);
  std::cout << "food " << food.size() << ", feeling_pos " << feelings.pos.size() << ", feeling_neg "
            << feelings.neg.size() << ", emo_pos " << emotion.pos.size() << ", emo_neg " << emotion.neg.size()
            << " -> " << out << '\n';
  return 0;
}

int cmd_sample(const std::string& index, std::size_t n, std::uint64_t seed, const std::string& out) {
  auto manifest = mea::sample_for_evaluation(mea::read_index(index), n, seed);
  auto text = mea::to_json(manifest).dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    std::ofstream file(out, std::ios::binary);
    if (!file) throw mea::InputError("cannot write " + out);
    file << text;
  }
  return 0;
}

int cmd_report(const std::string& manifest, bool as_json) {
  auto report = mea::report_errors(mea::load_manifest(manifest));
  if (as_json)
    std::cout << mea::to_json(report).dump(2) << '\n';
  else
    std::cout << mea::format_report(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MEA-DAG extraction over review corpora"};
  app.require_subcommand(1);

  std::string reviews, format = "snap", parses, lexicon, graph, out;
  ClassifierFlags cf;
  mea::RunConfig run_cfg;
  auto* run = app.add_subcommand("run", "extract MEA-DAGs from parsed reviews");
  run->add_option("--reviews", reviews, "review corpus")->required();
  run->add_option("--format", format, "snap or csv")->check(CLI::IsMember({"snap", "csv"}));
  run->add_option("--parses", parses, "CoNLL-U file or directory")->required();
  run->add_option("--lexicon", lexicon, "compiled belief lexicon")->required();
  run->add_option("--graph", graph, "Nature Design override");
  add_classifier_flags(run, cf);
  run->add_option("--out", run_cfg.out_dir, "output directory")->required();
  run->add_flag("--dot", run_cfg.write_dot, "also write Graphviz files");
  run->add_option("--workers", run_cfg.workers, "worker threads")->check(CLI::Range(1, 256));

  std::string wordnet, senti, emotions, exclusions;
  bool llm_filter = false;
  auto* compile = app.add_subcommand("compile-lexicon", "build the belief lexicon from lexical dumps");
  compile->add_option("--wordnet", wordnet, "noun taxonomy dump")->required();
  compile->add_option("--sentiwordnet", senti, "sense score dump")->required();
  compile->add_option("--emotions", emotions, "emotion word file")->required();
  compile->add_option("--exclusions", exclusions, "food words to leave out, one per line");
  compile->add_flag("--llm-filter", llm_filter, "filter negative feelings and emotions through the classifier");
  add_classifier_flags(compile, cf);
  compile->add_option("--out", out, "lexicon file")->required();

  std::string index;
  std::size_t n = 100;
  std::uint64_t seed = 0;
  auto* sample = app.add_subcommand("sample", "draw an evaluation manifest from valid MEA-DAGs");
  sample->add_option("--index", index, "run output directory or index.tsv")->required();
  sample->add_option("--n", n, "sample size");
  sample->add_option("--seed", seed, "random seed");
  sample->add_option("--out", out, "manifest path, - for stdout");

  std::string manifest;
  bool as_json = false;
  auto* report = app.add_subcommand("report", "tabulate annotated errors");
  report->add_option("--manifest", manifest, "annotated manifest")->required();
  report->add_flag("--json", as_json, "print JSON instead of the table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*run) return cmd_run(reviews, format, parses, lexicon, graph, cf, run_cfg);
    if (*compile) return cmd_compile(wordnet, senti, emotions, exclusions, llm_filter, cf, out);
    if (*sample) return cmd_sample(index, n, seed, out);
    if (*report) return cmd_report(manifest, as_json);
  } catch (const std::exception& e) {
    std::cerr << "mea: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
