#include "mea/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "mea/llm_client.hpp"
#include "mea/mea_dag.hpp"
#include "mea/text.hpp"

namespace fs = std::filesystem;

namespace mea {

using nlohmann::json;

// Ingestion -------------------------------------------------------------------

std::optional<ReviewFormat> review_format_from_string(std::string_view s) {
  if (s == "snap") return ReviewFormat::snap;
  if (s == "csv") return ReviewFormat::csv;
  return std::nullopt;
}

namespace {

void ingest_snap(std::istream& in, IngestResult& out) {
  std::size_t ordinal = 0;
  std::optional<std::string> review_text;
  bool in_block = false;
  auto flush = [&] {
    if (!in_block) return;
    auto id = std::to_string(++ordinal);
    if (!review_text)
      out.rejected.push_back({id, "missing review/text field"});
    else if (text::trim(*review_text).empty())
      out.rejected.push_back({id, "empty review text"});
    else
      out.records.push_back({id, std::string(text::trim(*review_text)), 0});
    review_text.reset();
    in_block = false;
  };
  std::string line;
  while (std::getline(in, line)) {
    text::chomp(line);
    if (text::trim(line).empty()) {
      flush();
      continue;
    }
    in_block = true;
    auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    if (text::trim(std::string_view(line).substr(0, colon)) == "review/text")
      review_text = std::string(text::trim(std::string_view(line).substr(colon + 1)));
  }
  flush();
}

// RFC 4180 rows; quoted fields may contain separators, quotes and newlines.
std::vector<std::vector<std::string>> read_csv_rows(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"': quoted = true; break;
      case ',': row.push_back(std::move(field)); field.clear(); break;
      case '\r': break;
      case '\n':
        row.push_back(std::move(field));
        field.clear();
        rows.push_back(std::move(row));
        row.clear();
        any = false;
        break;
      default: field.push_back(c);
    }
  }
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

void ingest_csv(std::istream& in, const std::string& source, IngestResult& out) {
  auto rows = read_csv_rows(in);
  if (rows.empty()) return;
  const auto& header = rows.front();
  auto col = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (text::trim(header[i]) == name) return i;
    return std::nullopt;
  };
  auto id_col = col("Id");
  auto text_col = col("Text");
  if (!id_col || !text_col) throw InputError(source + ": CSV header needs Id and Text columns");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && text::trim(row[0]).empty()) continue;
    std::string id = *id_col < row.size() ? std::string(text::trim(row[*id_col])) : "";
    if (id.empty()) id = "row" + std::to_string(r + 1);
    if (*text_col >= row.size()) {
      out.rejected.push_back({id, "missing Text field"});
      continue;
    }
    auto body = text::trim(row[*text_col]);
    if (body.empty()) {
      out.rejected.push_back({id, "empty review text"});
      continue;
    }
    out.records.push_back({id, std::string(body), 0});
  }
}

}  // namespace

IngestResult ingest_reviews(std::istream& in, ReviewFormat format, const std::string& source_name) {
  IngestResult out;
  if (format == ReviewFormat::snap)
    ingest_snap(in, out);
  else
    ingest_csv(in, source_name, out);
  std::set<std::string_view> ids;
  for (const auto& r : out.records)
    if (!ids.insert(r.review_id).second) throw InputError(source_name + ": duplicate review id " + r.review_id);
  return out;
}

IngestResult ingest_reviews(const std::string& path, ReviewFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open review file " + path);
  return ingest_reviews(in, format, path);
}

ConlluDocument read_parses(const std::string& path) {
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file() && entry.path().extension() == ".conllu") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
  } else if (fs::is_regular_file(path)) {
    files.emplace_back(path);
  } else {
    throw InputError("parse path " + path + " does not exist");
  }
  ConlluDocument all;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw InputError("cannot open parse file " + f.string());
    auto doc = read_conllu(in, f.string());
    std::move(doc.sentences.begin(), doc.sentences.end(), std::back_inserter(all.sentences));
    std::move(doc.failures.begin(), doc.failures.end(), std::back_inserter(all.failures));
  }
  return all;
}

// Pipeline --------------------------------------------------------------------

void CorpusStats::merge(const CorpusStats& o) {
  total_reviews += o.total_reviews;
  failed_reviews += o.failed_reviews;
  reviews_with_events += o.reviews_with_events;
  valid_dags += o.valid_dags;
  invalid_both_needs += o.invalid_both_needs;
  invalid_no_need += o.invalid_no_need;
  for (const auto& [k, v] : o.pattern_counts) pattern_counts[k] += v;
  classifier_calls += o.classifier_calls;
  classifier_cache_hits += o.classifier_cache_hits;
}

json to_json(const CorpusStats& s) {
  return {{"total_reviews", s.total_reviews},
          {"failed_reviews", s.failed_reviews},
          {"reviews_with_events", s.reviews_with_events},
          {"valid_dags", s.valid_dags},
          {"invalid_both_needs", s.invalid_both_needs},
          {"invalid_no_need", s.invalid_no_need},
          {"pattern_counts", s.pattern_counts},
          {"classifier_calls", s.classifier_calls},
          {"classifier_cache_hits", s.classifier_cache_hits}};
}

std::string review_file_stem(std::string_view review_id) {
  std::string out;
  for (char c : review_id) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-';
    out.push_back(ok ? c : '_');
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

namespace {

// Counts classifier calls made on behalf of one worker.
class CountingClassifier final : public ActionClassifier {
 public:
  explicit CountingClassifier(ActionClassifier& inner) : inner_(inner) {}
  ActionClass classify(std::string_view text) override {
    ++calls;
    return inner_.classify(text);
  }
  std::size_t calls = 0;

 private:
  ActionClassifier& inner_;
};

struct ReviewOutcome {
  std::optional<IndexEntry> index;
  std::optional<std::string> failure;
  std::vector<std::string> warnings;
};

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << contents;
}

}  // namespace

RunResult run_pipeline(const IngestResult& reviews, const ConlluDocument& parses, const NatureGraph& g,
                       const BeliefLexicon& lex, ActionClassifier& classifier, const RunConfig& cfg) {
  const fs::path out_dir(cfg.out_dir);
  fs::create_directories(out_dir / "dags");

  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < reviews.records.size(); ++i) position[reviews.records[i].review_id] = i;

  std::vector<std::vector<ParsedSentence>> sentences(reviews.records.size());
  std::vector<std::vector<std::string>> parse_errors(reviews.records.size());
  std::vector<ReviewFailure> orphan_failures;
  std::set<std::string> orphan_ids;
  for (const auto& s : parses.sentences) {
    auto it = position.find(s.review_id);
    if (it == position.end()) {
      if (orphan_ids.insert(s.review_id).second)
        orphan_failures.push_back({s.review_id, "parse refers to a review that was not ingested"});
      continue;
    }
    sentences[it->second].push_back(s);
  }
  for (const auto& f : parses.failures) {
    auto it = position.find(f.review_id);
    std::string where = f.source + ":" + std::to_string(f.line) + ": " + f.message;
    if (it == position.end()) {
      orphan_failures.push_back({f.review_id.empty() ? "?" : f.review_id, "malformed parse: " + where});
      continue;
    }
    parse_errors[it->second].push_back(where);
  }

  const std::size_t n = reviews.records.size();
  std::vector<ReviewOutcome> outcomes(n);
  const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.workers, std::max<std::size_t>(n, 1)));
  std::vector<CorpusStats> partial(workers);
  std::atomic<std::size_t> next{0};

  auto work = [&](std::size_t worker) {
    auto& stats = partial[worker];
    CountingClassifier counted(classifier);
    for (std::size_t i = next++; i < n; i = next++) {
      const auto& review = reviews.records[i];
      auto& outcome = outcomes[i];
      if (!parse_errors[i].empty()) {
        outcome.failure = "malformed parse: " + parse_errors[i].front();
        continue;
      }
      try {
        ActionLinkOptions options;
        options.on_parse_error = [&](const Event& e, const ResponseParseError& err) {
          outcome.warnings.push_back(review.review_id + ": skipped action event '" + e.text + "': " + err.what());
        };
        auto dag = build_mea_dag(review.review_id, sentences[i], g, lex, counted, options);
        if (dag.events.empty()) continue;
        const auto stem = review_file_stem(review.review_id);
        write_file(out_dir / "dags" / (stem + ".json"), to_json_string(dag));
        if (cfg.write_dot) write_file(out_dir / "dags" / (stem + ".dot"), to_dot(dag));

        ++stats.reviews_with_events;
        bool pos = dag.activated.contains(NodeId::need_food_pos);
        bool neg = dag.activated.contains(NodeId::need_food_neg);
        if (dag.valid) ++stats.valid_dags;
        else if (pos && neg) ++stats.invalid_both_needs;
        else ++stats.invalid_no_need;
        for (const auto& e : dag.events) ++stats.pattern_counts[std::string(to_string(e.pattern_id))];
        outcome.index = IndexEntry{review.review_id, static_cast<int>(sentences[i].size()),
                                   static_cast<int>(dag.events.size()), dag.valid};
      } catch (const std::exception& e) {
        outcome.failure = e.what();
      }
    }
    stats.classifier_calls += counted.calls;
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  RunResult result;
  for (const auto& p : partial) result.stats.merge(p);
  result.stats.total_reviews = reviews.records.size() + reviews.rejected.size();
  if (auto* client = dynamic_cast<LlmClient*>(&classifier)) result.stats.classifier_cache_hits = client->stats().cache_hits;

  for (const auto& r : reviews.rejected) result.failures.push_back({r.review_id, r.reason});
  for (std::size_t i = 0; i < n; ++i) {
    auto& o = outcomes[i];
    if (o.failure) result.failures.push_back({reviews.records[i].review_id, *o.failure});
    if (o.index) result.index.push_back(*o.index);
    std::move(o.warnings.begin(), o.warnings.end(), std::back_inserter(result.warnings));
  }
  for (auto& f : orphan_failures) result.failures.push_back(std::move(f));
  result.stats.failed_reviews = result.failures.size();

  write_file(out_dir / "stats.json", to_json(result.stats).dump(2) + "\n");
  {
    std::ostringstream idx;
    write_index(idx, result.index);
    write_file(out_dir / "index.tsv", idx.str());
  }
  {
    std::ostringstream log;
    for (const auto& f : result.failures) log << f.review_id << '\t' << f.reason << '\n';
    for (const auto& w : result.warnings) log << "warning\t" << w << '\n';
    write_file(out_dir / "failures.log", log.str());
  }
  return result;
}

void write_index(std::ostream& out, const std::vector<IndexEntry>& index) {
  out << "# review_id\tsentence_count\tevent_count\tvalid\n";
  for (const auto& e : index)
    out << e.review_id << '\t' << e.sentence_count << '\t' << e.event_count << '\t' << (e.valid ? 1 : 0) << '\n';
}

std::vector<IndexEntry> read_index(const std::string& path) {
  fs::path p(path);
  if (fs::is_directory(p)) p /= "index.tsv";
  std::ifstream in(p);
  if (!in) throw InputError("cannot open index " + p.string());
  std::vector<IndexEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    text::chomp(line);
    if (line.empty() || line.front() == '#') continue;
    auto f = text::split(line, '\t');
    if (f.size() != 4 || (f[3] != "0" && f[3] != "1")) throw ParseError(p.string(), line_no, "malformed index row");
    try {
      out.push_back({f[0], std::stoi(f[1]), std::stoi(f[2]), f[3] == "1"});
    } catch (const std::logic_error&) {
      throw ParseError(p.string(), line_no, "malformed index row");
    }
  }
  return out;
}

// Evaluation ------------------------------------------------------------------

std::string_view to_string(ErrorType t) {
  switch (t) {
    case ErrorType::EventLinkingLoss: return "EventLinkingLoss";
    case ErrorType::AserExtractionLoss: return "AserExtractionLoss";
    case ErrorType::WrongSubsequentAction: return "WrongSubsequentAction";
    case ErrorType::WordSenseAmbiguity: return "WordSenseAmbiguity";
    case ErrorType::WrongBelief: return "WrongBelief";
    case ErrorType::WrongPastAction: return "WrongPastAction";
    case ErrorType::NegationLoss: return "NegationLoss";
  }
  return "?";
}

std::string_view display_name(ErrorType t) {
  switch (t) {
    case ErrorType::EventLinkingLoss: return "Event Linking Loss";
    case ErrorType::AserExtractionLoss: return "ASER Extraction Loss";
    case ErrorType::WrongSubsequentAction: return "Wrong Subsequent Action";
    case ErrorType::WordSenseAmbiguity: return "Word Sense Ambiguity";
    case ErrorType::WrongBelief: return "Wrong Belief";
    case ErrorType::WrongPastAction: return "Wrong Past Action";
    case ErrorType::NegationLoss: return "Negation Loss";
  }
  return "?";
}

std::optional<ErrorType> error_type_from_string(std::string_view s) {
  std::string squashed;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c)) && c != '_')
      squashed.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  for (auto t : kAllErrorTypes)
    if (text::to_lower(to_string(t)) == squashed) return t;
  return std::nullopt;
}

Split split_for(int sentence_count) {
  return sentence_count < kLongReviewSentences ? Split::short_review : Split::long_review;
}

std::string_view to_string(Split s) { return s == Split::short_review ? "short" : "long"; }

Manifest sample_for_evaluation(const std::vector<IndexEntry>& index, std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < index.size(); ++i)
    if (index[i].valid) pool.push_back(i);
  if (n > pool.size())
    throw InputError("cannot sample " + std::to_string(n) + " of " + std::to_string(pool.size()) + " valid MEA-DAGs");

  // Partial Fisher-Yates with an explicit bounded draw so the sample does
  // not depend on the standard library's distribution implementation.
  std::mt19937_64 rng(seed);
  auto below = [&](std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do x = rng(); while (x >= limit);
    return x % bound;
  };
  for (std::size_t i = 0; i < n; ++i) {
    auto j = i + static_cast<std::size_t>(below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n);
  std::sort(pool.begin(), pool.end());

  Manifest m;
  m.seed = seed;
  for (auto i : pool) {
    const auto& e = index[i];
    m.entries.push_back({e.review_id, e.sentence_count, split_for(e.sentence_count), {}});
  }
  return m;
}

json to_json(const Manifest& m) {
  json entries = json::array();
  for (const auto& e : m.entries) {
    json ann = json::array();
    for (const auto& a : e.annotations)
      ann.push_back({{"error_type", std::string(to_string(a.error_type))}, {"note", a.note}});
    if (ann.empty()) ann.push_back({{"error_type", ""}, {"note", ""}});
    entries.push_back({{"review_id", e.review_id},
                       {"sentence_count", e.sentence_count},
                       {"split", std::string(to_string(e.split))},
                       {"annotations", std::move(ann)}});
  }
  return {{"seed", m.seed}, {"entries", std::move(entries)}};
}

Manifest manifest_from_json(const json& doc) {
  Manifest m;
  m.seed = doc.value("seed", std::uint64_t{0});
  std::vector<std::string> offenders;
  for (const auto& je : doc.at("entries")) {
    ManifestEntry e;
    e.review_id = je.at("review_id").get<std::string>();
    e.sentence_count = je.at("sentence_count").get<int>();
    e.split = split_for(e.sentence_count);
    for (const auto& ja : je.value("annotations", json::array())) {
      auto label = ja.value("error_type", std::string{});
      if (text::trim(label).empty()) continue;
      auto type = error_type_from_string(label);
      if (!type) {
        offenders.push_back(e.review_id + ": " + label);
        continue;
      }
      e.annotations.push_back({e.review_id, *type, ja.value("note", std::string{})});
    }
    m.entries.push_back(std::move(e));
  }
  if (!offenders.empty()) {
    std::string msg = "unknown error types:";
    for (const auto& o : offenders) msg += " [" + o + "]";
    throw ValidationError(msg, std::move(offenders));
  }
  return m;
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open manifest " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
  return manifest_from_json(doc);
}

ErrorReport report_errors(const Manifest& m) {
  ErrorReport r;
  for (const auto& e : m.entries) {
    auto& split = e.split == Split::short_review ? r.short_test : r.long_test;
    for (auto* s : {&r.total, &split}) {
      ++s->samples;
      if (!e.annotations.empty()) ++s->incorrect;
      for (const auto& a : e.annotations) {
        ++s->errors[static_cast<std::size_t>(a.error_type)];
        ++s->total_errors;
      }
    }
  }
  return r;
}

std::string percent(std::size_t count, std::size_t whole) {
  if (whole == 0) return "0.0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * static_cast<double>(count) / static_cast<double>(whole));
  return buf;
}

std::string format_report(const ErrorReport& r) {
  std::ostringstream out;
  char line[160];
  auto row = [&](const char* group, std::string_view label, auto count_of, auto whole_of) {
    std::snprintf(line, sizeof line, "%-7s %-24.*s", group, static_cast<int>(label.size()), label.data());
    out << line;
    for (const auto* s : {&r.total, &r.short_test, &r.long_test}) {
      std::snprintf(line, sizeof line, " %7zu %7s%%", count_of(*s), percent(count_of(*s), whole_of(*s)).c_str());
      out << line;
    }
    out << '\n';
  };
  std::snprintf(line, sizeof line, "%-32s%17s%17s%17s\n", "", "Test", "Short-Test", "Long-Test");
  out << line;
  std::snprintf(line, sizeof line, "%-32s %7s %8s %7s %8s %7s %8s\n", "", "Count", "Percent", "Count", "Percent",
                "Count", "Percent");
  out << line;
  auto samples = [](const SplitReport& s) { return s.samples; };
  auto errors = [](const SplitReport& s) { return s.total_errors; };
  row("Sample", "Incorrect", [](const SplitReport& s) { return s.incorrect; }, samples);
  row("", "Total", samples, samples);
  for (auto t : kAllErrorTypes) {
    auto i = static_cast<std::size_t>(t);
    row(t == kAllErrorTypes.front() ? "Error" : "", display_name(t),
        [i](const SplitReport& s) { return s.errors[i]; }, errors);
  }
  row("", "Total", errors, errors);
  return out.str();
}

json to_json(const ErrorReport& r) {
  auto split = [](const SplitReport& s) {
    json errors = json::object();
    for (auto t : kAllErrorTypes) {
      auto c = s.errors[static_cast<std::size_t>(t)];
      errors[std::string(to_string(t))] = {{"count", c}, {"percent", percent(c, s.total_errors)}};
    }
    return json{{"samples", s.samples},
                {"incorrect", s.incorrect},
                {"incorrect_percent", percent(s.incorrect, s.samples)},
                {"total_errors", s.total_errors},
                {"errors", std::move(errors)}};
  };
  return {{"test", split(r.total)}, {"short_test", split(r.short_test)}, {"long_test", split(r.long_test)}};
}

}  // namespace mea
