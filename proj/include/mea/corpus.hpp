#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mea/action_classifier.hpp"
#include "mea/belief_lexicon.hpp"
#include "mea/conllu.hpp"
#include "mea/error.hpp"
#include "mea/nature_graph.hpp"

namespace mea {

// Reviews ---------------------------------------------------------------------

struct ReviewRecord {
  std::string review_id;
  std::string text;
  int sentence_count = 0;
};

enum class ReviewFormat { snap, csv };

std::optional<ReviewFormat> review_format_from_string(std::string_view s);

struct RejectedRecord {
  std::string review_id;
  std::string reason;
};

struct IngestResult {
  std::vector<ReviewRecord> records;
  std::vector<RejectedRecord> rejected;
};

// snap: blank-line separated blocks of `key: value` lines; the review id is
// the 1-based block position. csv: header with Id and Text columns, quoted
// fields may span lines. Records without text are rejected; duplicate ids
// raise InputError.
IngestResult ingest_reviews(std::istream& in, ReviewFormat format, const std::string& source_name);
// Throws InputError if the file cannot be read.
IngestResult ingest_reviews(const std::string& path, ReviewFormat format);

// Reads one .conllu file, or every *.conllu file of a directory in name
// order.
ConlluDocument read_parses(const std::string& path);

// Pipeline --------------------------------------------------------------------

struct CorpusStats {
  std::size_t total_reviews = 0;
  std::size_t failed_reviews = 0;
  std::size_t reviews_with_events = 0;
  std::size_t valid_dags = 0;
  std::size_t invalid_both_needs = 0;
  std::size_t invalid_no_need = 0;
  std::map<std::string, std::size_t> pattern_counts;
  std::size_t classifier_calls = 0;
  std::size_t classifier_cache_hits = 0;

  void merge(const CorpusStats& other);
  bool consistent() const {
    return valid_dags + invalid_both_needs + invalid_no_need == reviews_with_events;
  }
  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

nlohmann::json to_json(const CorpusStats& stats);

struct IndexEntry {
  std::string review_id;
  int sentence_count = 0;
  int event_count = 0;
  bool valid = false;
};

struct ReviewFailure {
  std::string review_id;
  std::string reason;
};

struct RunConfig {
  std::string out_dir;
  bool write_dot = false;
  std::size_t workers = 1;
};

struct RunResult {
  CorpusStats stats;
  std::vector<IndexEntry> index;  // reviews with at least one event
  std::vector<ReviewFailure> failures;
  std::vector<std::string> warnings;

  int exit_code() const { return failures.empty() ? 0 : 2; }
};

// File names ending up under out_dir/dags are derived from review ids with
// characters outside [A-Za-z0-9._-] replaced by '_'.
std::string review_file_stem(std::string_view review_id);

// Writes dags/<id>.json (and .dot) per review with events, stats.json,
// index.tsv and failures.log. A failing review is quarantined and counted,
// never aborting the batch.
RunResult run_pipeline(const IngestResult& reviews, const ConlluDocument& parses, const NatureGraph& g,
                       const BeliefLexicon& lex, ActionClassifier& classifier, const RunConfig& cfg);

void write_index(std::ostream& out, const std::vector<IndexEntry>& index);
// Accepts the run output directory or the index file itself.
std::vector<IndexEntry> read_index(const std::string& path);

// Evaluation ------------------------------------------------------------------

enum class ErrorType {
  EventLinkingLoss,
  AserExtractionLoss,
  WrongSubsequentAction,
  WordSenseAmbiguity,
  WrongBelief,
  WrongPastAction,
  NegationLoss,
};

inline constexpr std::array<ErrorType, 7> kAllErrorTypes = {
    ErrorType::EventLinkingLoss,   ErrorType::AserExtractionLoss, ErrorType::WrongSubsequentAction,
    ErrorType::WordSenseAmbiguity, ErrorType::WrongBelief,        ErrorType::WrongPastAction,
    ErrorType::NegationLoss,
};

std::string_view to_string(ErrorType t);
std::string_view display_name(ErrorType t);
// Accepts the identifier or the spaced display name, any case.
std::optional<ErrorType> error_type_from_string(std::string_view s);

struct ErrorAnnotation {
  std::string review_id;
  ErrorType error_type;
  std::string note;
};

enum class Split { short_review, long_review };

inline constexpr int kLongReviewSentences = 5;
Split split_for(int sentence_count);
std::string_view to_string(Split s);

struct ManifestEntry {
  std::string review_id;
  int sentence_count = 0;
  Split split = Split::short_review;
  std::vector<ErrorAnnotation> annotations;
};

struct Manifest {
  std::uint64_t seed = 0;
  std::vector<ManifestEntry> entries;
};

// Uniform sample of n valid reviews without replacement. Throws InputError
// when n exceeds the number of valid reviews.
Manifest sample_for_evaluation(const std::vector<IndexEntry>& index, std::size_t n, std::uint64_t seed);

// Manifest JSON. Annotation slots with an empty error_type are blanks.
nlohmann::json to_json(const Manifest& m);

class ValidationError : public InputError {
 public:
  ValidationError(const std::string& what, std::vector<std::string> offenders)
      : InputError(what), offenders_(std::move(offenders)) {}
  const std::vector<std::string>& offenders() const noexcept { return offenders_; }

 private:
  std::vector<std::string> offenders_;
};

// Throws ValidationError listing every unknown error_type label.
Manifest manifest_from_json(const nlohmann::json& doc);
Manifest load_manifest(const std::string& path);

struct SplitReport {
  std::size_t samples = 0;
  std::size_t incorrect = 0;
  std::array<std::size_t, 7> errors{};
  std::size_t total_errors = 0;
};

struct ErrorReport {
  SplitReport total;
  SplitReport short_test;
  SplitReport long_test;
};

ErrorReport report_errors(const Manifest& m);

// count/whole as a percentage with one decimal, "0.0" when whole is 0.
std::string percent(std::size_t count, std::size_t whole);

std::string format_report(const ErrorReport& r);
nlohmann::json to_json(const ErrorReport& r);

}  // namespace mea
