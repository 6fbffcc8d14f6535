#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "mea/action_classifier.hpp"

namespace mea {

enum class TemplateName { filter_feeling_neg, filter_emotion, classify_action };

std::string_view to_string(TemplateName t);
std::optional<TemplateName> template_from_string(std::string_view s);

struct PromptTemplate {
  TemplateName name;
  std::string text;  // exactly one {input} slot
  std::vector<std::string> expected_labels;
  std::string keep_label;  // filter templates only

  static PromptTemplate builtin(TemplateName name);
  // Replaces the built-in text with the contents of a file. Throws
  // InputError unless the text holds exactly one slot.
  static PromptTemplate from_file(TemplateName name, const std::string& path);

  std::string render(std::string_view input) const;
  // Canonical label for a raw answer, matched exactly after trimming and
  // case folding.
  std::optional<std::string> parse_label(std::string_view raw) const;
};

enum class ClientMode { live, replay, heuristic };

std::string_view to_string(ClientMode m);
std::optional<ClientMode> client_mode_from_string(std::string_view s);

struct ClientConfig {
  std::string endpoint;  // full chat-completions URL
  std::string api_key;
  std::string model = "glm-4";
  double temperature = 0.0;
  std::chrono::milliseconds timeout{30000};
  int retries = 3;
  ClientMode mode = ClientMode::heuristic;
  std::string replay_file;
  std::string cache_file;  // live mode only; empty keeps the cache in memory
  std::string template_dir;  // optional <name>.txt overrides
  std::size_t max_in_flight = 4;

  // Endpoint, key and model from MEA_LLM_ENDPOINT, MEA_LLM_API_KEY and
  // MEA_LLM_MODEL, when set.
  void apply_environment();
  // Throws InputError when the mode's requirements are not met.
  void validate() const;
};

struct CacheEntry {
  std::string key;
  std::string template_name;
  std::string input;
  std::string model;
  std::string raw_response;
  std::string parsed_label;
  std::string timestamp;
};

// Stable across runs and platforms: SHA-256 over the three fields.
std::string cache_key(TemplateName t, std::string_view input, std::string_view model);

// Thread-safe key -> entry map backed by an optional append-only JSONL log.
class ResponseCache {
 public:
  ResponseCache() = default;
  // Loads existing records; later writes append to the same file when
  // writable is set.
  void open(const std::string& path, bool writable);

  std::optional<CacheEntry> find(const std::string& key) const;
  void insert(CacheEntry entry);
  std::size_t size() const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, CacheEntry> entries_;
  std::string path_;
  bool writable_ = false;
};

CacheEntry parse_cache_line(std::string_view line);
std::string format_cache_line(const CacheEntry& e);

// Request sink for live mode. Returns the response body; throws
// TransportError on failure.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string post(const std::string& url, const std::string& body,
                           const std::vector<std::pair<std::string, std::string>>& headers,
                           std::chrono::milliseconds timeout) = 0;
};

std::unique_ptr<Transport> make_http_transport();

struct ClientStats {
  std::size_t calls = 0;
  std::size_t cache_hits = 0;
  std::size_t live_requests = 0;
};

// Keyword classifier over verb exemplars; Physical when nothing matches.
ActionClass heuristic_classifier(std::string_view text);

class HeuristicClassifier final : public ActionClassifier {
 public:
  ActionClass classify(std::string_view text) override { return heuristic_classifier(text); }
};

// Chat-completion client for lexicon filtering and action classification.
class LlmClient final : public ActionClassifier {
 public:
  explicit LlmClient(ClientConfig cfg, std::shared_ptr<Transport> transport = nullptr);

  ActionClass classify(std::string_view text) override;
  ActionClass classify_action_event(std::string_view text) { return classify(text); }

  // Words whose answer is the template's keep label, in input order. Words
  // with unparseable answers are kept and a warning recorded. Throws
  // std::invalid_argument on an empty list.
  std::vector<std::string> filter_candidates(const std::vector<std::string>& words,
                                             const PromptTemplate& tmpl);

  // Label for one rendered prompt, through cache, replay or network.
  std::string ask(const PromptTemplate& tmpl, std::string_view input);

  const PromptTemplate& prompt(TemplateName name) const;
  ClientStats stats() const;
  std::vector<std::string> warnings() const;
  const ClientConfig& config() const { return cfg_; }

 private:
  std::string fetch_live(const PromptTemplate& tmpl, std::string_view input);

  ClientConfig cfg_;
  std::shared_ptr<Transport> transport_;
  std::map<TemplateName, PromptTemplate> templates_;
  ResponseCache cache_;
  ResponseCache replay_;
  std::counting_semaphore<64> in_flight_;
  std::atomic<std::size_t> calls_{0};
  std::atomic<std::size_t> cache_hits_{0};
  std::atomic<std::size_t> live_requests_{0};
  mutable std::mutex warnings_mutex_;
  std::vector<std::string> warnings_;
};

}  // namespace mea
