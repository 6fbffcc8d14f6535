#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "mea/llm_client.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "mea/text.hpp"

namespace mea {

using nlohmann::json;

namespace {

constexpr std::string_view kSlot = "{input}";

const char* const kClassifyText =
    "Classify the action in the event below as exactly one of three types.\n"
    "Mental: happens inside a person and cannot be seen (analyze, versify).\n"
    "Physical: happens outside a person and can be seen (wash, peel).\n"
    "Social: directed at other people (denounce, rent).\n"
    "Reply with one word: Mental, Physical or Social.\n"
    "Event: {input}";

const char* const kFeelingText =
    "Does the adjective below describe an unpleasant experience of food or of\n"
    "preparing it (for example its taste, texture or effort)?\n"
    "Reply with one word: Yes or No.\n"
    "Adjective: {input}";

const char* const kEmotionText =
    "Is the word below normally used to express a human emotion?\n"
    "Reply with one word: Yes or No.\n"
    "Word: {input}";

std::size_t count_slots(std::string_view text) {
  std::size_t n = 0;
  for (auto pos = text.find(kSlot); pos != std::string_view::npos; pos = text.find(kSlot, pos + 1)) ++n;
  return n;
}

std::string now_iso8601() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

const std::map<std::string_view, ActionClass>& verb_table() {
  static const std::map<std::string_view, ActionClass> table = [] {
    std::map<std::string_view, ActionClass> t;
    for (auto w : {"analyze", "analyse", "versify", "think", "consider", "know", "believe", "remember",
                   "forget", "wonder", "decide", "guess", "imagine", "understand", "learn", "study",
                   "compare", "doubt", "notice", "realize", "figure", "plan", "evaluate", "judge",
                   "research", "read", "expect", "hope"})
      t.emplace(w, ActionClass::Mental);
    for (auto w : {"denounce", "rent", "recommend", "tell", "share", "give", "send", "gift",
                   "complain", "ask", "suggest", "buy", "order", "purchase", "sell", "pay", "return",
                   "review", "rate", "thank", "warn", "invite", "serve", "feed", "introduce",
                   "contact", "call", "email", "lend"})
      t.emplace(w, ActionClass::Social);
    for (auto w : {"wash", "peel", "cook", "eat", "drink", "slice", "push", "freeze", "bake", "boil",
                   "chew", "pour", "mix", "go", "open", "taste", "make", "stir", "cut", "heat"})
      t.emplace(w, ActionClass::Physical);
    return t;
  }();
  return table;
}

// Crude inflection stripping so "recommended" or "washes" hit the table.
std::optional<ActionClass> lookup_verb(const std::string& word) {
  const auto& table = verb_table();
  if (auto it = table.find(word); it != table.end()) return it->second;
  for (std::string_view suffix : {"ing", "ed", "es", "s", "d"}) {
    if (word.size() > suffix.size() + 2 && word.ends_with(suffix)) {
      auto stem = word.substr(0, word.size() - suffix.size());
      if (auto it = table.find(stem); it != table.end()) return it->second;
      if (auto it = table.find(stem + "e"); it != table.end()) return it->second;
    }
  }
  return std::nullopt;
}

class HttpTransport final : public Transport {
 public:
  std::string post(const std::string& url, const std::string& body,
                   const std::vector<std::pair<std::string, std::string>>& headers,
                   std::chrono::milliseconds timeout) override {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw TransportError("endpoint must be an absolute URL: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = client.Post(path, h, body, "application/json");
    if (!res) throw TransportError("request to " + url + " failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
      throw TransportError("request to " + url + " returned HTTP " + std::to_string(res->status));
    return res->body;
  }
};

}  // namespace

std::string_view to_string(TemplateName t) {
  switch (t) {
    case TemplateName::filter_feeling_neg: return "filter_feeling_neg";
    case TemplateName::filter_emotion: return "filter_emotion";
    case TemplateName::classify_action: return "classify_action";
  }
  return "?";
}

std::optional<TemplateName> template_from_string(std::string_view s) {
  for (auto t : {TemplateName::filter_feeling_neg, TemplateName::filter_emotion, TemplateName::classify_action})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

PromptTemplate PromptTemplate::builtin(TemplateName name) {
  switch (name) {
    case TemplateName::classify_action:
      return {name, kClassifyText, {"Mental", "Physical", "Social"}, ""};
    case TemplateName::filter_feeling_neg:
      return {name, kFeelingText, {"Yes", "No"}, "Yes"};
    case TemplateName::filter_emotion:
      return {name, kEmotionText, {"Yes", "No"}, "Yes"};
  }
  throw std::logic_error("unknown template");
}

PromptTemplate PromptTemplate::from_file(TemplateName name, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open template " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  auto t = builtin(name);
  t.text = buf.str();
  while (!t.text.empty() && (t.text.back() == '\n' || t.text.back() == '\r')) t.text.pop_back();
  if (count_slots(t.text) != 1) throw InputError("template " + path + " must contain exactly one {input} slot");
  return t;
}

std::string PromptTemplate::render(std::string_view input) const {
  std::string out = text;
  auto pos = out.find(kSlot);
  if (pos != std::string::npos) out.replace(pos, kSlot.size(), input);
  return out;
}

std::optional<std::string> PromptTemplate::parse_label(std::string_view raw) const {
  auto folded = text::to_lower(text::trim(raw));
  for (const auto& label : expected_labels)
    if (text::to_lower(label) == folded) return label;
  return std::nullopt;
}

std::string_view to_string(ClientMode m) {
  switch (m) {
    case ClientMode::live: return "live";
    case ClientMode::replay: return "replay";
    case ClientMode::heuristic: return "heuristic";
  }
  return "?";
}

std::optional<ClientMode> client_mode_from_string(std::string_view s) {
  for (auto m : {ClientMode::live, ClientMode::replay, ClientMode::heuristic})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

void ClientConfig::apply_environment() {
  if (const char* v = std::getenv("MEA_LLM_ENDPOINT"); v && *v) endpoint = v;
  if (const char* v = std::getenv("MEA_LLM_API_KEY"); v && *v) api_key = v;
  if (const char* v = std::getenv("MEA_LLM_MODEL"); v && *v) model = v;
}

void ClientConfig::validate() const {
  if (mode == ClientMode::replay && replay_file.empty())
    throw InputError("replay mode needs a replay fixture file");
  if (mode == ClientMode::live) {
    if (endpoint.empty()) throw InputError("live mode needs an endpoint (MEA_LLM_ENDPOINT)");
    if (temperature != 0.0) throw InputError("live mode runs at temperature 0");
  }
  if (model.empty()) throw InputError("model id must not be empty");
  if (max_in_flight == 0 || max_in_flight > 64) throw InputError("max_in_flight must be in [1, 64]");
  if (retries < 0) throw InputError("retries must be non-negative");
}

std::string cache_key(TemplateName t, std::string_view input, std::string_view model) {
  std::string material;
  material += to_string(t);
  material += '\x1f';
  material += input;
  material += '\x1f';
  material += model;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(material.data(), material.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

CacheEntry parse_cache_line(std::string_view line) {
  auto j = json::parse(line);
  CacheEntry e;
  e.template_name = j.at("template").get<std::string>();
  e.input = j.at("input").get<std::string>();
  e.model = j.at("model").get<std::string>();
  e.raw_response = j.at("raw_response").get<std::string>();
  e.parsed_label = j.value("parsed_label", "");
  e.timestamp = j.value("timestamp", "");
  auto tmpl = template_from_string(e.template_name);
  if (!tmpl) throw InputError("unknown template '" + e.template_name + "' in cache record");
  auto expected = cache_key(*tmpl, e.input, e.model);
  e.key = j.value("key", expected);
  if (e.key != expected) throw InputError("cache record key does not match its fields");
  if (!e.parsed_label.empty() && !PromptTemplate::builtin(*tmpl).parse_label(e.parsed_label))
    throw InputError("cache record label '" + e.parsed_label + "' is not a label of " + e.template_name);
  return e;
}

std::string format_cache_line(const CacheEntry& e) {
  json j = {{"key", e.key},
            {"template", e.template_name},
            {"input", e.input},
            {"model", e.model},
            {"raw_response", e.raw_response},
            {"parsed_label", e.parsed_label},
            {"timestamp", e.timestamp}};
  return j.dump();
}

void ResponseCache::open(const std::string& path, bool writable) {
  std::unique_lock lock(mutex_);
  path_ = path;
  writable_ = writable;
  std::ifstream in(path);
  if (!in) {
    if (!writable) throw InputError("cannot open replay file " + path);
    return;
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    text::chomp(line);
    if (text::trim(line).empty()) continue;
    try {
      auto e = parse_cache_line(line);
      entries_.insert_or_assign(e.key, std::move(e));
    } catch (const std::exception& ex) {
      throw ParseError(path, line_no, ex.what());
    }
  }
}

std::optional<CacheEntry> ResponseCache::find(const std::string& key) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::insert(CacheEntry entry) {
  std::unique_lock lock(mutex_);
  if (writable_ && !path_.empty()) {
    std::ofstream out(path_, std::ios::app);
    out << format_cache_line(entry) << '\n';
  }
  entries_.insert_or_assign(entry.key, std::move(entry));
}

std::size_t ResponseCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::unique_ptr<Transport> make_http_transport() { return std::make_unique<HttpTransport>(); }

ActionClass heuristic_classifier(std::string_view text) {
  std::string word;
  auto flush = [&]() -> std::optional<ActionClass> {
    if (word.empty()) return std::nullopt;
    auto hit = lookup_verb(word);
    word.clear();
    return hit;
  };
  for (char c : text) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (auto hit = flush()) {
      return *hit;
    }
  }
  if (auto hit = flush()) return *hit;
  return ActionClass::Physical;
}

LlmClient::LlmClient(ClientConfig cfg, std::shared_ptr<Transport> transport)
    : cfg_(std::move(cfg)),
      transport_(std::move(transport)),
      in_flight_(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(cfg_.max_in_flight, 1, 64))) {
  cfg_.validate();
  for (auto name : {TemplateName::filter_feeling_neg, TemplateName::filter_emotion, TemplateName::classify_action}) {
    auto tmpl = PromptTemplate::builtin(name);
    if (!cfg_.template_dir.empty()) {
      auto path = cfg_.template_dir + "/" + std::string(to_string(name)) + ".txt";
      if (std::ifstream(path)) tmpl = PromptTemplate::from_file(name, path);
    }
    templates_.emplace(name, std::move(tmpl));
  }
  if (cfg_.mode == ClientMode::replay) replay_.open(cfg_.replay_file, false);
  if (cfg_.mode == ClientMode::live) {
    if (!cfg_.cache_file.empty()) cache_.open(cfg_.cache_file, true);
    if (!transport_) transport_ = make_http_transport();
  }
}

const PromptTemplate& LlmClient::prompt(TemplateName name) const { return templates_.at(name); }

std::string LlmClient::fetch_live(const PromptTemplate& tmpl, std::string_view input) {
  json body = {{"model", cfg_.model},
               {"temperature", cfg_.temperature},
               {"messages", json::array({{{"role", "user"}, {"content", tmpl.render(input)}}})}};
  std::vector<std::pair<std::string, std::string>> headers;
  if (!cfg_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + cfg_.api_key);

  std::string last_error;
  for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(200 * attempt));
    std::string response;
    {
      in_flight_.acquire();
      struct Release {
        std::counting_semaphore<64>& s;
        ~Release() { s.release(); }
      } release{in_flight_};
      ++live_requests_;
      try {
        response = transport_->post(cfg_.endpoint, body.dump(), headers, cfg_.timeout);
      } catch (const TransportError& e) {
        last_error = e.what();
        continue;
      }
    }
    json doc = json::parse(response, nullptr, false);
    if (doc.is_discarded() || !doc.contains("choices") || doc["choices"].empty())
      throw ResponseParseError("malformed chat-completion response", response);
    const auto& message = doc["choices"][0]["message"];
    if (!message.contains("content") || !message["content"].is_string())
      throw ResponseParseError("chat-completion response has no message content", response);
    return message["content"].get<std::string>();
  }
  throw TransportError("giving up after " + std::to_string(cfg_.retries + 1) + " attempts: " + last_error);
}

std::string LlmClient::ask(const PromptTemplate& tmpl, std::string_view input) {
  ++calls_;
  const auto key = cache_key(tmpl.name, input, cfg_.model);

  if (cfg_.mode == ClientMode::replay) {
    auto hit = replay_.find(key);
    if (!hit)
      throw TransportError("no replay record for " + std::string(to_string(tmpl.name)) + " '" +
                           std::string(input) + "'");
    ++cache_hits_;
    auto label = tmpl.parse_label(hit->raw_response);
    if (!label) throw ResponseParseError("unexpected answer '" + hit->raw_response + "'", hit->raw_response);
    return *label;
  }

  if (auto hit = cache_.find(key)) {
    ++cache_hits_;
    return hit->parsed_label;
  }
  auto raw = fetch_live(tmpl, input);
  auto label = tmpl.parse_label(raw);
  if (!label) throw ResponseParseError("unexpected answer '" + raw + "'", raw);
  cache_.insert({key, std::string(to_string(tmpl.name)), std::string(input), cfg_.model, raw, *label,
                 now_iso8601()});
  return *label;
}

ActionClass LlmClient::classify(std::string_view text) {
  if (text::trim(text).empty()) throw std::invalid_argument("cannot classify an empty event");
  if (cfg_.mode == ClientMode::heuristic) {
    ++calls_;
    return heuristic_classifier(text);
  }
  auto label = ask(prompt(TemplateName::classify_action), text);
  return *action_class_from_string(label);
}

std::vector<std::string> LlmClient::filter_candidates(const std::vector<std::string>& words,
                                                      const PromptTemplate& tmpl) {
  if (words.empty()) throw std::invalid_argument("filter_candidates needs at least one word");
  if (cfg_.mode == ClientMode::heuristic) {
    std::lock_guard lock(warnings_mutex_);
    warnings_.push_back("heuristic mode keeps all " + std::to_string(words.size()) + " " +
                        std::string(to_string(tmpl.name)) + " candidates");
    return words;
  }
  std::vector<std::string> kept;
  for (const auto& w : words) {
    try {
      if (ask(tmpl, w) == tmpl.keep_label) kept.push_back(w);
    } catch (const ResponseParseError& e) {
      kept.push_back(w);
      std::lock_guard lock(warnings_mutex_);
      warnings_.push_back("kept '" + w + "': " + e.what());
    }
  }
  return kept;
}

ClientStats LlmClient::stats() const { return {calls_.load(), cache_hits_.load(), live_requests_.load()}; }

std::vector<std::string> LlmClient::warnings() const {
  std::lock_guard lock(warnings_mutex_);
  return warnings_;
}

}  // namespace mea
