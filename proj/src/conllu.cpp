#include "mea/conllu.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>

#include "mea/error.hpp"
#include "mea/text.hpp"

namespace mea {

int ParsedSentence::root() const {
  for (const auto& t : tokens)
    if (t.head == 0) return t.index;
  return 0;
}

namespace {

struct BlockError {
  std::size_t line;
  std::string message;
};

std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Accumulates one blank-line separated block.
struct Block {
  std::size_t first_line = 0;
  std::optional<std::string> review_id;
  std::vector<Token> tokens;
  std::vector<std::size_t> token_lines;
  std::optional<BlockError> error;
  bool has_content = false;

  void fail(std::size_t line, std::string msg) {
    if (!error) error = BlockError{line, std::move(msg)};
  }
};

void add_row(Block& b, std::size_t line_no, const std::string& line) {
  auto f = text::split(line, '\t');
  if (f.size() != 10) {
    b.fail(line_no, "expected 10 tab-separated columns, got " + std::to_string(f.size()));
    return;
  }
  // Multi-word token ranges and empty nodes carry no basic dependency.
  if (f[0].find_first_of("-.") != std::string::npos) return;
  auto id = parse_int(f[0]);
  auto head = parse_int(f[6]);
  if (!id || *id < 1) return b.fail(line_no, "bad token id '" + f[0] + "'");
  if (!head || *head < 0) return b.fail(line_no, "bad head '" + f[6] + "'");
  Token t;
  t.index = *id;
  t.surface = f[1];
  t.lemma = text::to_lower(f[2] == "_" ? f[1] : f[2]);
  t.pos_tag = f[4] == "_" ? f[3] : f[4];
  t.head = *head;
  t.deprel = f[7];
  if (t.surface.empty()) return b.fail(line_no, "empty form");
  if (t.pos_tag.empty() || t.pos_tag == "_") return b.fail(line_no, "missing POS tag");
  if (t.head == t.index) return b.fail(line_no, "token is its own head");
  b.tokens.push_back(std::move(t));
  b.token_lines.push_back(line_no);
}

void check_tree(Block& b) {
  if (b.error) return;
  auto line_of = [&](std::size_t i) { return b.token_lines[i]; };
  int n = static_cast<int>(b.tokens.size());
  int roots = 0;
  for (std::size_t i = 0; i < b.tokens.size(); ++i) {
    const auto& t = b.tokens[i];
    if (t.index != static_cast<int>(i) + 1)
      return b.fail(line_of(i), "token ids must be contiguous from 1");
    if (t.head > n) return b.fail(line_of(i), "head " + std::to_string(t.head) + " is past the sentence end");
    if (t.head == 0) ++roots;
  }
  if (roots != 1) return b.fail(b.first_line, "expected exactly one root, found " + std::to_string(roots));
  // Every token must reach the root.
  for (const auto& t : b.tokens) {
    int cur = t.index;
    for (int steps = 0; cur != 0; ++steps) {
      if (steps > n) return b.fail(b.first_line, "head chain of token " + std::to_string(t.index) + " is cyclic");
      cur = b.tokens[static_cast<std::size_t>(cur - 1)].head;
    }
  }
}

}  // namespace

ConlluDocument read_conllu(std::istream& in, const std::string& source_name) {
  ConlluDocument doc;
  std::map<std::string, int> per_review;
  Block block;
  std::string line;
  std::size_t line_no = 0;

  auto flush = [&] {
    if (!block.has_content) return;
    if (!block.review_id) block.fail(block.first_line, "missing '# review_id = ...' comment");
    if (block.tokens.empty()) block.fail(block.first_line, "sentence has no tokens");
    check_tree(block);
    if (block.error) {
      if (block.review_id) ++per_review[*block.review_id];
      doc.failures.push_back({block.review_id.value_or(""), source_name, block.error->line,
                              block.error->message});
    } else {
      ParsedSentence s;
      s.review_id = *block.review_id;
      s.sentence_index = per_review[s.review_id]++;
      s.tokens = std::move(block.tokens);
      doc.sentences.push_back(std::move(s));
    }
    block = Block{};
  };

  while (std::getline(in, line)) {
    ++line_no;
    text::chomp(line);
    if (text::trim(line).empty()) {
      flush();
      continue;
    }
    if (!block.has_content) {
      block.has_content = true;
      block.first_line = line_no;
    }
    if (line.front() == '#') {
      auto body = text::trim(std::string_view(line).substr(1));
      if (body.starts_with("review_id")) {
        auto eq = body.find('=');
        if (eq == std::string_view::npos) {
          block.fail(line_no, "malformed review_id comment");
        } else {
          auto id = std::string(text::trim(body.substr(eq + 1)));
          if (id.empty()) block.fail(line_no, "empty review_id");
          else block.review_id = std::move(id);
        }
      }
      continue;
    }
    add_row(block, line_no, line);
  }
  flush();
  return doc;
}

std::vector<ParsedSentence> parse_conllu(std::istream& in, const std::string& source_name) {
  auto doc = read_conllu(in, source_name);
  if (!doc.failures.empty()) {
    const auto& f = doc.failures.front();
    throw ParseError(f.source, f.line, f.message);
  }
  return std::move(doc.sentences);
}

std::vector<ParsedSentence> parse_conllu_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open parse file " + path);
  return parse_conllu(in, path);
}

void write_conllu(std::ostream& out, const ParsedSentence& s) {
  out << "# review_id = " << s.review_id << '\n';
  for (const auto& t : s.tokens)
    out << t.index << '\t' << t.surface << '\t' << t.lemma << "\t_\t" << t.pos_tag << "\t_\t"
        << t.head << '\t' << t.deprel << "\t_\t_\n";
  out << '\n';
}

}  // namespace mea
