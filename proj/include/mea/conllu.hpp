#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace mea {

struct Token {
  int index = 0;  // 1-based
  std::string surface;
  std::string lemma;  // lowercase
  std::string pos_tag;  // Penn Treebank
  int head = 0;  // 0 = root
  std::string deprel;

  friend bool operator==(const Token&, const Token&) = default;
};

struct ParsedSentence {
  std::vector<Token> tokens;
  std::string review_id;
  int sentence_index = 0;  // ordinal within the review, 0-based

  const Token& token(int index) const { return tokens.at(static_cast<std::size_t>(index - 1)); }
  int size() const { return static_cast<int>(tokens.size()); }
  int root() const;

  friend bool operator==(const ParsedSentence&, const ParsedSentence&) = default;
};

// A sentence block that could not be parsed. review_id is empty when the
// block failed before its review_id comment was seen.
struct ConlluFailure {
  std::string review_id;
  std::string source;
  std::size_t line = 0;
  std::string message;
};

struct ConlluDocument {
  std::vector<ParsedSentence> sentences;
  std::vector<ConlluFailure> failures;
};

// Reads every sentence block, collecting malformed blocks as failures
// instead of stopping. Sentence indices count blocks per review_id in file
// order, including failed ones.
ConlluDocument read_conllu(std::istream& in, const std::string& source_name);

// Strict variant: throws ParseError on the first malformed block.
std::vector<ParsedSentence> parse_conllu(std::istream& in, const std::string& source_name);
std::vector<ParsedSentence> parse_conllu_file(const std::string& path);

void write_conllu(std::ostream& out, const ParsedSentence& s);

}  // namespace mea
