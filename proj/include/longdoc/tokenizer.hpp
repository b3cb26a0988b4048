#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace longdoc {

/// Character range [begin, end) of one token in its source text.
struct Token {
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct TokenizedText {
    std::vector<Token> tokens;

    std::size_t size() const { return tokens.size(); }
    bool empty() const { return tokens.empty(); }
    std::string_view text_of(std::string_view source, std::size_t i) const {
        return source.substr(tokens[i].begin, tokens[i].end - tokens[i].begin);
    }
};

class Tokenizer {
  public:
    virtual ~Tokenizer() = default;
    virtual std::string id() const = 0;
    virtual TokenizedText tokenize(std::string_view text) const = 0;
};

/// Offset-preserving tokenizer: maximal alphanumeric runs plus single
/// punctuation marks. Bytes >= 0x80 are treated as word characters so UTF-8
/// sequences stay inside one token.
class WordTokenizer final : public Tokenizer {
  public:
    std::string id() const override { return "word"; }
    TokenizedText tokenize(std::string_view text) const override;
};

/// Whitespace-separated word count, the unit used for dataset statistics.
std::size_t word_count(std::string_view text);

}  // namespace longdoc
