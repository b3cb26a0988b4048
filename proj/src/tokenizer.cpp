#include "longdoc/tokenizer.hpp"

#include <cctype>

namespace longdoc {

namespace {

bool is_space_byte(unsigned char c) {
    return std::isspace(c) != 0;
}

bool is_word_byte(unsigned char c) {
    return std::isalnum(c) != 0 || c >= 0x80;
}

}  // namespace

TokenizedText WordTokenizer::tokenize(std::string_view text) const {
    TokenizedText out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_space_byte(c)) {
            ++i;
            continue;
        }
        if (is_word_byte(c)) {
            std::size_t begin = i;
            while (i < n && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
            out.tokens.push_back({begin, i});
        } else {
            out.tokens.push_back({i, i + 1});
            ++i;
        }
    }
    return out;
}

std::size_t word_count(std::string_view text) {
    std::size_t count = 0;
    bool in_word = false;
    for (unsigned char c : text) {
        if (is_space_byte(c)) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++count;
        }
    }
    return count;
}

}  // namespace longdoc
