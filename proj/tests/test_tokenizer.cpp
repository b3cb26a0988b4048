#include <doctest.h>

#include "longdoc/tokenizer.hpp"

using namespace longdoc;

TEST_CASE("word tokenizer splits words and punctuation with offsets") {
    WordTokenizer tok;
    TokenizedText t = tok.tokenize("Hello, world.");
    REQUIRE(t.size() == 4);  // Hello , world .
    CHECK(t.tokens[0].begin == 0);
    CHECK(t.tokens[0].end == 5);
    CHECK(t.tokens[1].begin == 5);
    CHECK(t.tokens[1].end == 6);
    CHECK(t.tokens[2].begin == 7);
    CHECK(t.tokens[2].end == 12);
    CHECK(t.tokens[3].begin == 12);
    CHECK(t.tokens[3].end == 13);
}

TEST_CASE("word tokenizer handles empty and whitespace input") {
    WordTokenizer tok;
    CHECK(tok.tokenize("").empty());
    CHECK(tok.tokenize("  \n\t ").empty());
}

TEST_CASE("word tokenizer keeps utf-8 sequences inside one token") {
    WordTokenizer tok;
    TokenizedText t = tok.tokenize("caf\xc3\xa9 bar");
    REQUIRE(t.size() == 2);
    CHECK(t.tokens[0].end == 5);  // two bytes for the accent
}

TEST_CASE("tokenization is deterministic") {
    WordTokenizer tok;
    std::string text = "One two, three. Four!";
    TokenizedText a = tok.tokenize(text);
    TokenizedText b = tok.tokenize(text);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.tokens[i].begin == b.tokens[i].begin);
        CHECK(a.tokens[i].end == b.tokens[i].end);
    }
}

TEST_CASE("word_count matches whitespace splitting") {
    CHECK(word_count("") == 0);
    CHECK(word_count("one") == 1);
    CHECK(word_count("one two\tthree\nfour") == 4);
    CHECK(word_count("  padded   words  ") == 2);
}
