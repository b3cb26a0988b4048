#include <doctest.h>

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "longdoc/corpus.hpp"
#include "longdoc/error.hpp"
#include "support/helpers.hpp"

using namespace longdoc;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("two paragraphs and three sentences") {
    SegmentedDocument doc = segment_document("A. B.\n\nC.");
    REQUIRE(doc.paragraphs.size() == 2);
    REQUIRE(doc.sentences.size() == 3);
    CHECK(doc.sentence_text(0) == "A.");
    CHECK(doc.sentence_text(1) == "B.");
    CHECK(doc.sentence_text(2) == "C.");
    CHECK(doc.sentences[0].paragraph_index == 0);
    CHECK(doc.sentences[1].paragraph_index == 0);
    CHECK(doc.sentences[2].paragraph_index == 1);
}

TEST_CASE("single sentence covers the whole text") {
    SegmentedDocument doc = segment_document("Hello.");
    REQUIRE(doc.paragraphs.size() == 1);
    REQUIRE(doc.sentences.size() == 1);
    CHECK(doc.paragraphs[0].span == CharSpan{0, 6});
    CHECK(doc.sentences[0].span == CharSpan{0, 6});
}

TEST_CASE("empty or whitespace documents are rejected") {
    CHECK_THROWS_AS(segment_document(""), Error);
    CHECK_THROWS_AS(segment_document("  \n \t\n\n "), Error);
    try {
        segment_document("\n\n");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::empty_document);
    }
}

TEST_CASE("abbreviations do not end sentences") {
    SegmentedDocument doc = segment_document("Dr. Smith arrived. He left, e.g. quickly.");
    REQUIRE(doc.sentences.size() == 2);
    CHECK(doc.sentence_text(0) == "Dr. Smith arrived.");
    CHECK(doc.sentence_text(1) == "He left, e.g. quickly.");
}

TEST_CASE("punctuation runs and closing quotes stay with the sentence") {
    SegmentedDocument doc = segment_document("Really?! Yes. \"Sure.\" Done.");
    REQUIRE(doc.sentences.size() == 4);
    CHECK(doc.sentence_text(0) == "Really?!");
    CHECK(doc.sentence_text(2) == "\"Sure.\"");
}

TEST_CASE("segmentation round-trip covers every non-whitespace character") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> words(1, 5);
    std::uniform_int_distribution<int> sentences(1, 4);
    std::uniform_int_distribution<int> paragraphs(1, 5);
    for (int round = 0; round < 25; ++round) {
        std::vector<std::vector<int>> shape;
        int p = paragraphs(rng);
        for (int i = 0; i < p; ++i) {
            std::vector<int> s(static_cast<std::size_t>(sentences(rng)));
            for (int& w : s) w = words(rng);
            shape.push_back(s);
        }
        std::string text = testsupport::document_text(shape);
        SegmentedDocument doc = segment_document(text);
        doc.validate();
        std::vector<bool> covered(text.size(), false);
        for (const Paragraph& par : doc.paragraphs) {
            for (std::size_t i = par.span.begin; i < par.span.end; ++i) covered[i] = true;
        }
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (!covered[i]) CHECK(std::isspace(static_cast<unsigned char>(text[i])) != 0);
        }
        // sentences partition the non-whitespace of each paragraph
        std::size_t sentence_chars = 0;
        for (const Sentence& s : doc.sentences) sentence_chars += s.span.length();
        std::size_t paragraph_non_ws = 0;
        for (const Paragraph& par : doc.paragraphs) {
            for (std::size_t i = par.span.begin; i < par.span.end; ++i) {
                if (std::isspace(static_cast<unsigned char>(text[i])) == 0) ++paragraph_non_ws;
            }
        }
        CHECK(sentence_chars >= paragraph_non_ws);
    }
}

TEST_CASE("document_from_paragraphs keeps the paragraph list as retrieval units") {
    SegmentedDocument doc = document_from_paragraphs("d", {"One. Two.", "Three."});
    REQUIRE(doc.paragraphs.size() == 2);
    CHECK(doc.sentences.size() == 3);
    CHECK(doc.paragraph_text(0) == "One. Two.");
    CHECK(doc.paragraph_text(1) == "Three.");
    CHECK_THROWS_AS(document_from_paragraphs("d", {"ok.", "   "}), Error);
}

TEST_CASE("alignment maps sentences to minimal inclusive token ranges") {
    // "aa bb. cc dd." tokenizes to aa bb . cc dd . -> spans [0,2] and [3,5]
    SegmentedDocument doc = segment_document("aa bb. cc dd.");
    WordTokenizer tok;
    TokenAlignment align = align_tokens(doc, "query words", tok);
    REQUIRE(align.sentence_token_spans.size() == 2);
    CHECK(align.doc_token_count == 6);
    CHECK(align.query_token_count == 2);
    CHECK(align.sentence_token_spans[0] == TokenSpan{0, 2});
    CHECK(align.sentence_token_spans[1] == TokenSpan{3, 5});
    CHECK(align.paragraph_token_spans[0] == TokenSpan{0, 5});
}

TEST_CASE("single-token document aligns to span [0,0]") {
    SegmentedDocument doc = segment_document("Hi");
    WordTokenizer tok;
    TokenAlignment align = align_tokens(doc, "q", tok);
    CHECK(align.sentence_token_spans[0] == TokenSpan{0, 0});
    CHECK(align.paragraph_token_spans[0] == TokenSpan{0, 0});
}

TEST_CASE("a sentence covering no token raises AlignmentGap") {
    SegmentedDocument doc;
    doc.doc_id = "manual";
    doc.raw_text = "ab   cd";
    doc.paragraphs = {{0, {0, 7}}};
    doc.sentences = {{0, 0, {0, 2}}, {1, 0, {3, 4}}};  // second span is whitespace only
    WordTokenizer tok;
    try {
        align_tokens(doc, "q", tok);
        FAIL("expected AlignmentGap");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::alignment_gap);
    }
}

TEST_CASE("alignment consistency: span tokens overlap the sentence characters") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> words(1, 6);
    WordTokenizer tok;
    for (int round = 0; round < 20; ++round) {
        std::vector<std::vector<int>> shape{{words(rng), words(rng)}, {words(rng)}};
        SegmentedDocument doc = testsupport::make_document(shape, "r" + std::to_string(round));
        TokenizedText tokens = tok.tokenize(doc.raw_text);
        TokenAlignment align = align_tokens(doc, "q", tok);
        for (const Sentence& s : doc.sentences) {
            const TokenSpan& span = align.sentence_token_spans[static_cast<std::size_t>(s.index)];
            for (int t = span.first; t <= span.last; ++t) {
                const Token& token = tokens.tokens[static_cast<std::size_t>(t)];
                CHECK(token.begin < s.span.end);
                CHECK(token.end > s.span.begin);
            }
            if (span.first > 0) CHECK(tokens.tokens[static_cast<std::size_t>(span.first - 1)].end <= s.span.begin);
            if (span.last + 1 < align.doc_token_count) {
                CHECK(tokens.tokens[static_cast<std::size_t>(span.last + 1)].begin >= s.span.end);
            }
        }
    }
}

TEST_CASE("dataset loader reads canonical records") {
    auto path = write_temp("longdoc_ds_ok.jsonl",
                           R"({"id": "s1", "paragraphs": ["Alpha one.", "Beta two."], "query": "find beta", "gold": [1]})"
                           "\n"
                           R"({"id": "s2", "paragraphs": ["Gamma."], "query": "q", "gold": [0], "type": "comparison",)"
                           R"( "subqueries": [{"q": "sub", "gold": [0]}]})"
                           "\n");
    std::vector<RetrievalSample> samples = load_dataset(path.string());
    REQUIRE(samples.size() == 2);
    CHECK(samples[0].sample_id == "s1");
    CHECK(samples[0].query_type == QueryType::unspecified);
    CHECK(samples[0].gold_paragraphs == std::vector<int>{1});
    CHECK(samples[0].document.paragraphs.size() == 2);
    CHECK(samples[1].query_type == QueryType::comparison);
    REQUIRE(samples[1].subqueries.size() == 1);
    CHECK(samples[1].subqueries[0].text == "sub");

    // loader determinism
    std::vector<RetrievalSample> again = load_dataset(path.string());
    REQUIRE(again.size() == samples.size());
    CHECK(again[1].document.raw_text == samples[1].document.raw_text);
}

TEST_CASE("dataset loader reports the record number on schema violations") {
    auto path = write_temp("longdoc_ds_bad.jsonl",
                           R"({"id": "ok", "paragraphs": ["Fine."], "query": "q", "gold": [0]})"
                           "\n"
                           R"({"id": "bad", "paragraphs": ["Fine."], "query": "q", "gold": [3]})"
                           "\n");
    try {
        load_dataset(path.string());
        FAIL("expected SchemaError");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::schema);
        CHECK(std::string(e.what()).find("record 2") != std::string::npos);
    }
}

TEST_CASE("dataset loader accepts raw text records") {
    auto path = write_temp("longdoc_ds_text.jsonl",
                           R"({"id": "t", "text": "One one.\n\nTwo two.", "query": "q", "gold": [1]})"
                           "\n");
    std::vector<RetrievalSample> samples = load_dataset(path.string());
    REQUIRE(samples.size() == 1);
    CHECK(samples[0].document.paragraphs.size() == 2);
}

TEST_CASE("dataset statistics use word counts") {
    auto path = write_temp("longdoc_ds_stats.jsonl",
                           R"({"id": "a", "paragraphs": ["one two three."], "query": "q", "gold": [0]})"
                           "\n"
                           R"({"id": "b", "paragraphs": ["one two three four five.", "six seven."], "query": "q", "gold": [0, 1]})"
                           "\n");
    std::vector<RetrievalSample> samples = load_dataset(path.string());
    DatasetStats stats = compute_stats(samples);
    CHECK(stats.sample_count == 2);
    CHECK(stats.mean_word_count == doctest::Approx(5.0));  // (3 + 7) / 2
    CHECK(stats.max_word_count == 7);
    CHECK(stats.mean_gold_count == doctest::Approx(1.5));
    CHECK(stats.mean_paragraph_count == doctest::Approx(1.5));
}
