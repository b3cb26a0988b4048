#include <doctest.h>

#include <random>

#include "longdoc/attention_scoring.hpp"
#include "longdoc/error.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace longdoc;
using testsupport::Tensor4;
using testsupport::to_tensor;
namespace oracle = testsupport::oracle;

namespace {

TokenAlignment alignment_for(std::vector<TokenSpan> sentence_spans, std::vector<TokenSpan> paragraph_spans, int doc_tokens,
                             int query_tokens) {
    TokenAlignment align;
    align.tokenizer_id = "word";
    align.doc_token_count = doc_tokens;
    align.query_token_count = query_tokens;
    align.sentence_token_spans = std::move(sentence_spans);
    align.paragraph_token_spans = std::move(paragraph_spans);
    return align;
}

}  // namespace

TEST_CASE("uniform attention scores every sentence at 1/T_d") {
    const int doc_tokens = 8;
    Tensor4 nested = testsupport::zeros_nested(1, 2, doc_tokens, 2);
    for (auto& head : nested[0]) {
        for (auto& row : head) {
            for (double& v : row) v = 1.0 / doc_tokens;
        }
    }
    TokenAlignment align = alignment_for({{0, 3}, {4, 7}}, {{0, 7}}, doc_tokens, 2);
    ScoreSheet sheet = sentence_attention_scores(to_tensor(nested), align);
    REQUIRE(sheet.scores.size() == 2);
    CHECK(sheet.scores[0] == doctest::Approx(1.0 / doc_tokens));
    CHECK(sheet.scores[1] == doctest::Approx(1.0 / doc_tokens));
    CHECK(sheet.kind == ScoreSheet::Kind::attention);
}

TEST_CASE("heads are averaged before the max") {
    // heads put 0.9 and 0.1 on one token of the second sentence
    Tensor4 nested = testsupport::zeros_nested(1, 2, 6, 1);
    for (int h = 0; h < 2; ++h) {
        for (int t = 0; t < 6; ++t) nested[0][h][t][0] = 0.001;
    }
    nested[0][0][4][0] = 0.9;
    nested[0][1][4][0] = 0.1;
    TokenAlignment align = alignment_for({{0, 2}, {3, 5}}, {{0, 5}}, 6, 1);
    ScoreSheet sheet = sentence_attention_scores(to_tensor(nested), align);
    CHECK(sheet.scores[1] == doctest::Approx(0.5));  // (0.9 + 0.1) / 2
    CHECK(sheet.scores[0] == doctest::Approx(0.001));
}

TEST_CASE("sentence and paragraph scores match the exhaustive oracle") {
    std::mt19937_64 rng(31);
    Tensor4 nested = testsupport::random_tensor(rng, 3, 4, 20, 5);
    std::vector<TokenSpan> sentences{{0, 4}, {5, 9}, {10, 14}, {15, 19}};
    std::vector<TokenSpan> paragraphs{{0, 9}, {10, 19}};
    TokenAlignment align = alignment_for(sentences, paragraphs, 20, 5);

    ScoreSheet sheet = sentence_attention_scores(to_tensor(nested), align);
    std::vector<double> expected = oracle::span_scores(nested, sentences);
    REQUIRE(sheet.scores.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(sheet.scores[i] == doctest::Approx(expected[i]).epsilon(1e-9));
    }

    std::vector<double> p_scores = paragraph_attention_scores(to_tensor(nested), align);
    std::vector<double> p_expected = oracle::span_scores(nested, paragraphs);
    for (std::size_t i = 0; i < p_expected.size(); ++i) {
        CHECK(p_scores[i] == doctest::Approx(p_expected[i]).epsilon(1e-9));
    }
}

TEST_CASE("paragraph spanning all tokens scores the global maximum") {
    std::mt19937_64 rng(32);
    Tensor4 nested = testsupport::random_tensor(rng, 2, 3, 12, 4);
    TokenAlignment align = alignment_for({{0, 11}}, {{0, 11}}, 12, 4);
    std::vector<double> scores = paragraph_attention_scores(to_tensor(nested), align);
    CHECK(scores[0] == doctest::Approx(oracle::span_score(nested, 0, 11)).epsilon(1e-12));
}

TEST_CASE("a spike planted in the second paragraph ranks it first") {
    std::mt19937_64 rng(33);
    Tensor4 nested = testsupport::random_tensor(rng, 1, 2, 10, 2);
    for (int h = 0; h < 2; ++h) {
        for (int t = 0; t < 10; ++t) {
            for (int q = 0; q < 2; ++q) nested[0][h][t][q] *= 0.1;
        }
        nested[0][h][7][0] = 0.9;
    }
    TokenAlignment align = alignment_for({{0, 4}, {5, 9}}, {{0, 4}, {5, 9}}, 10, 2);
    std::vector<double> scores = paragraph_attention_scores(to_tensor(nested), align);
    CHECK(scores[1] > scores[0]);
}

TEST_CASE("all-zero tensor scores zero everywhere and ties break low") {
    Tensor4 nested = testsupport::zeros_nested(1, 2, 6, 1);
    TokenAlignment align = alignment_for({{0, 2}, {3, 5}}, {{0, 2}, {3, 5}}, 6, 1);
    std::vector<double> scores = paragraph_attention_scores(to_tensor(nested), align);
    CHECK(scores[0] == 0.0);
    CHECK(scores[1] == 0.0);
}

TEST_CASE("alignment and tensor shape disagreement raises ShapeMismatch") {
    std::mt19937_64 rng(34);
    Tensor4 nested = testsupport::random_tensor(rng, 1, 2, 6, 2);
    TokenAlignment align = alignment_for({{0, 5}}, {{0, 5}}, 7, 2);  // doc count off by one
    try {
        sentence_attention_scores(to_tensor(nested), align);
        FAIL("expected ShapeMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::shape_mismatch);
    }
}

TEST_CASE("raising one entry never hurts its sentence and never moves others") {
    std::mt19937_64 rng(35);
    std::vector<TokenSpan> sentences{{0, 3}, {4, 8}, {9, 15}};
    TokenAlignment align = alignment_for(sentences, {{0, 15}}, 16, 3);
    for (int round = 0; round < 50; ++round) {
        Tensor4 nested = testsupport::random_tensor(rng, 2, 3, 16, 3);
        ScoreSheet before = sentence_attention_scores(to_tensor(nested), align);
        std::uniform_int_distribution<int> pick_l(0, 1);
        std::uniform_int_distribution<int> pick_h(0, 2);
        std::uniform_int_distribution<int> pick_t(0, 15);
        std::uniform_int_distribution<int> pick_q(0, 2);
        int l = pick_l(rng);
        int h = pick_h(rng);
        int t = pick_t(rng);
        int q = pick_q(rng);
        nested[l][h][t][q] += 0.5;
        ScoreSheet after = sentence_attention_scores(to_tensor(nested), align);
        for (std::size_t s = 0; s < sentences.size(); ++s) {
            if (sentences[s].contains(t)) {
                CHECK(after.scores[s] >= before.scores[s]);
            } else {
                CHECK(after.scores[s] == before.scores[s]);
            }
        }
    }
}

TEST_CASE("scores are invariant under head permutation") {
    std::mt19937_64 rng(36);
    Tensor4 nested = testsupport::random_tensor(rng, 2, 4, 10, 3);
    TokenAlignment align = alignment_for({{0, 4}, {5, 9}}, {{0, 9}}, 10, 3);
    ScoreSheet base = sentence_attention_scores(to_tensor(nested), align);

    Tensor4 permuted = nested;
    for (int l = 0; l < 2; ++l) {
        permuted[l][0] = nested[l][3];
        permuted[l][1] = nested[l][0];
        permuted[l][2] = nested[l][1];
        permuted[l][3] = nested[l][2];
    }
    ScoreSheet shuffled = sentence_attention_scores(to_tensor(permuted), align);
    for (std::size_t s = 0; s < base.scores.size(); ++s) {
        CHECK(shuffled.scores[s] == doctest::Approx(base.scores[s]).epsilon(1e-12));
    }
}

TEST_CASE("adding a layer to the selected set never lowers a score") {
    std::mt19937_64 rng(37);
    Tensor4 nested = testsupport::random_tensor(rng, 3, 2, 12, 2);
    TokenAlignment align = alignment_for({{0, 5}, {6, 11}}, {{0, 11}}, 12, 2);
    AttentionTensor full = to_tensor(nested);
    ScoreSheet subset = sentence_attention_scores(full.select_layers({0, 2}), align);
    ScoreSheet all = sentence_attention_scores(full, align);
    for (std::size_t s = 0; s < subset.scores.size(); ++s) {
        CHECK(all.scores[s] >= subset.scores[s]);
    }
}

TEST_CASE("layer normalization rescales each layer to a unit maximum") {
    Tensor4 nested = testsupport::zeros_nested(2, 1, 4, 1);
    // layer 0 peaks at 0.4 on token 0; layer 1 peaks at 0.2 on token 3
    nested[0][0][0][0] = 0.4;
    nested[0][0][3][0] = 0.1;
    nested[1][0][0][0] = 0.05;
    nested[1][0][3][0] = 0.2;
    TokenAlignment align = alignment_for({{0, 1}, {2, 3}}, {{0, 3}}, 4, 1);

    ScoreSheet raw = sentence_attention_scores(to_tensor(nested), align);
    CHECK(raw.scores[0] == doctest::Approx(0.4));
    CHECK(raw.scores[1] == doctest::Approx(0.2));

    AttentionScoringOptions normalize;
    normalize.normalize_layers = true;
    ScoreSheet scaled = sentence_attention_scores(to_tensor(nested), align, normalize);
    CHECK(scaled.scores[0] == doctest::Approx(1.0));  // layer 0 max
    CHECK(scaled.scores[1] == doctest::Approx(1.0));  // layer 1 max
}
