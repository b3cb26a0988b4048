#include <doctest.h>

#include <random>

#include "longdoc/backend.hpp"
#include "longdoc/error.hpp"
#include "longdoc/scripted_backend.hpp"
#include "support/helpers.hpp"

using namespace longdoc;
using testsupport::random_tensor;
using testsupport::to_tensor;

namespace {

// ten doc tokens: 8 words + 2 periods; three query tokens
const char* kDocText = "alpha beta gamma delta. epsilon zeta eta theta.";
const char* kQueryText = "find gamma now";

ScriptedAttentionBackend make_backend(const testsupport::Tensor4& nested, int window = 8192) {
    ScriptedAttentionBackend backend(window);
    backend.add_entry(kDocText, kQueryText, to_tensor(nested));
    return backend;
}

}  // namespace

TEST_CASE("scripted backend returns the configured tensor verbatim") {
    std::mt19937_64 rng(3);
    testsupport::Tensor4 nested = random_tensor(rng, 2, 4, 10, 3);
    ScriptedAttentionBackend backend = make_backend(nested);
    ForwardResult fr = backend.forward(kDocText, kQueryText, {});
    AttentionTensor expected = to_tensor(nested);
    REQUIRE(fr.attention.values.size() == expected.values.size());
    for (std::size_t i = 0; i < expected.values.size(); ++i) {
        CHECK(fr.attention.values[i] == expected.values[i]);  // bit-identical
    }
    CHECK(fr.query_token_count == 3);
    CHECK(fr.doc_tokens.size() == 10);
}

TEST_CASE("forward tensor shape follows layers, heads, and token counts") {
    std::mt19937_64 rng(4);
    ScriptedAttentionBackend backend = make_backend(random_tensor(rng, 2, 4, 10, 3));
    ForwardResult fr = backend.forward(kDocText, kQueryText, {0, 1});
    CHECK(fr.attention.layer_count() == 2);
    CHECK(fr.attention.head_count == 4);
    CHECK(fr.attention.doc_token_count == 10);
    CHECK(fr.attention.query_token_count == 3);
    fr.attention.validate();

    ForwardResult one_layer = backend.forward(kDocText, kQueryText, {1});
    CHECK(one_layer.attention.layer_count() == 1);
    CHECK(one_layer.attention.layer_ids == std::vector<int>{1});
}

TEST_CASE("layer selection rejects layers the backend does not expose") {
    std::mt19937_64 rng(5);
    ScriptedAttentionBackend backend = make_backend(random_tensor(rng, 2, 2, 10, 3));
    CHECK_THROWS_AS(backend.forward(kDocText, kQueryText, {7}), Error);
}

TEST_CASE("tensor shape mismatch against the tokenization is a backend failure") {
    std::mt19937_64 rng(6);
    ScriptedAttentionBackend backend(8192);
    backend.add_entry(kDocText, kQueryText, to_tensor(random_tensor(rng, 1, 2, 9, 3)));  // doc is 10 tokens
    try {
        backend.forward(kDocText, kQueryText, {});
        FAIL("expected BackendFailure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::backend);
    }
}

TEST_CASE("scripted backend failure flag maps to BackendFailure") {
    std::mt19937_64 rng(7);
    ScriptedAttentionBackend backend = make_backend(random_tensor(rng, 1, 2, 10, 3));
    backend.set_fail(true);
    CHECK_THROWS_AS(backend.forward(kDocText, kQueryText, {}), Error);
}

TEST_CASE("forward_with_attention raises ContextOverflow only under strategy none") {
    std::mt19937_64 rng(8);
    testsupport::Tensor4 nested = random_tensor(rng, 1, 2, 10, 3);
    ScriptedAttentionBackend backend = make_backend(nested, /*window=*/8);  // 10 + 3 > 8
    SegmentedDocument doc = segment_document(kDocText);

    LongContextConfig none_cfg;
    try {
        forward_with_attention(backend, doc, kQueryText, {}, none_cfg);
        FAIL("expected ContextOverflow");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::context_overflow);
    }

    LongContextConfig chunked_cfg;
    chunked_cfg.strategy = LongContextStrategy::chunked;
    auto [tensor, align] = forward_with_attention(backend, doc, kQueryText, {}, chunked_cfg);
    CHECK(tensor.doc_token_count == 10);
    // disjoint assembly reproduces the scripted tensor exactly
    AttentionTensor expected = to_tensor(nested);
    for (std::size_t i = 0; i < expected.values.size(); ++i) CHECK(tensor.values[i] == expected.values[i]);
    CHECK(align.doc_token_count == 10);
}

TEST_CASE("restricted forward slices the requested columns") {
    std::mt19937_64 rng(9);
    testsupport::Tensor4 nested = random_tensor(rng, 2, 2, 10, 3);
    ScriptedAttentionBackend backend = make_backend(nested);
    std::vector<int> visible{2, 5, 9};
    AttentionTensor part = backend.forward_restricted(kDocText, kQueryText, {}, visible);
    REQUIRE(part.doc_token_count == 3);
    for (int l = 0; l < 2; ++l) {
        for (int h = 0; h < 2; ++h) {
            for (std::size_t v = 0; v < visible.size(); ++v) {
                for (int q = 0; q < 3; ++q) {
                    CHECK(part.at(l, h, static_cast<int>(v), q) ==
                          nested[static_cast<std::size_t>(l)][static_cast<std::size_t>(h)]
                                [static_cast<std::size_t>(visible[v])][static_cast<std::size_t>(q)]);
                }
            }
        }
    }
}

TEST_CASE("scripted fixture JSON round-trips through the backend") {
    std::mt19937_64 rng(10);
    testsupport::Tensor4 nested = random_tensor(rng, 1, 2, 3, 2);
    nlohmann::json entry = attention_tensor_to_json(to_tensor(nested, {5}));
    entry["document"] = "tiny doc x";
    entry["query"] = "q y";
    nlohmann::json fixture{{"window_limit", 64}, {"entries", nlohmann::json::array({entry})}};
    ScriptedAttentionBackend backend = ScriptedAttentionBackend::from_json(fixture);
    CHECK(backend.window_limit() == 64);
    CHECK(backend.available_layers() == std::vector<int>{5});
    ForwardResult fr = backend.forward("tiny doc x", "q y", {5});
    CHECK(fr.attention.layer_ids == std::vector<int>{5});
    CHECK(fr.attention.doc_token_count == 3);
}

TEST_CASE("scripted embeddings return assigned vectors verbatim") {
    ScriptedEmbeddingBackend backend;
    backend.assign("a", {1.0, 0.0});
    backend.assign("b", {0.6, 0.8});
    std::vector<EmbeddingVector> out = backend.embed({"b", "a", "b"});
    REQUIRE(out.size() == 3);
    CHECK(out[0].values == std::vector<double>{0.6, 0.8});
    CHECK(out[1].values == std::vector<double>{1.0, 0.0});
    CHECK(out[2].values == std::vector<double>{0.6, 0.8});
    CHECK_THROWS_AS(backend.embed({"missing"}), Error);
    backend.set_fail(true);
    CHECK_THROWS_AS(backend.embed({"a"}), Error);
}

TEST_CASE("hashed embeddings are deterministic unit vectors") {
    HashedEmbeddingBackend backend(32);
    std::vector<EmbeddingVector> out = backend.embed({"x", "x", "different words entirely"});
    REQUIRE(out.size() == 3);
    CHECK(out[0].values == out[1].values);
    CHECK(out[0].norm() == doctest::Approx(1.0));
    CHECK(out[2].norm() == doctest::Approx(1.0));
    CHECK(out[0].values.size() == 32);
    // no zero-norm vectors even for punctuation-only text
    CHECK(backend.embed({"?!"})[0].norm() == doctest::Approx(1.0));
}

TEST_CASE("tokenization stability yields identical alignments") {
    std::mt19937_64 rng(11);
    ScriptedAttentionBackend backend = make_backend(random_tensor(rng, 1, 2, 10, 3));
    SegmentedDocument doc = segment_document(kDocText);
    auto [t1, a1] = forward_with_attention(backend, doc, kQueryText, {});
    auto [t2, a2] = forward_with_attention(backend, doc, kQueryText, {});
    CHECK(a1.sentence_token_spans == a2.sentence_token_spans);
    CHECK(a1.paragraph_token_spans == a2.paragraph_token_spans);
    CHECK(t1.values == t2.values);
}
