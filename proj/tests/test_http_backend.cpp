#include <doctest.h>

#include <httplib.h>

#include <memory>
#include <random>
#include <thread>

#include "longdoc/error.hpp"
#include "longdoc/http_backend.hpp"
#include "longdoc/scripted_backend.hpp"
#include "support/helpers.hpp"

using namespace longdoc;

namespace {

// in-process bridge exposing a scripted backend over the wire protocol
class FakeBridge {
  public:
    FakeBridge(ScriptedAttentionBackend attention, ScriptedEmbeddingBackend embedding)
        : attention_(std::move(attention)), embedding_(std::move(embedding)) {
        server_.Get("/info", [this](const httplib::Request&, httplib::Response& res) {
            nlohmann::json info{{"model_id", attention_.model_id()},
                                {"window_limit", attention_.window_limit()},
                                {"prompt_overhead", attention_.prompt_overhead()}};
            res.set_content(info.dump(), "application/json");
        });
        server_.Post("/tokenize", [this](const httplib::Request& req, httplib::Response& res) {
            auto body = nlohmann::json::parse(req.body);
            TokenizedText tokens = attention_.tokenizer().tokenize(body["text"].get<std::string>());
            nlohmann::json out = nlohmann::json::array();
            for (const Token& t : tokens.tokens) out.push_back({t.begin, t.end});
            res.set_content(nlohmann::json{{"tokens", out}}.dump(), "application/json");
        });
        server_.Post("/attention", [this](const httplib::Request& req, httplib::Response& res) {
            auto body = nlohmann::json::parse(req.body);
            try {
                std::string document = body["document"].get<std::string>();
                std::string query = body["query"].get<std::string>();
                std::vector<int> layers = body.value("layers", std::vector<int>{});
                AttentionTensor tensor;
                if (body.contains("visible_tokens")) {
                    tensor = attention_.forward_restricted(document, query, layers,
                                                           body["visible_tokens"].get<std::vector<int>>());
                } else {
                    tensor = attention_.forward(document, query, layers).attention;
                }
                TokenizedText tokens = attention_.tokenizer().tokenize(document);
                nlohmann::json offsets = nlohmann::json::array();
                for (const Token& t : tokens.tokens) offsets.push_back({t.begin, t.end});
                nlohmann::json out{{"layer_ids", tensor.layer_ids},
                                   {"head_count", tensor.head_count},
                                   {"doc_token_count", tensor.doc_token_count},
                                   {"query_token_count", tensor.query_token_count},
                                   {"values", tensor.values}};
                if (!body.contains("visible_tokens")) out["doc_tokens"] = offsets;
                res.set_content(out.dump(), "application/json");
            } catch (const std::exception& e) {
                res.status = 500;
                res.set_content(e.what(), "text/plain");
            }
        });
        server_.Post("/embed", [this](const httplib::Request& req, httplib::Response& res) {
            auto body = nlohmann::json::parse(req.body);
            try {
                std::vector<EmbeddingVector> vectors = embedding_.embed(body["texts"].get<std::vector<std::string>>());
                nlohmann::json out_vectors = nlohmann::json::array();
                for (const EmbeddingVector& v : vectors) out_vectors.push_back(v.values);
                res.set_content(nlohmann::json{{"model_id", embedding_.model_id()}, {"vectors", out_vectors}}.dump(),
                                "application/json");
            } catch (const std::exception& e) {
                res.status = 500;
                res.set_content(e.what(), "text/plain");
            }
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        REQUIRE(port_ > 0);
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~FakeBridge() {
        server_.stop();
        thread_.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  private:
    ScriptedAttentionBackend attention_;
    ScriptedEmbeddingBackend embedding_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

const char* kDoc = "alpha beta gamma. delta epsilon zeta.";
const char* kQuery = "find zeta";

std::unique_ptr<FakeBridge> make_bridge(const testsupport::Tensor4& nested) {
    ScriptedAttentionBackend attention(128);
    attention.add_entry(kDoc, kQuery, testsupport::to_tensor(nested));
    ScriptedEmbeddingBackend embedding;
    embedding.assign("one", {1.0, 0.0});
    embedding.assign("two", {0.0, 1.0});
    return std::make_unique<FakeBridge>(std::move(attention), std::move(embedding));
}

}  // namespace

TEST_CASE("http attention backend mirrors the remote scripted backend") {
    std::mt19937_64 rng(21);
    testsupport::Tensor4 nested = testsupport::random_tensor(rng, 2, 3, 8, 2);
    auto bridge = make_bridge(nested);

    HttpAttentionBackend backend(bridge->url());
    CHECK(backend.window_limit() == 128);
    CHECK(backend.model_id() == "scripted-attention");

    ForwardResult fr = backend.forward(kDoc, kQuery, {0, 1});
    AttentionTensor expected = testsupport::to_tensor(nested);
    REQUIRE(fr.attention.values.size() == expected.values.size());
    for (std::size_t i = 0; i < expected.values.size(); ++i) CHECK(fr.attention.values[i] == expected.values[i]);
    CHECK(fr.doc_tokens.size() == 8);

    AttentionTensor part = backend.forward_restricted(kDoc, kQuery, {0}, {1, 4});
    CHECK(part.doc_token_count == 2);
    CHECK(part.at(0, 0, 0, 0) == nested[0][0][1][0]);
    CHECK(part.at(0, 0, 1, 1) == nested[0][0][4][1]);

    TokenizedText tokens = backend.tokenizer().tokenize(kDoc);
    CHECK(tokens.size() == 8);
}

TEST_CASE("http embedding backend round-trips vectors and model id") {
    std::mt19937_64 rng(22);
    auto bridge = make_bridge(testsupport::random_tensor(rng, 1, 2, 8, 2));
    HttpEmbeddingBackend backend(bridge->url());
    std::vector<EmbeddingVector> out = backend.embed({"two", "one"});
    REQUIRE(out.size() == 2);
    CHECK(out[0].values == std::vector<double>{0.0, 1.0});
    CHECK(out[1].values == std::vector<double>{1.0, 0.0});
    CHECK(backend.model_id() == "scripted-embedding");
}

TEST_CASE("remote errors surface as BackendFailure") {
    std::mt19937_64 rng(23);
    auto bridge = make_bridge(testsupport::random_tensor(rng, 1, 2, 8, 2));

    HttpAttentionBackend backend(bridge->url());
    try {
        backend.forward("unknown document", "unknown query", {});
        FAIL("expected BackendFailure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::backend);
    }

    HttpEmbeddingBackend embedding(bridge->url());
    CHECK_THROWS_AS(embedding.embed({"missing"}), Error);

    // unreachable endpoint
    CHECK_THROWS_AS(HttpAttentionBackend("http://127.0.0.1:1"), Error);
}
