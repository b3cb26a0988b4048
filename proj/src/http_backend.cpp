#include "longdoc/http_backend.hpp"

#include <httplib.h>
#include <json.hpp>

#include "longdoc/error.hpp"

namespace longdoc {

namespace {

using nlohmann::json;

json post_json(httplib::Client& client, const std::string& path, const json& body) {
    auto res = client.Post(path, body.dump(), "application/json");
    if (!res) {
        fail(ErrorKind::backend, "http backend unreachable at " + path + " (" + httplib::to_string(res.error()) + ")");
    }
    if (res->status != 200) {
        fail(ErrorKind::backend, "http backend returned status " + std::to_string(res->status) + " for " + path + ": " +
                                     res->body);
    }
    try {
        return json::parse(res->body);
    } catch (const json::exception& e) {
        fail(ErrorKind::backend, std::string("http backend returned invalid JSON: ") + e.what());
    }
}

TokenizedText tokens_from_json(const json& array) {
    TokenizedText out;
    for (const auto& pair : array) {
        if (!pair.is_array() || pair.size() != 2) fail(ErrorKind::backend, "token offsets must be [begin, end] pairs");
        out.tokens.push_back({pair[0].get<std::size_t>(), pair[1].get<std::size_t>()});
    }
    return out;
}

AttentionTensor tensor_from_flat(const json& body) {
    AttentionTensor tensor;
    try {
        tensor.layer_ids = body.at("layer_ids").get<std::vector<int>>();
        tensor.head_count = body.at("head_count").get<int>();
        tensor.doc_token_count = body.at("doc_token_count").get<int>();
        tensor.query_token_count = body.at("query_token_count").get<int>();
        tensor.values = body.at("values").get<std::vector<double>>();
    } catch (const json::exception& e) {
        fail(ErrorKind::backend, std::string("malformed attention payload: ") + e.what());
    }
    tensor.validate();
    return tensor;
}

class RemoteTokenizer final : public Tokenizer {
  public:
    explicit RemoteTokenizer(httplib::Client& client) : client_(client) {}

    std::string id() const override { return "remote"; }

    TokenizedText tokenize(std::string_view text) const override {
        json body = post_json(client_, "/tokenize", json{{"text", std::string(text)}});
        if (!body.contains("tokens")) fail(ErrorKind::backend, "tokenize response missing \"tokens\"");
        return tokens_from_json(body["tokens"]);
    }

  private:
    httplib::Client& client_;
};

}  // namespace

struct HttpAttentionBackend::Impl {
    Impl(const std::string& url, std::string prompt_template)
        : client(url), tokenizer(client), prompt_template(std::move(prompt_template)) {
        client.set_read_timeout(600, 0);
        client.set_connection_timeout(10, 0);
        auto res = client.Get("/info");
        if (!res || res->status != 200) fail(ErrorKind::backend, "http backend /info unavailable at " + url);
        json info;
        try {
            info = json::parse(res->body);
            model_id = info.value("model_id", std::string("http"));
            window_limit = info.at("window_limit").get<int>();
            prompt_overhead = info.value("prompt_overhead", 0);
        } catch (const json::exception& e) {
            fail(ErrorKind::backend, std::string("malformed /info payload: ") + e.what());
        }
    }

    json attention_request(const std::string& document_text, const std::string& query_text, const std::vector<int>& layers,
                           const std::vector<int>* visible_tokens) {
        json body{{"document", document_text}, {"query", query_text}, {"layers", layers}};
        if (!prompt_template.empty()) body["template"] = prompt_template;
        if (visible_tokens != nullptr) body["visible_tokens"] = *visible_tokens;
        return post_json(client, "/attention", body);
    }

    httplib::Client client;
    RemoteTokenizer tokenizer;
    std::string prompt_template;
    std::string model_id;
    int window_limit = 0;
    int prompt_overhead = 0;
};

HttpAttentionBackend::HttpAttentionBackend(const std::string& url, std::string prompt_template)
    : impl_(std::make_unique<Impl>(url, std::move(prompt_template))) {}

HttpAttentionBackend::~HttpAttentionBackend() = default;

std::string HttpAttentionBackend::model_id() const {
    return impl_->model_id;
}

const Tokenizer& HttpAttentionBackend::tokenizer() const {
    return impl_->tokenizer;
}

int HttpAttentionBackend::window_limit() const {
    return impl_->window_limit;
}

int HttpAttentionBackend::prompt_overhead() const {
    return impl_->prompt_overhead;
}

ForwardResult HttpAttentionBackend::forward(const std::string& document_text, const std::string& query_text,
                                            const std::vector<int>& layers) {
    json body = impl_->attention_request(document_text, query_text, layers, nullptr);
    ForwardResult result;
    result.attention = tensor_from_flat(body);
    if (body.contains("doc_tokens")) {
        result.doc_tokens = tokens_from_json(body["doc_tokens"]);
    } else {
        result.doc_tokens = impl_->tokenizer.tokenize(document_text);
    }
    if (static_cast<int>(result.doc_tokens.size()) != result.attention.doc_token_count) {
        fail(ErrorKind::backend, "http backend token offsets do not match the tensor shape");
    }
    result.query_token_count = result.attention.query_token_count;
    return result;
}

AttentionTensor HttpAttentionBackend::forward_restricted(const std::string& document_text, const std::string& query_text,
                                                         const std::vector<int>& layers,
                                                         const std::vector<int>& visible_tokens) {
    json body = impl_->attention_request(document_text, query_text, layers, &visible_tokens);
    AttentionTensor tensor = tensor_from_flat(body);
    if (tensor.doc_token_count != static_cast<int>(visible_tokens.size())) {
        fail(ErrorKind::backend, "http backend returned a tensor not matching the visible token set");
    }
    return tensor;
}

struct HttpEmbeddingBackend::Impl {
    explicit Impl(const std::string& url) : client(url) {
        client.set_read_timeout(600, 0);
        client.set_connection_timeout(10, 0);
    }

    httplib::Client client;
    std::string model_id = "http-embedding";
    bool model_id_known = false;
};

HttpEmbeddingBackend::HttpEmbeddingBackend(const std::string& url) : impl_(std::make_unique<Impl>(url)) {}

HttpEmbeddingBackend::~HttpEmbeddingBackend() = default;

std::string HttpEmbeddingBackend::model_id() const {
    return impl_->model_id;
}

std::vector<EmbeddingVector> HttpEmbeddingBackend::embed(const std::vector<std::string>& texts) {
    json body = post_json(impl_->client, "/embed", json{{"texts", texts}});
    if (body.contains("model_id") && body["model_id"].is_string()) {
        impl_->model_id = body["model_id"].get<std::string>();
        impl_->model_id_known = true;
    }
    if (!body.contains("vectors") || !body["vectors"].is_array() || body["vectors"].size() != texts.size()) {
        fail(ErrorKind::backend, "embed response must carry one vector per input text");
    }
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& vec : body["vectors"]) {
        out.push_back({vec.get<std::vector<double>>(), impl_->model_id});
    }
    return out;
}

}  // namespace longdoc
