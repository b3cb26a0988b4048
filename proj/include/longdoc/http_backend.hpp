#pragma once

#include <memory>
#include <string>

#include "longdoc/backend.hpp"

namespace longdoc {

/// Attention backend speaking to an inference bridge over HTTP. Protocol:
///   GET  /info      -> {"model_id", "window_limit", "prompt_overhead"?}
///   POST /tokenize  {"text"} -> {"tokens": [[begin, end], ...]}
///   POST /attention {"document", "query", "layers", "visible_tokens"?,
///                    "template"?}
///                   -> {"layer_ids", "head_count", "doc_token_count",
///                       "query_token_count", "values": [flat row-major],
///                       "doc_tokens": [[begin, end], ...]?}
/// Connection, status, and payload errors surface as BackendFailure.
class HttpAttentionBackend final : public AttentionBackend {
  public:
    explicit HttpAttentionBackend(const std::string& url, std::string prompt_template = "");
    ~HttpAttentionBackend() override;

    std::string model_id() const override;
    const Tokenizer& tokenizer() const override;
    int window_limit() const override;
    int prompt_overhead() const override;

    ForwardResult forward(const std::string& document_text, const std::string& query_text,
                          const std::vector<int>& layers) override;
    AttentionTensor forward_restricted(const std::string& document_text, const std::string& query_text,
                                       const std::vector<int>& layers, const std::vector<int>& visible_tokens) override;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// POST /embed {"texts": [...]} -> {"model_id", "vectors": [[...], ...]}
class HttpEmbeddingBackend final : public EmbeddingBackend {
  public:
    explicit HttpEmbeddingBackend(const std::string& url);
    ~HttpEmbeddingBackend() override;

    std::string model_id() const override;
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace longdoc
