#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "longdoc/backend.hpp"

namespace longdoc {

/// Deterministic attention backend for tests and offline pipelines: returns
/// pre-computed tensors keyed by (document, query) text. Fixture file layout:
///   {"model_id": str?, "window_limit": int?, "prompt_overhead": int?,
///    "fail": bool?,
///    "entries": [{"document": str?, "query": str?, "layer_ids": [int],
///                 "head_count": int, "tensor": [L][H][T_d][T_q]}]}
class ScriptedAttentionBackend final : public AttentionBackend {
  public:
    explicit ScriptedAttentionBackend(int window_limit = 8192, int prompt_overhead = 0,
                                      std::string model_id = "scripted-attention");

    static ScriptedAttentionBackend from_json(const nlohmann::json& fixture);
    static ScriptedAttentionBackend from_file(const std::string& path);

    void add_entry(std::string document, std::string query, AttentionTensor tensor);
    void set_fail(bool fail) { fail_ = fail; }

    std::string model_id() const override { return model_id_; }
    const Tokenizer& tokenizer() const override { return tokenizer_; }
    int window_limit() const override { return window_limit_; }
    int prompt_overhead() const override { return prompt_overhead_; }

    ForwardResult forward(const std::string& document_text, const std::string& query_text,
                          const std::vector<int>& layers) override;
    AttentionTensor forward_restricted(const std::string& document_text, const std::string& query_text,
                                       const std::vector<int>& layers, const std::vector<int>& visible_tokens) override;

    /// Layer ids available across entries (sorted, deduplicated).
    std::vector<int> available_layers() const;

  private:
    struct Entry {
        std::string document;  // empty = wildcard
        std::string query;     // empty = wildcard
        AttentionTensor tensor;
    };

    const Entry& match(const std::string& document_text, const std::string& query_text) const;
    AttentionTensor entry_slice(const Entry& entry, const std::string& document_text, const std::string& query_text,
                                const std::vector<int>& layers) const;

    WordTokenizer tokenizer_;
    std::vector<Entry> entries_;
    int window_limit_;
    int prompt_overhead_;
    std::string model_id_;
    bool fail_ = false;
};

/// Embedding backend returning assigned vectors verbatim. Fixture layout:
///   {"model_id": str?, "fail": bool?, "vectors": {"text": [float]},
///    "default": [float]?}
class ScriptedEmbeddingBackend final : public EmbeddingBackend {
  public:
    explicit ScriptedEmbeddingBackend(std::string model_id = "scripted-embedding");

    static ScriptedEmbeddingBackend from_json(const nlohmann::json& fixture);
    static ScriptedEmbeddingBackend from_file(const std::string& path);

    void assign(std::string text, std::vector<double> vector);
    void set_default(std::vector<double> vector) { default_ = std::move(vector); }
    void set_fail(bool fail) { fail_ = fail; }

    std::string model_id() const override { return model_id_; }
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

  private:
    std::map<std::string, std::vector<double>> vectors_;
    std::optional<std::vector<double>> default_;
    std::string model_id_;
    bool fail_ = false;
};

/// Model-free embedding backend: feature hashing over lowercased words into a
/// fixed-dimension unit vector. Deterministic, so two identical texts always
/// embed identically.
class HashedEmbeddingBackend final : public EmbeddingBackend {
  public:
    explicit HashedEmbeddingBackend(int dim = 64);

    std::string model_id() const override;
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

  private:
    int dim_;
};

}  // namespace longdoc
