#pragma once

#include <memory>

#include "longdoc/backend.hpp"
#include "longdoc/config.hpp"
#include "longdoc/entity.hpp"
#include "longdoc/retrieval.hpp"

namespace longdoc {

std::unique_ptr<AttentionBackend> make_attention_backend(const AttentionBackendConfig& cfg);
std::unique_ptr<EmbeddingBackend> make_embedding_backend(const EmbeddingBackendConfig& cfg);
std::unique_ptr<EntityRecognizer> make_recognizer(const RecognizerConfig& cfg);

/// Config-driven retrieval pipeline: segmentation -> alignment -> attention
/// scoring -> embedding scoring -> entity indexing -> fusion -> expansion.
/// Holds one backend instance per view, so one Pipeline per worker thread.
class Pipeline {
  public:
    explicit Pipeline(PipelineConfig cfg);

    RetrievalResult run(const RetrievalSample& sample);
    RetrievalResult run(const RetrievalSample& sample, int k);

    const PipelineConfig& config() const { return cfg_; }
    AttentionBackend& attention_backend() { return *attention_; }
    EmbeddingBackend& embedding_backend() { return *embedding_; }
    const EntityRecognizer& recognizer() const { return *recognizer_; }

  private:
    PipelineConfig cfg_;
    std::unique_ptr<AttentionBackend> attention_;
    std::unique_ptr<EmbeddingBackend> embedding_;
    std::unique_ptr<EntityRecognizer> recognizer_;
};

/// One-shot convenience wrapper around Pipeline.
RetrievalResult retrieve(const RetrievalSample& sample, const PipelineConfig& cfg);

}  // namespace longdoc
