#include "longdoc/pipeline.hpp"

#include "longdoc/attention_scoring.hpp"
#include "longdoc/embedding_scoring.hpp"
#include "longdoc/error.hpp"
#include "longdoc/http_backend.hpp"
#include "longdoc/scripted_backend.hpp"
#include "longdoc/tokenizer.hpp"

namespace longdoc {

std::unique_ptr<AttentionBackend> make_attention_backend(const AttentionBackendConfig& cfg) {
    if (cfg.kind == "scripted") {
        return std::make_unique<ScriptedAttentionBackend>(ScriptedAttentionBackend::from_file(cfg.fixture));
    }
    if (cfg.kind == "http") {
        return std::make_unique<HttpAttentionBackend>(cfg.url, cfg.prompt_template);
    }
    fail(ErrorKind::config, "unknown attention backend \"" + cfg.kind + "\"");
}

std::unique_ptr<EmbeddingBackend> make_embedding_backend(const EmbeddingBackendConfig& cfg) {
    if (cfg.kind == "hashed") return std::make_unique<HashedEmbeddingBackend>(cfg.dim);
    if (cfg.kind == "scripted") {
        return std::make_unique<ScriptedEmbeddingBackend>(ScriptedEmbeddingBackend::from_file(cfg.fixture));
    }
    if (cfg.kind == "http") return std::make_unique<HttpEmbeddingBackend>(cfg.url);
    fail(ErrorKind::config, "unknown embedding backend \"" + cfg.kind + "\"");
}

std::unique_ptr<EntityRecognizer> make_recognizer(const RecognizerConfig& cfg) {
    if (cfg.kind == "capitalized") return std::make_unique<CapitalizedSpanRecognizer>();
    fail(ErrorKind::config, "unknown entity recognizer \"" + cfg.kind + "\"");
}

Pipeline::Pipeline(PipelineConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    if (cfg_.ablation != Ablation::embedding_only) attention_ = make_attention_backend(cfg_.attention);
    if (cfg_.ablation != Ablation::attention_only) embedding_ = make_embedding_backend(cfg_.embedding);
    recognizer_ = make_recognizer(cfg_.recognizer);
}

RetrievalResult Pipeline::run(const RetrievalSample& sample) {
    return run(sample, cfg_.k);
}

RetrievalResult Pipeline::run(const RetrievalSample& sample, int k) {
    const SegmentedDocument& doc = sample.document;
    EntityIndex index;
    if (cfg_.ablation != Ablation::no_entity) index = extract_entities(doc, *recognizer_);

    ScoreSheet attention_sheet;
    ScoreSheet embedding_sheet;
    EntityScores entity_attention;
    EntityScores entity_embedding;

    if (cfg_.ablation != Ablation::embedding_only) {
        AttentionScoringOptions options;
        options.normalize_layers = cfg_.attention.normalize_layers;
        attention_sheet =
            score_long_document(sample, *attention_, cfg_.attention.layers, cfg_.attention.long_context, options);
        if (cfg_.ablation != Ablation::no_entity) entity_attention = entity_scores(index, attention_sheet);
    }
    if (cfg_.ablation != Ablation::attention_only) {
        EmbeddingScoringOptions options;
        options.batch_size = cfg_.embedding.batch_size;
        embedding_sheet = sentence_embedding_scores(doc, sample.query, *embedding_, options);
        if (cfg_.ablation != Ablation::no_entity) entity_embedding = entity_scores(index, embedding_sheet);
    }

    Selection selection =
        select_topk(attention_sheet, embedding_sheet, entity_attention, entity_embedding, index, k, cfg_.ablation);
    return expand_to_paragraphs(selection, doc, index);
}

RetrievalResult retrieve(const RetrievalSample& sample, const PipelineConfig& cfg) {
    Pipeline pipeline(cfg);
    return pipeline.run(sample);
}

}  // namespace longdoc
