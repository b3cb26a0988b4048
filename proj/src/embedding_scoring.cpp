#include "longdoc/embedding_scoring.hpp"

#include <algorithm>
#include <cmath>

#include "longdoc/error.hpp"

namespace longdoc {

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        fail(ErrorKind::shape_mismatch, "embedding dimensions differ: " + std::to_string(a.size()) + " vs " +
                                            std::to_string(b.size()));
    }
    double dot = 0.0;
    double norm_a = 0.0;
    double norm_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        norm_a += a[i] * a[i];
        norm_b += b[i] * b[i];
    }
    if (norm_a == 0.0 || norm_b == 0.0) fail(ErrorKind::zero_norm, "cosine similarity of a zero-norm vector");
    return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

ScoreSheet sentence_embedding_scores(const SegmentedDocument& doc, const std::string& query, EmbeddingBackend& backend,
                                     const EmbeddingScoringOptions& options) {
    if (doc.sentences.empty()) fail(ErrorKind::empty_document, "document has no sentences to score");
    const int batch_size = std::max(options.batch_size, 1);

    std::vector<EmbeddingVector> query_embedding = backend.embed({query});
    if (query_embedding.size() != 1) fail(ErrorKind::backend, "embedding backend returned a wrong batch size");

    ScoreSheet sheet;
    sheet.kind = ScoreSheet::Kind::embedding;
    sheet.model_id = backend.model_id();
    sheet.scores.reserve(doc.sentences.size());

    std::vector<std::string> batch;
    batch.reserve(static_cast<std::size_t>(batch_size));
    auto flush = [&] {
        if (batch.empty()) return;
        std::vector<EmbeddingVector> vectors = backend.embed(batch);
        if (vectors.size() != batch.size()) fail(ErrorKind::backend, "embedding backend returned a wrong batch size");
        for (const EmbeddingVector& v : vectors) {
            sheet.scores.push_back(cosine_similarity(v.values, query_embedding[0].values));
        }
        batch.clear();
    };
    for (const Sentence& s : doc.sentences) {
        batch.emplace_back(doc.sentence_text(s.index));
        if (static_cast<int>(batch.size()) >= batch_size) flush();
    }
    flush();
    return sheet;
}

}  // namespace longdoc
