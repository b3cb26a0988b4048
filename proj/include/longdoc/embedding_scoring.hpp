#pragma once

#include <span>
#include <string>

#include "longdoc/backend.hpp"
#include "longdoc/corpus.hpp"
#include "longdoc/score_sheet.hpp"

namespace longdoc {

/// Throws ErrorKind::zero_norm when either vector has zero norm.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

struct EmbeddingScoringOptions {
    int batch_size = 32;  // results are batch-size-invariant
};

/// Per-sentence cosine similarity between each sentence embedding and the
/// query embedding. Sentences are embedded without surrounding context.
ScoreSheet sentence_embedding_scores(const SegmentedDocument& doc, const std::string& query, EmbeddingBackend& backend,
                                     const EmbeddingScoringOptions& options = {});

}  // namespace longdoc
