#pragma once

#include <string>
#include <vector>

#include "longdoc/attention.hpp"
#include "longdoc/backend.hpp"
#include "longdoc/corpus.hpp"
#include "longdoc/score_sheet.hpp"

namespace longdoc {

struct AttentionScoringOptions {
    /// Rescale each layer's head-averaged map by its own maximum before the
    /// cross-layer max. Off by default: the raw head-averaged values are maxed
    /// across layers as-is.
    bool normalize_layers = false;
};

/// Per-sentence attention score: max over layers, sentence tokens, and query
/// tokens of the head-averaged attention weight.
ScoreSheet sentence_attention_scores(const AttentionTensor& attention, const TokenAlignment& alignment,
                                     const AttentionScoringOptions& options = {});

/// Same aggregation over paragraph token spans (used for rank profiling).
std::vector<double> paragraph_attention_scores(const AttentionTensor& attention, const TokenAlignment& alignment,
                                               const AttentionScoringOptions& options = {});

/// Overlapping token segments covering [0, doc_token_count). With
/// overlap >= the longest sentence, every sentence is fully inside at least
/// one segment.
std::vector<TokenSpan> plan_segments(int doc_token_count, int segment_length, int overlap);

/// Result of streaming a document through a CascadeCache: the retained token
/// set and the final pass's attention over it.
struct CascadeRun {
    AttentionTensor final_attention;  // columns follow `retained`
    std::vector<int> retained;        // ascending global token indices
    int doc_token_count = 0;
};

CascadeRun run_cascade(AttentionBackend& backend, const std::string& document_text, const std::string& query_text,
                       const std::vector<int>& layers, int budget, int ingest_segment_length, int doc_token_count);

/// Attention scoring for documents of any length. Inputs that fit the context
/// window take the single-pass path regardless of strategy; longer inputs are
/// scored per the configured strategy (`none` raises ContextOverflow).
ScoreSheet score_long_document(const RetrievalSample& sample, AttentionBackend& backend, const std::vector<int>& layers,
                               const LongContextConfig& cfg, const AttentionScoringOptions& options = {});

}  // namespace longdoc
