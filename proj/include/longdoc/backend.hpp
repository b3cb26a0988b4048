#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "longdoc/attention.hpp"
#include "longdoc/corpus.hpp"
#include "longdoc/tokenizer.hpp"

namespace longdoc {

enum class LongContextStrategy { none, chunked, cascading };

const char* long_context_strategy_name(LongContextStrategy s);
LongContextStrategy parse_long_context_strategy(std::string_view name);

struct LongContextConfig {
    LongContextStrategy strategy = LongContextStrategy::none;
    int segment_length = 0;  // 0 = derive from window and query length
    int overlap = 0;         // 0 = 25% of segment length
    int cache_budget = 0;    // cascading retention budget; 0 = window limit
};

struct ForwardResult {
    AttentionTensor attention;
    TokenizedText doc_tokens;  // the tokenization the backend actually used
    int query_token_count = 0;
};

/// Causal-LM attention surface. A backend instance is single-threaded; callers
/// needing parallelism hold one instance per worker.
class AttentionBackend {
  public:
    virtual ~AttentionBackend() = default;

    virtual std::string model_id() const = 0;
    virtual const Tokenizer& tokenizer() const = 0;
    virtual int window_limit() const = 0;
    /// Tokens the prompt template adds on top of document + query.
    virtual int prompt_overhead() const { return 0; }

    /// Cross-attention block (document tokens as keys, query tokens as
    /// queries) for the requested layers, head-resolved.
    virtual ForwardResult forward(const std::string& document_text, const std::string& query_text,
                                  const std::vector<int>& layers) = 0;

    /// Same pass with only the given document tokens visible to the model.
    /// `visible_tokens` are ascending indices into the tokenization of
    /// `document_text`; the returned tensor has one column per visible token.
    virtual AttentionTensor forward_restricted(const std::string& document_text, const std::string& query_text,
                                               const std::vector<int>& layers, const std::vector<int>& visible_tokens) = 0;
};

struct EmbeddingVector {
    std::vector<double> values;
    std::string model_id;

    double norm() const;
};

/// Sentence-embedding surface. Deterministic for a fixed model; batch order is
/// preserved.
class EmbeddingBackend {
  public:
    virtual ~EmbeddingBackend() = default;

    virtual std::string model_id() const = 0;
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
};

/// Full cross-attention pass for a segmented document. Fits in the window:
/// a single forward. Otherwise the long-context strategy decides: `none`
/// raises ContextOverflow, `chunked` assembles the block from a disjoint
/// segment partition, `cascading` fills the columns of retained tokens and
/// leaves evicted columns at zero.
std::pair<AttentionTensor, TokenAlignment> forward_with_attention(AttentionBackend& backend, const SegmentedDocument& doc,
                                                                  const std::string& query, const std::vector<int>& layers,
                                                                  const LongContextConfig& cfg = {});

bool fits_context_window(const AttentionBackend& backend, int doc_token_count, int query_token_count);

}  // namespace longdoc
