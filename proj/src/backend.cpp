#include "longdoc/backend.hpp"

#include <algorithm>
#include <cmath>

#include "longdoc/attention_scoring.hpp"
#include "longdoc/error.hpp"

namespace longdoc {

const char* long_context_strategy_name(LongContextStrategy s) {
    switch (s) {
        case LongContextStrategy::none: return "none";
        case LongContextStrategy::chunked: return "chunked";
        case LongContextStrategy::cascading: return "cascading";
    }
    return "none";
}

LongContextStrategy parse_long_context_strategy(std::string_view name) {
    if (name == "none") return LongContextStrategy::none;
    if (name == "chunked") return LongContextStrategy::chunked;
    if (name == "cascading") return LongContextStrategy::cascading;
    fail(ErrorKind::config, "unknown long-context strategy \"" + std::string(name) + "\"");
}

double EmbeddingVector::norm() const {
    double sum = 0.0;
    for (double v : values) sum += v * v;
    return std::sqrt(sum);
}

bool fits_context_window(const AttentionBackend& backend, int doc_token_count, int query_token_count) {
    return doc_token_count + query_token_count + backend.prompt_overhead() <= backend.window_limit();
}

std::pair<AttentionTensor, TokenAlignment> forward_with_attention(AttentionBackend& backend, const SegmentedDocument& doc,
                                                                  const std::string& query, const std::vector<int>& layers,
                                                                  const LongContextConfig& cfg) {
    const TokenizedText doc_tokens = backend.tokenizer().tokenize(doc.raw_text);
    const int query_token_count = static_cast<int>(backend.tokenizer().tokenize(query).size());
    const int doc_token_count = static_cast<int>(doc_tokens.size());

    if (fits_context_window(backend, doc_token_count, query_token_count)) {
        ForwardResult fr = backend.forward(doc.raw_text, query, layers);
        TokenAlignment alignment = align_from_tokens(doc, fr.doc_tokens, fr.query_token_count, backend.tokenizer().id());
        return {std::move(fr.attention), std::move(alignment)};
    }

    if (cfg.strategy == LongContextStrategy::none) {
        fail(ErrorKind::context_overflow, "input of " + std::to_string(doc_token_count + query_token_count) +
                                              " tokens exceeds the context window of " +
                                              std::to_string(backend.window_limit()) + " (strategy none)");
    }

    TokenAlignment alignment = align_from_tokens(doc, doc_tokens, query_token_count, backend.tokenizer().id());
    AttentionTensor assembled;

    if (cfg.strategy == LongContextStrategy::chunked) {
        int budget = backend.window_limit() - query_token_count - backend.prompt_overhead();
        if (budget < 1) fail(ErrorKind::context_overflow, "query and prompt template alone exceed the context window");
        int segment_length = cfg.segment_length > 0 ? std::min(cfg.segment_length, budget) : budget;
        // disjoint partition: each column is produced by exactly one pass
        bool first = true;
        for (const TokenSpan& segment : plan_segments(doc_token_count, segment_length, 0)) {
            std::vector<int> visible(static_cast<std::size_t>(segment.length()));
            for (int i = 0; i < segment.length(); ++i) visible[static_cast<std::size_t>(i)] = segment.first + i;
            AttentionTensor part = backend.forward_restricted(doc.raw_text, query, layers, visible);
            if (first) {
                assembled = AttentionTensor::zeros(part.layer_ids, part.head_count, doc_token_count, part.query_token_count);
                first = false;
            }
            for (int l = 0; l < part.layer_count(); ++l) {
                for (int h = 0; h < part.head_count; ++h) {
                    for (int t = 0; t < part.doc_token_count; ++t) {
                        for (int q = 0; q < part.query_token_count; ++q) {
                            assembled.at(l, h, segment.first + t, q) = part.at(l, h, t, q);
                        }
                    }
                }
            }
        }
    } else {
        int budget = cfg.cache_budget;
        if (budget <= 0) {
            budget = backend.window_limit() - query_token_count - backend.prompt_overhead();
            if (budget < 1) fail(ErrorKind::context_overflow, "query and prompt template alone exceed the context window");
        }
        int ingest = cfg.segment_length > 0 ? cfg.segment_length : std::max(1, budget / 4);
        CascadeRun run = run_cascade(backend, doc.raw_text, query, layers, budget, ingest, doc_token_count);
        assembled = AttentionTensor::zeros(run.final_attention.layer_ids, run.final_attention.head_count, doc_token_count,
                                           run.final_attention.query_token_count);
        for (std::size_t j = 0; j < run.retained.size(); ++j) {
            for (int l = 0; l < assembled.layer_count(); ++l) {
                for (int h = 0; h < assembled.head_count; ++h) {
                    for (int q = 0; q < assembled.query_token_count; ++q) {
                        assembled.at(l, h, run.retained[j], q) = run.final_attention.at(l, h, static_cast<int>(j), q);
                    }
                }
            }
        }
    }

    return {std::move(assembled), std::move(alignment)};
}

}  // namespace longdoc
