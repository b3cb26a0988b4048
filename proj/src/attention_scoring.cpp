#include "longdoc/attention_scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "longdoc/cascade_cache.hpp"
#include "longdoc/error.hpp"

namespace longdoc {

namespace {

void check_alignment(const AttentionTensor& attention, const TokenAlignment& alignment) {
    if (alignment.doc_token_count != attention.doc_token_count ||
        alignment.query_token_count != attention.query_token_count) {
        fail(ErrorKind::shape_mismatch,
             "alignment [" + std::to_string(alignment.doc_token_count) + "x" + std::to_string(alignment.query_token_count) +
                 "] does not match tensor [" + std::to_string(attention.doc_token_count) + "x" +
                 std::to_string(attention.query_token_count) + "]");
    }
}

void check_span(const TokenSpan& span, int doc_token_count) {
    if (span.first < 0 || span.last < span.first || span.last >= doc_token_count) {
        fail(ErrorKind::shape_mismatch, "token span [" + std::to_string(span.first) + "," + std::to_string(span.last) +
                                            "] out of range for " + std::to_string(doc_token_count) + " tokens");
    }
}

std::vector<double> layer_scales(const AttentionTensor& attention, bool normalize) {
    std::vector<double> scales(static_cast<std::size_t>(attention.layer_count()), 1.0);
    if (!normalize) return scales;
    for (int l = 0; l < attention.layer_count(); ++l) {
        double layer_max = 0.0;
        for (int t = 0; t < attention.doc_token_count; ++t) {
            for (int q = 0; q < attention.query_token_count; ++q) {
                layer_max = std::max(layer_max, attention.head_average(l, t, q));
            }
        }
        if (layer_max > 0.0) scales[static_cast<std::size_t>(l)] = 1.0 / layer_max;
    }
    return scales;
}

double span_max(const AttentionTensor& attention, const TokenSpan& span, const std::vector<double>& scales) {
    double best = std::numeric_limits<double>::lowest();
    for (int l = 0; l < attention.layer_count(); ++l) {
        const double scale = scales[static_cast<std::size_t>(l)];
        for (int t = span.first; t <= span.last; ++t) {
            for (int q = 0; q < attention.query_token_count; ++q) {
                best = std::max(best, attention.head_average(l, t, q) * scale);
            }
        }
    }
    return best;
}

int window_budget(const AttentionBackend& backend, int query_token_count) {
    int budget = backend.window_limit() - query_token_count - backend.prompt_overhead();
    if (budget < 1) {
        fail(ErrorKind::context_overflow, "query and prompt template alone exceed the context window");
    }
    return budget;
}

ScoreSheet chunked_scores(const RetrievalSample& sample, AttentionBackend& backend, const std::vector<int>& layers,
                          const LongContextConfig& cfg, const AttentionScoringOptions& options,
                          const TokenAlignment& alignment) {
    const int doc_token_count = alignment.doc_token_count;
    const int budget = window_budget(backend, alignment.query_token_count);
    const int segment_length = cfg.segment_length > 0 ? std::min(cfg.segment_length, budget) : budget;
    const int overlap = cfg.overlap > 0 ? std::min(cfg.overlap, segment_length - 1) : segment_length / 4;
    const std::vector<TokenSpan> segments = plan_segments(doc_token_count, segment_length, overlap);

    const std::size_t sentence_count = alignment.sentence_token_spans.size();
    std::vector<int> layer_ids;
    // running max of the raw head-averaged value, per (sentence, layer), plus
    // a per-layer global max for optional normalization
    std::vector<std::vector<double>> sentence_layer_max;
    std::vector<double> layer_max;

    for (const TokenSpan& segment : segments) {
        std::vector<int> visible(static_cast<std::size_t>(segment.length()));
        for (int i = 0; i < segment.length(); ++i) visible[static_cast<std::size_t>(i)] = segment.first + i;
        AttentionTensor part = backend.forward_restricted(sample.document.raw_text, sample.query, layers, visible);
        if (part.query_token_count != alignment.query_token_count || part.doc_token_count != segment.length()) {
            fail(ErrorKind::shape_mismatch, "segment tensor shape does not match the requested segment");
        }
        if (layer_ids.empty()) {
            layer_ids = part.layer_ids;
            sentence_layer_max.assign(sentence_count,
                                      std::vector<double>(layer_ids.size(), std::numeric_limits<double>::lowest()));
            layer_max.assign(layer_ids.size(), 0.0);
        } else if (part.layer_ids != layer_ids) {
            fail(ErrorKind::backend, "backend returned inconsistent layer sets across segments");
        }
        for (std::size_t l = 0; l < layer_ids.size(); ++l) {
            for (int t = 0; t < part.doc_token_count; ++t) {
                for (int q = 0; q < part.query_token_count; ++q) {
                    layer_max[l] = std::max(layer_max[l], part.head_average(static_cast<int>(l), t, q));
                }
            }
        }
        for (std::size_t s = 0; s < sentence_count; ++s) {
            const TokenSpan& span = alignment.sentence_token_spans[s];
            const int lo = std::max(span.first, segment.first);
            const int hi = std::min(span.last, segment.last);
            if (lo > hi) continue;
            for (std::size_t l = 0; l < layer_ids.size(); ++l) {
                double& cell = sentence_layer_max[s][l];
                for (int t = lo; t <= hi; ++t) {
                    for (int q = 0; q < part.query_token_count; ++q) {
                        cell = std::max(cell, part.head_average(static_cast<int>(l), t - segment.first, q));
                    }
                }
            }
        }
    }

    ScoreSheet sheet;
    sheet.kind = ScoreSheet::Kind::attention;
    sheet.layers = layer_ids;
    sheet.scores.reserve(sentence_count);
    for (std::size_t s = 0; s < sentence_count; ++s) {
        double best = std::numeric_limits<double>::lowest();
        for (std::size_t l = 0; l < layer_ids.size(); ++l) {
            double scale = options.normalize_layers && layer_max[l] > 0.0 ? 1.0 / layer_max[l] : 1.0;
            best = std::max(best, sentence_layer_max[s][l] * scale);
        }
        sheet.scores.push_back(best);
    }
    return sheet;
}

ScoreSheet cascading_scores(const RetrievalSample& sample, AttentionBackend& backend, const std::vector<int>& layers,
                            const LongContextConfig& cfg, const AttentionScoringOptions& options,
                            const TokenAlignment& alignment) {
    const int budget = cfg.cache_budget > 0 ? cfg.cache_budget : window_budget(backend, alignment.query_token_count);
    const int ingest = cfg.segment_length > 0 ? cfg.segment_length : std::max(1, budget / 4);
    CascadeRun run = run_cascade(backend, sample.document.raw_text, sample.query, layers, budget, ingest,
                                 alignment.doc_token_count);

    const std::vector<double> scales = layer_scales(run.final_attention, options.normalize_layers);
    const std::size_t sentence_count = alignment.sentence_token_spans.size();
    std::vector<double> scores(sentence_count, std::numeric_limits<double>::quiet_NaN());
    double min_observed = std::numeric_limits<double>::max();
    bool any_scored = false;

    for (std::size_t s = 0; s < sentence_count; ++s) {
        const TokenSpan& span = alignment.sentence_token_spans[s];
        auto lo = std::lower_bound(run.retained.begin(), run.retained.end(), span.first);
        auto hi = std::upper_bound(run.retained.begin(), run.retained.end(), span.last);
        if (lo == hi) continue;  // every token of this sentence was evicted
        double best = std::numeric_limits<double>::lowest();
        for (auto it = lo; it != hi; ++it) {
            const int column = static_cast<int>(it - run.retained.begin());
            for (int l = 0; l < run.final_attention.layer_count(); ++l) {
                for (int q = 0; q < run.final_attention.query_token_count; ++q) {
                    best = std::max(best, run.final_attention.head_average(l, column, q) * scales[static_cast<std::size_t>(l)]);
                }
            }
        }
        scores[s] = best;
        min_observed = std::min(min_observed, best);
        any_scored = true;
    }

    if (!any_scored) min_observed = 0.0;
    for (double& score : scores) {
        if (std::isnan(score)) score = min_observed;
    }

    ScoreSheet sheet;
    sheet.kind = ScoreSheet::Kind::attention;
    sheet.layers = run.final_attention.layer_ids;
    sheet.scores = std::move(scores);
    return sheet;
}

}  // namespace

ScoreSheet sentence_attention_scores(const AttentionTensor& attention, const TokenAlignment& alignment,
                                     const AttentionScoringOptions& options) {
    check_alignment(attention, alignment);
    const std::vector<double> scales = layer_scales(attention, options.normalize_layers);
    ScoreSheet sheet;
    sheet.kind = ScoreSheet::Kind::attention;
    sheet.layers = attention.layer_ids;
    sheet.scores.reserve(alignment.sentence_token_spans.size());
    for (const TokenSpan& span : alignment.sentence_token_spans) {
        check_span(span, attention.doc_token_count);
        sheet.scores.push_back(span_max(attention, span, scales));
    }
    return sheet;
}

std::vector<double> paragraph_attention_scores(const AttentionTensor& attention, const TokenAlignment& alignment,
                                               const AttentionScoringOptions& options) {
    check_alignment(attention, alignment);
    const std::vector<double> scales = layer_scales(attention, options.normalize_layers);
    std::vector<double> scores;
    scores.reserve(alignment.paragraph_token_spans.size());
    for (const TokenSpan& span : alignment.paragraph_token_spans) {
        check_span(span, attention.doc_token_count);
        scores.push_back(span_max(attention, span, scales));
    }
    return scores;
}

std::vector<TokenSpan> plan_segments(int doc_token_count, int segment_length, int overlap) {
    if (doc_token_count < 1) fail(ErrorKind::shape_mismatch, "cannot segment an empty token stream");
    segment_length = std::max(segment_length, 1);
    overlap = std::clamp(overlap, 0, segment_length - 1);
    const int stride = segment_length - overlap;
    std::vector<TokenSpan> segments;
    for (int start = 0;; start += stride) {
        int last = std::min(start + segment_length, doc_token_count) - 1;
        segments.push_back({start, last});
        if (last >= doc_token_count - 1) break;
    }
    return segments;
}

CascadeRun run_cascade(AttentionBackend& backend, const std::string& document_text, const std::string& query_text,
                       const std::vector<int>& layers, int budget, int ingest_segment_length, int doc_token_count) {
    if (ingest_segment_length < 1) fail(ErrorKind::config, "cascade ingest segment length must be >= 1");
    CascadeCache cache(budget);
    CascadeRun run;
    run.doc_token_count = doc_token_count;
    for (int start = 0; start < doc_token_count; start += ingest_segment_length) {
        const int end = std::min(start + ingest_segment_length, doc_token_count);
        for (int t = start; t < end; ++t) cache.append(t);
        run.retained = cache.retained();
        run.final_attention = backend.forward_restricted(document_text, query_text, layers, run.retained);
        if (run.final_attention.doc_token_count != static_cast<int>(run.retained.size())) {
            fail(ErrorKind::shape_mismatch, "backend returned a tensor not matching the retained token set");
        }
        for (std::size_t j = 0; j < run.retained.size(); ++j) {
            double mass = 0.0;
            for (int l = 0; l < run.final_attention.layer_count(); ++l) {
                for (int h = 0; h < run.final_attention.head_count; ++h) {
                    for (int q = 0; q < run.final_attention.query_token_count; ++q) {
                        mass += run.final_attention.at(l, h, static_cast<int>(j), q);
                    }
                }
            }
            cache.add_mass(run.retained[j], mass);
        }
    }
    return run;
}

ScoreSheet score_long_document(const RetrievalSample& sample, AttentionBackend& backend, const std::vector<int>& layers,
                               const LongContextConfig& cfg, const AttentionScoringOptions& options) {
    const SegmentedDocument& doc = sample.document;
    const TokenizedText doc_tokens = backend.tokenizer().tokenize(doc.raw_text);
    const int query_token_count = static_cast<int>(backend.tokenizer().tokenize(sample.query).size());
    const int doc_token_count = static_cast<int>(doc_tokens.size());

    if (fits_context_window(backend, doc_token_count, query_token_count)) {
        ForwardResult fr = backend.forward(doc.raw_text, sample.query, layers);
        TokenAlignment alignment = align_from_tokens(doc, fr.doc_tokens, fr.query_token_count, backend.tokenizer().id());
        return sentence_attention_scores(fr.attention, alignment, options);
    }

    const TokenAlignment alignment = align_from_tokens(doc, doc_tokens, query_token_count, backend.tokenizer().id());
    switch (cfg.strategy) {
        case LongContextStrategy::none:
            fail(ErrorKind::context_overflow, "input of " + std::to_string(doc_token_count + query_token_count) +
                                                  " tokens exceeds the context window of " +
                                                  std::to_string(backend.window_limit()) + " (strategy none)");
        case LongContextStrategy::chunked:
            return chunked_scores(sample, backend, layers, cfg, options, alignment);
        case LongContextStrategy::cascading:
            return cascading_scores(sample, backend, layers, cfg, options, alignment);
    }
    fail(ErrorKind::config, "unknown long-context strategy");
}

}  // namespace longdoc
