#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "longdoc/corpus.hpp"

namespace longdoc {

/// Scripted-backend attention fixture: per (layer, head, query token) a
/// random positive column over document tokens normalized to sum 1, with an
/// optional dominant spike planted on one sentence.
struct AttentionFixtureOptions {
    std::vector<int> layer_ids = {0};
    int head_count = 2;
    int window_limit = 8192;
    int prompt_overhead = 0;
    int spike_sentence = -1;   // -1 = no spike
    int spike_layer = -1;      // -1 = plant in every layer
    double spike_share = 0.9;  // column mass at the spike token
    std::uint64_t seed = 0;
};

nlohmann::json make_attention_fixture(const SegmentedDocument& doc, const std::string& query,
                                      const AttentionFixtureOptions& options);

/// Scripted embedding fixture: unit vectors per sentence text plus the query,
/// with one sentence optionally aligned to the query at a chosen cosine.
struct EmbeddingFixtureOptions {
    int dim = 16;
    int gold_sentence = -1;
    double gold_cosine = 0.95;
    std::uint64_t seed = 0;
};

nlohmann::json make_embedding_fixture(const SegmentedDocument& doc, const std::string& query,
                                      const EmbeddingFixtureOptions& options);

/// Needle-in-a-haystack construction: filler paragraphs with one needle
/// paragraph inserted at each depth.
struct HaystackSpec {
    std::string filler;
    std::string needle;
    std::string query;
    std::vector<double> depths;  // 0.0 = document start, 1.0 = end
    int filler_paragraphs = 20;

    static HaystackSpec from_json(const nlohmann::json& j);
    static HaystackSpec from_file(const std::string& path);
};

struct HaystackDocument {
    SegmentedDocument document;
    int needle_paragraph = -1;
    double depth = 0.0;
};

std::vector<HaystackDocument> build_haystack(const HaystackSpec& spec,
                                             const SegmentationRules& rules = SegmentationRules::defaults());

/// Attention fixture covering every haystack depth, with `spike_heads` heads
/// per layer putting their global argmax inside the needle span.
struct NiahFixtureOptions {
    std::vector<int> layer_ids = {0};
    int head_count = 8;
    int spike_heads = 3;
    int window_limit = 1 << 20;
    double spike_share = 0.9;
    std::uint64_t seed = 0;
};

nlohmann::json make_niah_fixture(const HaystackSpec& spec, const NiahFixtureOptions& options,
                                 const SegmentationRules& rules = SegmentationRules::defaults());

}  // namespace longdoc
