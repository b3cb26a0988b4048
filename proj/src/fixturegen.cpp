#include "longdoc/fixturegen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>

#include "longdoc/error.hpp"
#include "longdoc/tokenizer.hpp"

namespace longdoc {

namespace {

using nlohmann::json;

std::vector<double> random_unit_vector(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(dim));
    double norm = 0.0;
    do {
        norm = 0.0;
        for (double& x : v) {
            x = normal(rng);
            norm += x * x;
        }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

// one normalized attention column over doc tokens, optional spike at a token
std::vector<double> attention_column(std::mt19937_64& rng, int doc_tokens, int spike_token, double spike_share) {
    std::uniform_real_distribution<double> uniform(0.01, 1.0);
    std::vector<double> w(static_cast<std::size_t>(doc_tokens));
    double sum = 0.0;
    for (double& x : w) {
        x = uniform(rng);
        sum += x;
    }
    if (spike_token >= 0) {
        double rest = sum - w[static_cast<std::size_t>(spike_token)];
        w[static_cast<std::size_t>(spike_token)] = rest * spike_share / (1.0 - spike_share);
        sum = rest + w[static_cast<std::size_t>(spike_token)];
    }
    for (double& x : w) x /= sum;
    return w;
}

json tensor_entry(std::mt19937_64& rng, const std::string& document, const std::string& query,
                  const std::vector<int>& layer_ids, int head_count, int doc_tokens, int query_tokens,
                  const std::function<int(int layer, int head)>& spike_token, double spike_share) {
    json layers = json::array();
    for (std::size_t li = 0; li < layer_ids.size(); ++li) {
        json heads = json::array();
        for (int h = 0; h < head_count; ++h) {
            int spike = spike_token(layer_ids[li], h);
            // generate per query token columns, then transpose to [t][tq]
            std::vector<std::vector<double>> columns;
            columns.reserve(static_cast<std::size_t>(query_tokens));
            for (int q = 0; q < query_tokens; ++q) {
                columns.push_back(attention_column(rng, doc_tokens, spike, spike_share));
            }
            json rows = json::array();
            for (int t = 0; t < doc_tokens; ++t) {
                json row = json::array();
                for (int q = 0; q < query_tokens; ++q) row.push_back(columns[static_cast<std::size_t>(q)][static_cast<std::size_t>(t)]);
                rows.push_back(std::move(row));
            }
            heads.push_back(std::move(rows));
        }
        layers.push_back(std::move(heads));
    }
    return json{{"document", document}, {"query", query}, {"layer_ids", layer_ids}, {"head_count", head_count},
                {"tensor", std::move(layers)}};
}

}  // namespace

json make_attention_fixture(const SegmentedDocument& doc, const std::string& query, const AttentionFixtureOptions& options) {
    WordTokenizer tokenizer;
    TokenAlignment alignment = align_tokens(doc, query, tokenizer);
    if (options.spike_sentence >= static_cast<int>(alignment.sentence_token_spans.size())) {
        fail(ErrorKind::config, "spike sentence index out of range");
    }

    int spike_token = -1;
    if (options.spike_sentence >= 0) {
        const TokenSpan& span = alignment.sentence_token_spans[static_cast<std::size_t>(options.spike_sentence)];
        spike_token = (span.first + span.last) / 2;
    }

    std::mt19937_64 rng(options.seed);
    auto spike_for = [&](int layer, int /*head*/) {
        if (spike_token < 0) return -1;
        if (options.spike_layer >= 0 && layer != options.spike_layer) return -1;
        return spike_token;
    };
    json entry = tensor_entry(rng, doc.raw_text, query, options.layer_ids, options.head_count, alignment.doc_token_count,
                              alignment.query_token_count, spike_for, options.spike_share);
    return json{{"model_id", "scripted-attention"},
                {"window_limit", options.window_limit},
                {"prompt_overhead", options.prompt_overhead},
                {"entries", json::array({std::move(entry)})}};
}

json make_embedding_fixture(const SegmentedDocument& doc, const std::string& query, const EmbeddingFixtureOptions& options) {
    if (options.gold_sentence >= static_cast<int>(doc.sentences.size())) {
        fail(ErrorKind::config, "gold sentence index out of range");
    }
    std::mt19937_64 rng(options.seed);
    std::vector<double> query_vec = random_unit_vector(rng, options.dim);

    json vectors = json::object();
    vectors[query] = query_vec;
    for (const Sentence& s : doc.sentences) {
        std::string text(doc.sentence_text(s.index));
        if (s.index == options.gold_sentence) {
            // gold_cosine * q plus an orthogonal remainder
            std::vector<double> r = random_unit_vector(rng, options.dim);
            double projection = dot(r, query_vec);
            double norm = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) {
                r[i] -= projection * query_vec[i];
                norm += r[i] * r[i];
            }
            norm = std::sqrt(norm);
            std::vector<double> v(static_cast<std::size_t>(options.dim));
            double ortho = std::sqrt(std::max(0.0, 1.0 - options.gold_cosine * options.gold_cosine));
            for (std::size_t i = 0; i < v.size(); ++i) {
                v[i] = options.gold_cosine * query_vec[i] + (norm > 0.0 ? ortho * r[i] / norm : 0.0);
            }
            vectors[text] = v;
        } else if (!vectors.contains(text)) {
            // keep background sentences well away from the query direction
            std::vector<double> v;
            do {
                v = random_unit_vector(rng, options.dim);
            } while (std::abs(dot(v, query_vec)) > 0.5);
            vectors[text] = v;
        }
    }
    return json{{"model_id", "scripted-embedding"}, {"vectors", std::move(vectors)}};
}

HaystackSpec HaystackSpec::from_json(const json& j) {
    HaystackSpec spec;
    if (!j.contains("filler") || !j.contains("needle") || !j.contains("query")) {
        fail(ErrorKind::config, "haystack spec needs \"filler\", \"needle\", and \"query\"");
    }
    spec.filler = j["filler"].get<std::string>();
    spec.needle = j["needle"].get<std::string>();
    spec.query = j["query"].get<std::string>();
    if (j.contains("depths")) spec.depths = j["depths"].get<std::vector<double>>();
    if (spec.depths.empty()) spec.depths = {0.0, 0.25, 0.5, 0.75, 1.0};
    spec.filler_paragraphs = j.value("filler_paragraphs", spec.filler_paragraphs);
    if (spec.filler_paragraphs < 1) fail(ErrorKind::config, "filler_paragraphs must be >= 1");
    for (double d : spec.depths) {
        if (d < 0.0 || d > 1.0) fail(ErrorKind::config, "haystack depths must lie in [0, 1]");
    }
    return spec;
}

HaystackSpec HaystackSpec::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::config, "cannot open haystack spec " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(ErrorKind::config, std::string("invalid haystack spec: ") + e.what());
    }
    return from_json(j);
}

std::vector<HaystackDocument> build_haystack(const HaystackSpec& spec, const SegmentationRules& rules) {
    std::vector<HaystackDocument> out;
    for (double depth : spec.depths) {
        int position = static_cast<int>(std::lround(depth * static_cast<double>(spec.filler_paragraphs)));
        std::vector<std::string> paragraphs;
        paragraphs.reserve(static_cast<std::size_t>(spec.filler_paragraphs) + 1);
        for (int i = 0; i < spec.filler_paragraphs; ++i) {
            if (i == position) paragraphs.push_back(spec.needle);
            paragraphs.push_back(spec.filler);
        }
        if (position >= spec.filler_paragraphs) paragraphs.push_back(spec.needle);
        HaystackDocument hd;
        hd.depth = depth;
        hd.needle_paragraph = std::min(position, spec.filler_paragraphs);
        hd.document = document_from_paragraphs("haystack-" + std::to_string(depth), paragraphs, rules);
        out.push_back(std::move(hd));
    }
    return out;
}

json make_niah_fixture(const HaystackSpec& spec, const NiahFixtureOptions& options, const SegmentationRules& rules) {
    if (options.spike_heads < 0 || options.spike_heads > options.head_count) {
        fail(ErrorKind::config, "spike_heads must lie in [0, head_count]");
    }
    WordTokenizer tokenizer;
    std::mt19937_64 rng(options.seed);
    json entries = json::array();
    for (const HaystackDocument& hd : build_haystack(spec, rules)) {
        TokenAlignment alignment = align_tokens(hd.document, spec.query, tokenizer);
        const TokenSpan needle = alignment.paragraph_token_spans[static_cast<std::size_t>(hd.needle_paragraph)];
        const int inside = (needle.first + needle.last) / 2;
        // a decoy argmax outside the needle for the remaining heads
        const int outside = needle.first > 0 ? 0 : alignment.doc_token_count - 1;
        auto spike_for = [&](int /*layer*/, int head) { return head < options.spike_heads ? inside : outside; };
        entries.push_back(tensor_entry(rng, hd.document.raw_text, spec.query, options.layer_ids, options.head_count,
                                       alignment.doc_token_count, alignment.query_token_count, spike_for,
                                       options.spike_share));
    }
    return json{{"model_id", "scripted-attention"},
                {"window_limit", options.window_limit},
                {"prompt_overhead", 0},
                {"entries", std::move(entries)}};
}

}  // namespace longdoc
