#pragma once

#include <random>
#include <string>
#include <vector>

#include "longdoc/attention.hpp"
#include "longdoc/corpus.hpp"

namespace testsupport {

// [layer][head][doc_token][query_token]; tests generate nested data first and
// convert, so oracle computations never touch the library's stride math
using Tensor4 = std::vector<std::vector<std::vector<std::vector<double>>>>;

inline longdoc::AttentionTensor to_tensor(const Tensor4& nested, std::vector<int> layer_ids = {}) {
    longdoc::AttentionTensor t;
    if (layer_ids.empty()) {
        for (std::size_t l = 0; l < nested.size(); ++l) layer_ids.push_back(static_cast<int>(l));
    }
    t.layer_ids = layer_ids;
    t.head_count = static_cast<int>(nested[0].size());
    t.doc_token_count = static_cast<int>(nested[0][0].size());
    t.query_token_count = static_cast<int>(nested[0][0][0].size());
    for (const auto& layer : nested) {
        for (const auto& head : layer) {
            for (const auto& row : head) {
                for (double v : row) t.values.push_back(v);
            }
        }
    }
    return t;
}

inline Tensor4 zeros_nested(int layers, int heads, int doc_tokens, int query_tokens) {
    return Tensor4(static_cast<std::size_t>(layers),
                   std::vector<std::vector<std::vector<double>>>(
                       static_cast<std::size_t>(heads),
                       std::vector<std::vector<double>>(static_cast<std::size_t>(doc_tokens),
                                                        std::vector<double>(static_cast<std::size_t>(query_tokens), 0.0))));
}

// entries positive, each (l, h, tq) column over doc tokens sums to 1
inline Tensor4 random_tensor(std::mt19937_64& rng, int layers, int heads, int doc_tokens, int query_tokens) {
    std::uniform_real_distribution<double> uniform(0.001, 1.0);
    Tensor4 t = zeros_nested(layers, heads, doc_tokens, query_tokens);
    for (int l = 0; l < layers; ++l) {
        for (int h = 0; h < heads; ++h) {
            for (int q = 0; q < query_tokens; ++q) {
                double sum = 0.0;
                for (int d = 0; d < doc_tokens; ++d) {
                    double v = uniform(rng);
                    t[l][h][d][q] = v;
                    sum += v;
                }
                for (int d = 0; d < doc_tokens; ++d) t[l][h][d][q] /= sum;
            }
        }
    }
    return t;
}

// Deterministic document text: each sentence is `words` unique words plus a
// period, e.g. "p0s0w0 p0s0w1." Paragraphs are blank-line separated.
inline std::string document_text(const std::vector<std::vector<int>>& paragraph_sentence_words,
                                 const std::string& prefix = "") {
    std::string text;
    for (std::size_t p = 0; p < paragraph_sentence_words.size(); ++p) {
        if (p > 0) text += "\n\n";
        for (std::size_t s = 0; s < paragraph_sentence_words[p].size(); ++s) {
            if (s > 0) text += " ";
            for (int w = 0; w < paragraph_sentence_words[p][s]; ++w) {
                if (w > 0) text += " ";
                text += prefix + "p" + std::to_string(p) + "s" + std::to_string(s) + "w" + std::to_string(w);
            }
            text += ".";
        }
    }
    return text;
}

inline longdoc::SegmentedDocument make_document(const std::vector<std::vector<int>>& paragraph_sentence_words,
                                                const std::string& prefix = "") {
    return longdoc::segment_document(document_text(paragraph_sentence_words, prefix), longdoc::SegmentationRules::defaults(),
                                     "doc-" + prefix);
}

}  // namespace testsupport
