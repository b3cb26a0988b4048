#include "longdoc/attention.hpp"

#include <algorithm>

#include "longdoc/error.hpp"

namespace longdoc {

double AttentionTensor::head_average(int layer, int doc_token, int query_token) const {
    double sum = 0.0;
    for (int h = 0; h < head_count; ++h) sum += at(layer, h, doc_token, query_token);
    return sum / static_cast<double>(head_count);
}

AttentionTensor AttentionTensor::zeros(std::vector<int> ids, int heads, int doc_tokens, int query_tokens) {
    AttentionTensor t;
    t.layer_ids = std::move(ids);
    t.head_count = heads;
    t.doc_token_count = doc_tokens;
    t.query_token_count = query_tokens;
    t.values.assign(t.layer_ids.size() * static_cast<std::size_t>(heads) * static_cast<std::size_t>(doc_tokens) *
                        static_cast<std::size_t>(query_tokens),
                    0.0);
    return t;
}

AttentionTensor AttentionTensor::select_layers(const std::vector<int>& layers) const {
    AttentionTensor out = zeros(layers, head_count, doc_token_count, query_token_count);
    for (std::size_t li = 0; li < layers.size(); ++li) {
        auto it = std::find(layer_ids.begin(), layer_ids.end(), layers[li]);
        if (it == layer_ids.end()) {
            fail(ErrorKind::backend, "layer " + std::to_string(layers[li]) + " not present in attention tensor");
        }
        int src = static_cast<int>(it - layer_ids.begin());
        std::size_t block = static_cast<std::size_t>(head_count) * static_cast<std::size_t>(doc_token_count) *
                            static_cast<std::size_t>(query_token_count);
        std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(src) * block),
                    static_cast<std::ptrdiff_t>(block),
                    out.values.begin() + static_cast<std::ptrdiff_t>(li * block));
    }
    return out;
}

AttentionTensor AttentionTensor::select_doc_tokens(const std::vector<int>& doc_tokens) const {
    AttentionTensor out = zeros(layer_ids, head_count, static_cast<int>(doc_tokens.size()), query_token_count);
    for (int l = 0; l < layer_count(); ++l) {
        for (int h = 0; h < head_count; ++h) {
            for (std::size_t ti = 0; ti < doc_tokens.size(); ++ti) {
                int t = doc_tokens[ti];
                if (t < 0 || t >= doc_token_count) {
                    fail(ErrorKind::backend, "doc token " + std::to_string(t) + " out of tensor range");
                }
                for (int q = 0; q < query_token_count; ++q) {
                    out.at(l, h, static_cast<int>(ti), q) = at(l, h, t, q);
                }
            }
        }
    }
    return out;
}

void AttentionTensor::validate() const {
    std::size_t expected = layer_ids.size() * static_cast<std::size_t>(head_count) *
                           static_cast<std::size_t>(doc_token_count) * static_cast<std::size_t>(query_token_count);
    if (values.size() != expected) {
        fail(ErrorKind::shape_mismatch, "attention tensor has " + std::to_string(values.size()) + " values, expected " +
                                            std::to_string(expected));
    }
    if (head_count <= 0 || doc_token_count <= 0 || query_token_count <= 0 || layer_ids.empty()) {
        fail(ErrorKind::shape_mismatch, "attention tensor has an empty axis");
    }
    for (double v : values) {
        if (!(v >= 0.0)) fail(ErrorKind::backend, "attention tensor contains a negative or non-finite entry");
    }
}

AttentionTensor attention_tensor_from_json(const nlohmann::json& j) {
    AttentionTensor t;
    if (!j.contains("tensor") || !j["tensor"].is_array()) fail(ErrorKind::config, "fixture tensor missing \"tensor\" array");
    const auto& nested = j["tensor"];
    if (j.contains("layer_ids")) {
        t.layer_ids = j["layer_ids"].get<std::vector<int>>();
    } else {
        for (std::size_t i = 0; i < nested.size(); ++i) t.layer_ids.push_back(static_cast<int>(i));
    }
    if (nested.size() != t.layer_ids.size()) fail(ErrorKind::config, "tensor layer count does not match layer_ids");
    if (nested.empty() || nested[0].empty() || nested[0][0].empty() || nested[0][0][0].empty()) {
        fail(ErrorKind::config, "tensor must be a non-empty 4-D nested array");
    }
    t.head_count = static_cast<int>(nested[0].size());
    t.doc_token_count = static_cast<int>(nested[0][0].size());
    t.query_token_count = static_cast<int>(nested[0][0][0].size());
    if (j.contains("head_count") && j["head_count"].get<int>() != t.head_count) {
        fail(ErrorKind::config, "fixture head_count does not match tensor");
    }
    t.values.reserve(t.layer_ids.size() * static_cast<std::size_t>(t.head_count) *
                     static_cast<std::size_t>(t.doc_token_count) * static_cast<std::size_t>(t.query_token_count));
    for (const auto& layer : nested) {
        if (static_cast<int>(layer.size()) != t.head_count) fail(ErrorKind::config, "ragged tensor: head axis");
        for (const auto& head : layer) {
            if (static_cast<int>(head.size()) != t.doc_token_count) fail(ErrorKind::config, "ragged tensor: doc axis");
            for (const auto& row : head) {
                if (static_cast<int>(row.size()) != t.query_token_count) fail(ErrorKind::config, "ragged tensor: query axis");
                for (const auto& v : row) {
                    if (!v.is_number()) fail(ErrorKind::config, "tensor entries must be numbers");
                    t.values.push_back(v.get<double>());
                }
            }
        }
    }
    t.validate();
    return t;
}

nlohmann::json attention_tensor_to_json(const AttentionTensor& tensor) {
    nlohmann::json layers = nlohmann::json::array();
    for (int l = 0; l < tensor.layer_count(); ++l) {
        nlohmann::json heads = nlohmann::json::array();
        for (int h = 0; h < tensor.head_count; ++h) {
            nlohmann::json rows = nlohmann::json::array();
            for (int t = 0; t < tensor.doc_token_count; ++t) {
                nlohmann::json row = nlohmann::json::array();
                for (int q = 0; q < tensor.query_token_count; ++q) row.push_back(tensor.at(l, h, t, q));
                rows.push_back(std::move(row));
            }
            heads.push_back(std::move(rows));
        }
        layers.push_back(std::move(heads));
    }
    return nlohmann::json{{"layer_ids", tensor.layer_ids}, {"head_count", tensor.head_count}, {"tensor", std::move(layers)}};
}

}  // namespace longdoc
