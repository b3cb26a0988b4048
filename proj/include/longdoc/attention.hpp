#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

namespace longdoc {

/// Cross-attention weights for the (document tokens x query tokens) block,
/// head-resolved, for a set of selected layers. Values are post-softmax
/// probabilities, so every entry is non-negative and the attention one query
/// token spends on the document slice sums to at most 1.
struct AttentionTensor {
    std::vector<int> layer_ids;  // original layer indices, one per tensor layer
    int head_count = 0;
    int doc_token_count = 0;
    int query_token_count = 0;
    std::vector<double> values;  // [layer][head][doc_token][query_token], row-major

    int layer_count() const { return static_cast<int>(layer_ids.size()); }

    std::size_t index(int layer, int head, int doc_token, int query_token) const {
        return ((static_cast<std::size_t>(layer) * static_cast<std::size_t>(head_count) + static_cast<std::size_t>(head)) *
                    static_cast<std::size_t>(doc_token_count) +
                static_cast<std::size_t>(doc_token)) *
                   static_cast<std::size_t>(query_token_count) +
               static_cast<std::size_t>(query_token);
    }

    double at(int layer, int head, int doc_token, int query_token) const {
        return values[index(layer, head, doc_token, query_token)];
    }
    double& at(int layer, int head, int doc_token, int query_token) {
        return values[index(layer, head, doc_token, query_token)];
    }

    /// Mean over heads at a fixed (layer, doc token, query token).
    double head_average(int layer, int doc_token, int query_token) const;

    static AttentionTensor zeros(std::vector<int> layer_ids, int head_count, int doc_token_count, int query_token_count);

    /// Keeps only the requested layers (must all be present), in the order given.
    AttentionTensor select_layers(const std::vector<int>& layers) const;

    /// Keeps only the given document-token columns (ascending global indices).
    AttentionTensor select_doc_tokens(const std::vector<int>& doc_tokens) const;

    /// Size consistency and non-negativity; throws ErrorKind::shape_mismatch /
    /// ErrorKind::backend on violation.
    void validate() const;
};

/// JSON layout: {"layer_ids": [...], "head_count": H,
///               "tensor": [L][H][T_d][T_q] nested arrays}
AttentionTensor attention_tensor_from_json(const nlohmann::json& j);
nlohmann::json attention_tensor_to_json(const AttentionTensor& tensor);

}  // namespace longdoc
