#pragma once

#include <array>
#include <span>
#include <vector>

#include <json.hpp>

#include "longdoc/attention_scoring.hpp"
#include "longdoc/backend.hpp"
#include "longdoc/corpus.hpp"

namespace longdoc {

/// Mean rank of the gold paragraph per (layer, subquery position), averaged
/// over samples that have that subquery.
struct LayerProfile {
    std::vector<int> layer_ids;
    std::vector<std::vector<double>> ranks;  // [layer][subquery]
    std::vector<int> subquery_sample_counts;
    std::vector<int> best_layer_per_subquery;  // layer id with the smallest mean rank
    int sample_count = 0;

    int subquery_count() const { return static_cast<int>(subquery_sample_counts.size()); }
};

/// Scores every paragraph with each layer in isolation, ranks paragraphs
/// descending (ties to the lower index), and records the rank of the
/// best-ranked gold paragraph. Every sample must carry subquery
/// decompositions; throws ErrorKind::missing_subqueries otherwise.
LayerProfile profile_layers(const std::vector<RetrievalSample>& samples, AttentionBackend& backend,
                            const std::vector<int>& layers);

/// Rank (1-based) of the best-ranked gold paragraph under descending scores
/// with ties broken to the lower paragraph index.
int gold_rank(const std::vector<double>& paragraph_scores, const std::vector<int>& gold_paragraphs);

/// Least-squares degree-4 polynomial over x = 0..n-1; coefficients returned
/// lowest-degree first. Throws ErrorKind::insufficient_points for n < 5.
std::array<double, 5> quartic_fit(const std::vector<double>& values);

double polynomial_residual(const std::vector<double>& values, std::span<const double> coefficients);

/// Deduplicated, sorted union of the per-subquery best layers.
std::vector<int> select_layers(const LayerProfile& profile);

/// Per layer, the number of heads whose global argmax over (doc token, query
/// token) falls inside the needle token span. Argmax ties resolve to the
/// lexicographically lowest (doc token, query token).
std::vector<int> needle_head_count(const AttentionTensor& attention, const TokenSpan& needle_token_span);

nlohmann::json layer_profile_to_json(const LayerProfile& profile);

}  // namespace longdoc
