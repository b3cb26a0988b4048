#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "longdoc/corpus.hpp"
#include "longdoc/entity.hpp"
#include "longdoc/score_sheet.hpp"

namespace longdoc {

enum class Ablation { none, attention_only, embedding_only, no_entity };

const char* ablation_name(Ablation a);
Ablation parse_ablation(std::string_view name);

/// Per-view pick quotas for top-k selection. The attention view takes
/// ceil(k/2) picks and the embedding view floor(k/2); an ablated view's quota
/// transfers to the active one so exactly k picks per category are still made.
struct ViewQuotas {
    int attention = 0;
    int embedding = 0;
};

ViewQuotas view_quotas(int k, Ablation ablation);

struct ViewPicks {
    std::vector<int> attention_sentences;
    std::vector<int> embedding_sentences;
    std::vector<int> attention_entities;  // entity ids
    std::vector<int> embedding_entities;
};

struct Selection {
    std::vector<int> sentences;  // ascending union of the two views
    std::vector<int> entities;   // ascending entity ids
    ViewPicks picks;
    int k = 0;
};

/// Rank-based top-k selection over both views. Ties break to the lower
/// sentence index / lexicographically smaller canonical form. Scores are never
/// numerically mixed across views.
Selection select_topk(const ScoreSheet& attention_sheet, const ScoreSheet& embedding_sheet,
                      const EntityScores& entity_attention, const EntityScores& entity_embedding, const EntityIndex& index,
                      int k, Ablation ablation = Ablation::none);

struct RetrievalResult {
    std::vector<int> paragraphs;        // document order, deduplicated
    std::vector<int> sentences;         // selected sentences, ascending
    std::vector<std::string> entities;  // selected canonical forms, sorted
    ViewPicks picks;
    int k = 0;
};

/// Union of the paragraphs of selected sentences with every paragraph
/// containing a selected entity, in document order.
RetrievalResult expand_to_paragraphs(const Selection& selection, const SegmentedDocument& doc, const EntityIndex& index);

/// Closure invariants of a result; throws ErrorKind::schema on violation.
void validate_result(const RetrievalResult& result, const SegmentedDocument& doc, const EntityIndex& index);

nlohmann::json retrieval_result_to_json(const RetrievalResult& result, const EntityIndex& index);

}  // namespace longdoc
