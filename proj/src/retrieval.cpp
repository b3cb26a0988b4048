#include "longdoc/retrieval.hpp"

#include <algorithm>
#include <set>

#include "longdoc/error.hpp"

namespace longdoc {

const char* ablation_name(Ablation a) {
    switch (a) {
        case Ablation::none: return "none";
        case Ablation::attention_only: return "attn_only";
        case Ablation::embedding_only: return "emb_only";
        case Ablation::no_entity: return "no_entity";
    }
    return "none";
}

Ablation parse_ablation(std::string_view name) {
    if (name.empty() || name == "none") return Ablation::none;
    if (name == "attn_only") return Ablation::attention_only;
    if (name == "emb_only") return Ablation::embedding_only;
    if (name == "no_entity") return Ablation::no_entity;
    fail(ErrorKind::config, "unknown ablation \"" + std::string(name) + "\"");
}

ViewQuotas view_quotas(int k, Ablation ablation) {
    if (k < 1) fail(ErrorKind::invalid_k, "top_k must be >= 1, got " + std::to_string(k));
    switch (ablation) {
        case Ablation::attention_only: return {k, 0};
        case Ablation::embedding_only: return {0, k};
        default: return {(k + 1) / 2, k / 2};
    }
}

namespace {

std::vector<int> top_sentences(const std::vector<double>& scores, int quota) {
    std::vector<int> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (scores[static_cast<std::size_t>(a)] != scores[static_cast<std::size_t>(b)]) {
            return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
        }
        return a < b;
    });
    order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(quota)));
    return order;
}

std::vector<int> top_entities(const EntityScores& scores, const EntityIndex& index, int quota) {
    std::vector<int> order(scores.scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (scores.scores[static_cast<std::size_t>(a)] != scores.scores[static_cast<std::size_t>(b)]) {
            return scores.scores[static_cast<std::size_t>(a)] > scores.scores[static_cast<std::size_t>(b)];
        }
        return index.entities[static_cast<std::size_t>(a)].canonical < index.entities[static_cast<std::size_t>(b)].canonical;
    });
    order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(quota)));
    return order;
}

std::vector<int> sorted_union(const std::vector<int>& a, const std::vector<int>& b) {
    std::set<int> merged(a.begin(), a.end());
    merged.insert(b.begin(), b.end());
    return {merged.begin(), merged.end()};
}

}  // namespace

Selection select_topk(const ScoreSheet& attention_sheet, const ScoreSheet& embedding_sheet,
                      const EntityScores& entity_attention, const EntityScores& entity_embedding, const EntityIndex& index,
                      int k, Ablation ablation) {
    const ViewQuotas quotas = view_quotas(k, ablation);
    if (quotas.attention > 0 && quotas.embedding > 0 && attention_sheet.scores.size() != embedding_sheet.scores.size()) {
        fail(ErrorKind::shape_mismatch, "attention and embedding sheets cover different sentence counts");
    }

    Selection selection;
    selection.k = k;
    if (quotas.attention > 0) {
        selection.picks.attention_sentences = top_sentences(attention_sheet.scores, quotas.attention);
        if (ablation != Ablation::no_entity) {
            selection.picks.attention_entities = top_entities(entity_attention, index, quotas.attention);
        }
    }
    if (quotas.embedding > 0) {
        selection.picks.embedding_sentences = top_sentences(embedding_sheet.scores, quotas.embedding);
        if (ablation != Ablation::no_entity) {
            selection.picks.embedding_entities = top_entities(entity_embedding, index, quotas.embedding);
        }
    }
    selection.sentences = sorted_union(selection.picks.attention_sentences, selection.picks.embedding_sentences);
    selection.entities = sorted_union(selection.picks.attention_entities, selection.picks.embedding_entities);
    return selection;
}

RetrievalResult expand_to_paragraphs(const Selection& selection, const SegmentedDocument& doc, const EntityIndex& index) {
    std::set<int> paragraphs;
    for (int s : selection.sentences) {
        if (s < 0 || s >= static_cast<int>(doc.sentences.size())) {
            fail(ErrorKind::schema, "selected sentence " + std::to_string(s) + " does not exist");
        }
        paragraphs.insert(doc.sentences[static_cast<std::size_t>(s)].paragraph_index);
    }
    for (const auto& [paragraph, ids] : index.paragraph_to_entities) {
        for (int id : selection.entities) {
            if (ids.count(id) > 0) {
                paragraphs.insert(paragraph);
                break;
            }
        }
    }

    RetrievalResult result;
    result.k = selection.k;
    result.paragraphs.assign(paragraphs.begin(), paragraphs.end());
    result.sentences = selection.sentences;
    result.picks = selection.picks;
    for (int id : selection.entities) {
        result.entities.push_back(index.entities.at(static_cast<std::size_t>(id)).canonical);
    }
    std::sort(result.entities.begin(), result.entities.end());
    return result;
}

void validate_result(const RetrievalResult& result, const SegmentedDocument& doc, const EntityIndex& index) {
    for (std::size_t i = 1; i < result.paragraphs.size(); ++i) {
        if (result.paragraphs[i] <= result.paragraphs[i - 1]) {
            fail(ErrorKind::schema, "result paragraphs not strictly increasing");
        }
    }
    std::set<int> paragraphs(result.paragraphs.begin(), result.paragraphs.end());
    for (int s : result.sentences) {
        int p = doc.sentences.at(static_cast<std::size_t>(s)).paragraph_index;
        if (paragraphs.count(p) == 0) {
            fail(ErrorKind::schema, "paragraph of selected sentence " + std::to_string(s) + " missing from result");
        }
    }
    for (const std::string& canonical : result.entities) {
        int id = index.find(canonical);
        if (id < 0) fail(ErrorKind::schema, "selected entity \"" + canonical + "\" not in the index");
        for (int p : index.paragraphs_containing(id)) {
            if (paragraphs.count(p) == 0) {
                fail(ErrorKind::schema, "paragraph containing entity \"" + canonical + "\" missing from result");
            }
        }
    }
}

nlohmann::json retrieval_result_to_json(const RetrievalResult& result, const EntityIndex& index) {
    auto canonicals = [&](const std::vector<int>& ids) {
        nlohmann::json out = nlohmann::json::array();
        for (int id : ids) out.push_back(index.entities.at(static_cast<std::size_t>(id)).canonical);
        return out;
    };
    nlohmann::json views{
        {"attention", {{"sentences", result.picks.attention_sentences}, {"entities", canonicals(result.picks.attention_entities)}}},
        {"embedding", {{"sentences", result.picks.embedding_sentences}, {"entities", canonicals(result.picks.embedding_entities)}}},
    };
    return nlohmann::json{{"paragraphs", result.paragraphs},
                          {"sentences", result.sentences},
                          {"entities", result.entities},
                          {"views", std::move(views)},
                          {"k", result.k}};
}

}  // namespace longdoc
