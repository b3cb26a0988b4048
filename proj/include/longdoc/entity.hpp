#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "longdoc/corpus.hpp"
#include "longdoc/score_sheet.hpp"

namespace longdoc {

struct RecognizedMention {
    std::string text;
    CharSpan span;  // relative to the text handed to the recognizer
    std::string label;
};

class EntityRecognizer {
  public:
    virtual ~EntityRecognizer() = default;
    virtual std::string id() const = 0;
    virtual std::vector<RecognizedMention> recognize(std::string_view text) const = 0;
};

/// Rule-based recognizer: maximal runs of capitalized words. Single-word runs
/// that are common function words ("The", "In", ...) are dropped.
class CapitalizedSpanRecognizer final : public EntityRecognizer {
  public:
    std::string id() const override { return "capitalized"; }
    std::vector<RecognizedMention> recognize(std::string_view text) const override;
};

struct EntityMention {
    int sentence_index = 0;
    CharSpan span;  // absolute raw_text coordinates
};

struct Entity {
    std::string canonical;  // case-folded, whitespace-normalized surface form
    std::vector<EntityMention> mentions;
};

struct EntityIndex {
    std::vector<Entity> entities;
    std::map<int, std::set<int>> sentence_to_entities;   // sentence index -> entity ids
    std::map<int, std::set<int>> paragraph_to_entities;  // paragraph index -> entity ids

    int find(std::string_view canonical) const;
    std::vector<int> paragraphs_containing(int entity_id) const;
    /// Distinct sentences containing at least one mention of the entity.
    std::vector<int> sentences_containing(int entity_id) const;

    void validate(const SegmentedDocument& doc) const;
};

EntityIndex extract_entities(const SegmentedDocument& doc, const EntityRecognizer& recognizer);

nlohmann::json entity_index_to_json(const EntityIndex& index);

/// One score per entity id, same kind as the sheet it was derived from.
struct EntityScores {
    ScoreSheet::Kind kind = ScoreSheet::Kind::attention;
    std::vector<double> scores;
};

/// score(entity) = arithmetic mean of the sheet scores over the distinct
/// sentences containing at least one mention of the entity.
EntityScores entity_scores(const EntityIndex& index, const ScoreSheet& sheet);

}  // namespace longdoc
