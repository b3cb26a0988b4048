#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace longdoc {

/// Per-sentence scalar scores of one kind. Attention scores live in [0, 1],
/// embedding scores in [-1, 1]; length equals the document's sentence count.
struct ScoreSheet {
    enum class Kind { attention, embedding };

    Kind kind = Kind::attention;
    std::vector<double> scores;
    std::vector<int> layers;  // provenance when kind == attention
    std::string model_id;     // provenance when kind == embedding
};

nlohmann::json score_sheet_to_json(const ScoreSheet& sheet);
ScoreSheet score_sheet_from_json(const nlohmann::json& j);

}  // namespace longdoc
