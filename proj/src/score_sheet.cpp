#include "longdoc/score_sheet.hpp"

#include "longdoc/error.hpp"

namespace longdoc {

nlohmann::json score_sheet_to_json(const ScoreSheet& sheet) {
    nlohmann::json j;
    if (sheet.kind == ScoreSheet::Kind::attention) {
        j["kind"] = "attention";
        j["layers"] = sheet.layers;
    } else {
        j["kind"] = "embedding";
        j["model"] = sheet.model_id;
    }
    j["scores"] = sheet.scores;
    return j;
}

ScoreSheet score_sheet_from_json(const nlohmann::json& j) {
    ScoreSheet sheet;
    const std::string kind = j.value("kind", std::string());
    if (kind == "attention") {
        sheet.kind = ScoreSheet::Kind::attention;
        if (j.contains("layers")) sheet.layers = j["layers"].get<std::vector<int>>();
    } else if (kind == "embedding") {
        sheet.kind = ScoreSheet::Kind::embedding;
        sheet.model_id = j.value("model", std::string());
    } else {
        fail(ErrorKind::schema, "score sheet kind must be \"attention\" or \"embedding\"");
    }
    if (!j.contains("scores") || !j["scores"].is_array()) fail(ErrorKind::schema, "score sheet missing \"scores\"");
    sheet.scores = j["scores"].get<std::vector<double>>();
    return sheet;
}

}  // namespace longdoc
