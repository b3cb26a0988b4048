#include "longdoc/entity.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "longdoc/error.hpp"

namespace longdoc {

namespace {

const std::unordered_set<std::string>& function_words() {
    static const std::unordered_set<std::string> words = {
        "the", "a",    "an",   "i",    "in",   "on",    "at",    "of",    "to",    "and",  "or",   "but",  "if",
        "is",  "was",  "it",   "he",   "she",  "we",    "you",   "they",  "this",  "that", "these", "those", "as",
        "by",  "for",  "with", "from", "my",   "his",   "her",   "its",   "our",   "their", "be",   "are",  "were",
        "not", "no",   "so",   "then", "when", "where", "what",  "who",   "why",   "how",  "which", "there", "here"};
    return words;
}

bool is_word_char(unsigned char c) {
    return std::isalnum(c) != 0 || c == '\'' || c == '-' || c >= 0x80;
}

std::string fold(std::string_view text) {
    // case-fold and collapse internal whitespace
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (unsigned char c : text) {
        if (std::isspace(c) != 0) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

struct Word {
    CharSpan span;
    bool capitalized = false;
};

std::vector<Word> split_words(std::string_view text) {
    std::vector<Word> words;
    std::size_t i = 0;
    while (i < text.size()) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (!is_word_char(c)) {
            ++i;
            continue;
        }
        std::size_t begin = i;
        while (i < text.size() && is_word_char(static_cast<unsigned char>(text[i]))) ++i;
        Word w;
        w.span = {begin, i};
        w.capitalized = std::isupper(static_cast<unsigned char>(text[begin])) != 0;
        words.push_back(w);
    }
    return words;
}

}  // namespace

std::vector<RecognizedMention> CapitalizedSpanRecognizer::recognize(std::string_view text) const {
    std::vector<RecognizedMention> mentions;
    const std::vector<Word> words = split_words(text);
    std::size_t i = 0;
    while (i < words.size()) {
        if (!words[i].capitalized) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < words.size() && words[j + 1].capitalized) ++j;
        CharSpan span{words[i].span.begin, words[j].span.end};
        std::string surface(text.substr(span.begin, span.length()));
        bool single_function_word = i == j && function_words().count(fold(surface)) > 0;
        if (!single_function_word) {
            mentions.push_back({std::move(surface), span, "CAP"});
        }
        i = j + 1;
    }
    return mentions;
}

int EntityIndex::find(std::string_view canonical) const {
    for (std::size_t i = 0; i < entities.size(); ++i) {
        if (entities[i].canonical == canonical) return static_cast<int>(i);
    }
    return -1;
}

std::vector<int> EntityIndex::paragraphs_containing(int entity_id) const {
    std::vector<int> out;
    for (const auto& [paragraph, ids] : paragraph_to_entities) {
        if (ids.count(entity_id) > 0) out.push_back(paragraph);
    }
    return out;
}

std::vector<int> EntityIndex::sentences_containing(int entity_id) const {
    std::vector<int> out;
    for (const auto& [sentence, ids] : sentence_to_entities) {
        if (ids.count(entity_id) > 0) out.push_back(sentence);
    }
    return out;
}

void EntityIndex::validate(const SegmentedDocument& doc) const {
    std::unordered_set<std::string> seen;
    for (const Entity& e : entities) {
        if (e.canonical.empty()) fail(ErrorKind::schema, "entity with empty canonical form");
        if (!seen.insert(e.canonical).second) fail(ErrorKind::schema, "duplicate canonical form " + e.canonical);
        if (e.mentions.empty()) fail(ErrorKind::schema, "entity " + e.canonical + " has no mentions");
        for (const EntityMention& m : e.mentions) {
            if (m.sentence_index < 0 || m.sentence_index >= static_cast<int>(doc.sentences.size())) {
                fail(ErrorKind::schema, "mention references missing sentence");
            }
        }
    }
    // the paragraph map must be derivable from the sentence map
    for (const auto& [sentence, ids] : sentence_to_entities) {
        int paragraph = doc.sentences.at(static_cast<std::size_t>(sentence)).paragraph_index;
        auto it = paragraph_to_entities.find(paragraph);
        for (int id : ids) {
            if (it == paragraph_to_entities.end() || it->second.count(id) == 0) {
                fail(ErrorKind::schema, "paragraph map missing entity " + std::to_string(id));
            }
        }
    }
}

EntityIndex extract_entities(const SegmentedDocument& doc, const EntityRecognizer& recognizer) {
    EntityIndex index;
    std::unordered_map<std::string, int> by_canonical;
    for (const Sentence& sentence : doc.sentences) {
        std::string_view text = doc.sentence_text(sentence.index);
        for (RecognizedMention& m : recognizer.recognize(text)) {
            std::string canonical = fold(m.text);
            if (canonical.empty()) continue;
            auto [it, inserted] = by_canonical.try_emplace(canonical, static_cast<int>(index.entities.size()));
            if (inserted) index.entities.push_back({canonical, {}});
            Entity& entity = index.entities[static_cast<std::size_t>(it->second)];
            CharSpan absolute{sentence.span.begin + m.span.begin, sentence.span.begin + m.span.end};
            entity.mentions.push_back({sentence.index, absolute});
            index.sentence_to_entities[sentence.index].insert(it->second);
            index.paragraph_to_entities[sentence.paragraph_index].insert(it->second);
        }
    }
    return index;
}

nlohmann::json entity_index_to_json(const EntityIndex& index) {
    nlohmann::json entities = nlohmann::json::array();
    for (const Entity& e : index.entities) {
        nlohmann::json mentions = nlohmann::json::array();
        for (const EntityMention& m : e.mentions) {
            mentions.push_back({{"sentence", m.sentence_index}, {"begin", m.span.begin}, {"end", m.span.end}});
        }
        entities.push_back({{"canonical", e.canonical}, {"mentions", std::move(mentions)}});
    }
    return nlohmann::json{{"entities", std::move(entities)}};
}

EntityScores entity_scores(const EntityIndex& index, const ScoreSheet& sheet) {
    EntityScores out;
    out.kind = sheet.kind;
    out.scores.reserve(index.entities.size());
    for (std::size_t id = 0; id < index.entities.size(); ++id) {
        std::set<int> sentences;
        for (const EntityMention& m : index.entities[id].mentions) sentences.insert(m.sentence_index);
        double sum = 0.0;
        for (int s : sentences) {
            if (s < 0 || s >= static_cast<int>(sheet.scores.size())) {
                fail(ErrorKind::shape_mismatch, "entity mention sentence outside the score sheet");
            }
            sum += sheet.scores[static_cast<std::size_t>(s)];
        }
        out.scores.push_back(sum / static_cast<double>(sentences.size()));
    }
    return out;
}

}  // namespace longdoc
