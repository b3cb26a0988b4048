#include "longdoc/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "longdoc/error.hpp"

namespace longdoc {

namespace {

bool is_space(unsigned char c) {
    return std::isspace(c) != 0;
}

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

CharSpan trimmed(std::string_view text, std::size_t begin, std::size_t end) {
    while (begin < end && is_space(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && is_space(static_cast<unsigned char>(text[end - 1]))) --end;
    return {begin, end};
}

// The word ending at `pos` (exclusive), including its terminal period.
std::string word_ending_at(std::string_view text, std::size_t pos) {
    std::size_t begin = pos;
    while (begin > 0 && !is_space(static_cast<unsigned char>(text[begin - 1]))) --begin;
    return std::string(text.substr(begin, pos - begin));
}

bool is_abbreviation(std::string_view word, const std::vector<std::string>& abbreviations) {
    std::string lowered = lower_ascii(word);
    for (const auto& abbr : abbreviations) {
        if (lowered == lower_ascii(abbr)) return true;
    }
    return false;
}

// Sentence boundaries inside one paragraph span; returns trimmed sentence
// spans in absolute raw_text coordinates.
std::vector<CharSpan> split_sentences(std::string_view raw_text, CharSpan paragraph, const SegmentationRules& rules) {
    std::vector<CharSpan> spans;
    std::size_t start = paragraph.begin;
    std::size_t i = paragraph.begin;
    while (i < paragraph.end) {
        char c = raw_text[i];
        if (rules.terminal_chars.find(c) == std::string::npos) {
            ++i;
            continue;
        }
        std::size_t punct_end = i;
        while (punct_end + 1 < paragraph.end && rules.terminal_chars.find(raw_text[punct_end + 1]) != std::string::npos) {
            ++punct_end;
        }
        // closing quotes/brackets stay with the sentence
        std::size_t tail = punct_end;
        while (tail + 1 < paragraph.end) {
            char t = raw_text[tail + 1];
            if (t == '"' || t == '\'' || t == ')' || t == ']' || t == '}') {
                ++tail;
            } else {
                break;
            }
        }
        bool at_end = tail + 1 >= paragraph.end;
        bool followed_by_space = !at_end && is_space(static_cast<unsigned char>(raw_text[tail + 1]));
        if (!at_end && !followed_by_space) {
            i = tail + 1;
            continue;
        }
        if (c == '.' && punct_end == i) {
            std::string word = word_ending_at(raw_text, i + 1);
            if (is_abbreviation(word, rules.abbreviations)) {
                i = tail + 1;
                continue;
            }
        }
        CharSpan span = trimmed(raw_text, start, tail + 1);
        if (!span.empty()) spans.push_back(span);
        start = tail + 1;
        i = tail + 1;
    }
    CharSpan rest = trimmed(raw_text, start, paragraph.end);
    if (!rest.empty()) spans.push_back(rest);
    return spans;
}

std::vector<CharSpan> split_paragraph_spans(std::string_view raw_text) {
    // paragraph = maximal run of non-blank lines, span trimmed of whitespace
    std::vector<CharSpan> spans;
    std::size_t line_start = 0;
    std::size_t run_start = std::string::npos;
    const std::size_t n = raw_text.size();
    auto flush = [&](std::size_t run_end) {
        if (run_start == std::string::npos) return;
        CharSpan span = trimmed(raw_text, run_start, run_end);
        if (!span.empty()) spans.push_back(span);
        run_start = std::string::npos;
    };
    while (line_start <= n) {
        std::size_t line_end = raw_text.find('\n', line_start);
        if (line_end == std::string::npos) line_end = n;
        bool blank = trimmed(raw_text, line_start, line_end).empty();
        if (blank) {
            flush(line_start);
        } else if (run_start == std::string::npos) {
            run_start = line_start;
        }
        if (line_end >= n) {
            flush(n);
            break;
        }
        line_start = line_end + 1;
    }
    return spans;
}

void append_sentences(SegmentedDocument& doc, int paragraph_index, const std::vector<CharSpan>& spans) {
    for (const CharSpan& span : spans) {
        Sentence s;
        s.index = static_cast<int>(doc.sentences.size());
        s.paragraph_index = paragraph_index;
        s.span = span;
        doc.sentences.push_back(s);
    }
}

}  // namespace

SegmentationRules SegmentationRules::defaults() {
    SegmentationRules rules;
    rules.abbreviations = {"e.g.", "i.e.",  "etc.", "vs.", "cf.", "mr.", "mrs.", "ms.", "dr.",
                           "prof.", "fig.", "st.",  "no.", "jr.", "sr.", "al.",  "u.s.", "inc."};
    return rules;
}

std::string_view SegmentedDocument::paragraph_text(int i) const {
    const CharSpan& s = paragraphs.at(static_cast<std::size_t>(i)).span;
    return std::string_view(raw_text).substr(s.begin, s.length());
}

std::string_view SegmentedDocument::sentence_text(int i) const {
    const CharSpan& s = sentences.at(static_cast<std::size_t>(i)).span;
    return std::string_view(raw_text).substr(s.begin, s.length());
}

std::vector<int> SegmentedDocument::sentences_of_paragraph(int paragraph_index) const {
    std::vector<int> out;
    for (const Sentence& s : sentences) {
        if (s.paragraph_index == paragraph_index) out.push_back(s.index);
    }
    return out;
}

void SegmentedDocument::validate() const {
    std::size_t prev_end = 0;
    for (std::size_t i = 0; i < paragraphs.size(); ++i) {
        const Paragraph& p = paragraphs[i];
        if (p.index != static_cast<int>(i)) fail(ErrorKind::schema, "paragraph indices not contiguous");
        if (p.span.empty() || p.span.end > raw_text.size()) fail(ErrorKind::schema, "paragraph span out of bounds");
        if (i > 0 && p.span.begin < prev_end) fail(ErrorKind::schema, "paragraph spans overlap or unsorted");
        prev_end = p.span.end;
    }
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        const Sentence& s = sentences[i];
        if (s.index != static_cast<int>(i)) fail(ErrorKind::schema, "sentence indices not contiguous");
        if (s.paragraph_index < 0 || s.paragraph_index >= static_cast<int>(paragraphs.size())) {
            fail(ErrorKind::schema, "sentence references missing paragraph");
        }
        if (!paragraphs[static_cast<std::size_t>(s.paragraph_index)].span.contains(s.span)) {
            fail(ErrorKind::schema, "sentence span escapes its paragraph");
        }
    }
}

SegmentedDocument segment_document(std::string_view raw_text, const SegmentationRules& rules, std::string doc_id) {
    SegmentedDocument doc;
    doc.doc_id = std::move(doc_id);
    doc.raw_text.assign(raw_text);
    std::vector<CharSpan> paragraph_spans = split_paragraph_spans(doc.raw_text);
    if (paragraph_spans.empty()) fail(ErrorKind::empty_document, "document is empty or whitespace-only");
    for (const CharSpan& span : paragraph_spans) {
        Paragraph p;
        p.index = static_cast<int>(doc.paragraphs.size());
        p.span = span;
        doc.paragraphs.push_back(p);
        append_sentences(doc, p.index, split_sentences(doc.raw_text, span, rules));
    }
    doc.validate();
    return doc;
}

SegmentedDocument document_from_paragraphs(std::string doc_id, const std::vector<std::string>& paragraphs,
                                           const SegmentationRules& rules) {
    if (paragraphs.empty()) fail(ErrorKind::empty_document, "paragraph list is empty");
    SegmentedDocument doc;
    doc.doc_id = std::move(doc_id);
    for (std::size_t i = 0; i < paragraphs.size(); ++i) {
        CharSpan content = trimmed(paragraphs[i], 0, paragraphs[i].size());
        if (content.empty()) {
            fail(ErrorKind::empty_document, "paragraph " + std::to_string(i) + " is empty or whitespace-only");
        }
        if (i > 0) doc.raw_text += "\n\n";
        std::size_t begin = doc.raw_text.size();
        doc.raw_text.append(paragraphs[i], content.begin, content.length());
        Paragraph p;
        p.index = static_cast<int>(i);
        p.span = {begin, doc.raw_text.size()};
        doc.paragraphs.push_back(p);
        append_sentences(doc, p.index, split_sentences(doc.raw_text, p.span, rules));
    }
    doc.validate();
    return doc;
}

TokenAlignment align_from_tokens(const SegmentedDocument& doc, const TokenizedText& doc_tokens, int query_token_count,
                                 const std::string& tokenizer_id) {
    TokenAlignment align;
    align.tokenizer_id = tokenizer_id;
    align.doc_token_count = static_cast<int>(doc_tokens.size());
    align.query_token_count = query_token_count;

    auto cover = [&](const CharSpan& span) -> TokenSpan {
        // minimal inclusive token range overlapping the span; tokens are
        // sorted, so binary search for the first candidate
        int first = -1;
        int last = -1;
        std::size_t lo = 0;
        std::size_t hi = doc_tokens.size();
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (doc_tokens.tokens[mid].end <= span.begin) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        for (std::size_t i = lo; i < doc_tokens.size(); ++i) {
            const Token& t = doc_tokens.tokens[i];
            if (t.begin >= span.end) break;
            if (t.end > span.begin) {
                if (first < 0) first = static_cast<int>(i);
                last = static_cast<int>(i);
            }
        }
        if (first < 0) return {-1, -1};
        return {first, last};
    };

    for (const Sentence& s : doc.sentences) {
        TokenSpan ts = cover(s.span);
        if (ts.first < 0) {
            fail(ErrorKind::alignment_gap, "sentence " + std::to_string(s.index) + " maps to an empty token range");
        }
        align.sentence_token_spans.push_back(ts);
    }
    for (const Paragraph& p : doc.paragraphs) {
        TokenSpan ts = cover(p.span);
        if (ts.first < 0) {
            fail(ErrorKind::alignment_gap, "paragraph " + std::to_string(p.index) + " maps to an empty token range");
        }
        align.paragraph_token_spans.push_back(ts);
    }
    return align;
}

TokenAlignment align_tokens(const SegmentedDocument& doc, std::string_view query, const Tokenizer& tokenizer) {
    TokenizedText doc_tokens = tokenizer.tokenize(doc.raw_text);
    TokenizedText query_tokens = tokenizer.tokenize(query);
    return align_from_tokens(doc, doc_tokens, static_cast<int>(query_tokens.size()), tokenizer.id());
}

const char* query_type_name(QueryType t) {
    switch (t) {
        case QueryType::single_hop: return "single_hop";
        case QueryType::comparison: return "comparison";
        case QueryType::composition: return "composition";
        case QueryType::summarization: return "summarization";
        case QueryType::unspecified: return "unspecified";
    }
    return "unspecified";
}

QueryType parse_query_type(std::string_view name) {
    if (name == "single_hop") return QueryType::single_hop;
    if (name == "comparison") return QueryType::comparison;
    if (name == "composition") return QueryType::composition;
    if (name == "summarization") return QueryType::summarization;
    if (name == "unspecified") return QueryType::unspecified;
    fail(ErrorKind::schema, "unknown query type \"" + std::string(name) + "\"");
}

namespace {

using nlohmann::json;

std::vector<int> parse_gold(const json& value, std::size_t paragraph_count, std::size_t record, const char* field) {
    if (!value.is_array()) {
        fail(ErrorKind::schema, "record " + std::to_string(record) + ": \"" + field + "\" must be an array of ints");
    }
    std::set<int> unique;
    for (const auto& g : value) {
        if (!g.is_number_integer()) {
            fail(ErrorKind::schema, "record " + std::to_string(record) + ": \"" + field + "\" must contain integers");
        }
        int idx = g.get<int>();
        if (idx < 0 || idx >= static_cast<int>(paragraph_count)) {
            fail(ErrorKind::schema, "record " + std::to_string(record) + ": gold index " + std::to_string(idx) +
                                        " out of range (paragraph count " + std::to_string(paragraph_count) + ")");
        }
        unique.insert(idx);
    }
    return {unique.begin(), unique.end()};
}

}  // namespace

std::vector<RetrievalSample> load_dataset(const std::string& path, const SegmentationRules& rules) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::config, "cannot open dataset file " + path);

    std::vector<RetrievalSample> samples;
    std::string line;
    std::size_t record = 0;
    while (std::getline(in, line)) {
        ++record;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            fail(ErrorKind::schema, "record " + std::to_string(record) + ": invalid JSON (" + e.what() + ")");
        }
        if (!rec.is_object()) fail(ErrorKind::schema, "record " + std::to_string(record) + ": not a JSON object");

        RetrievalSample sample;
        if (!rec.contains("id") || !rec["id"].is_string()) {
            fail(ErrorKind::schema, "record " + std::to_string(record) + ": missing string \"id\"");
        }
        sample.sample_id = rec["id"].get<std::string>();

        try {
            if (rec.contains("paragraphs")) {
                if (!rec["paragraphs"].is_array() || rec["paragraphs"].empty()) {
                    fail(ErrorKind::schema, "\"paragraphs\" must be a non-empty array");
                }
                std::vector<std::string> paragraphs;
                for (const auto& p : rec["paragraphs"]) {
                    if (!p.is_string()) fail(ErrorKind::schema, "\"paragraphs\" entries must be strings");
                    paragraphs.push_back(p.get<std::string>());
                }
                sample.document = document_from_paragraphs(sample.sample_id, paragraphs, rules);
            } else if (rec.contains("text") && rec["text"].is_string()) {
                sample.document = segment_document(rec["text"].get<std::string>(), rules, sample.sample_id);
            } else {
                fail(ErrorKind::schema, "record carries neither \"paragraphs\" nor \"text\"");
            }
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::schema || e.kind() == ErrorKind::empty_document) {
                fail(ErrorKind::schema, "record " + std::to_string(record) + ": " + e.what());
            }
            throw;
        }

        if (!rec.contains("query") || !rec["query"].is_string()) {
            fail(ErrorKind::schema, "record " + std::to_string(record) + ": missing string \"query\"");
        }
        sample.query = rec["query"].get<std::string>();

        if (!rec.contains("gold")) fail(ErrorKind::schema, "record " + std::to_string(record) + ": missing \"gold\"");
        sample.gold_paragraphs = parse_gold(rec["gold"], sample.document.paragraphs.size(), record, "gold");

        if (rec.contains("type")) {
            if (!rec["type"].is_string()) {
                fail(ErrorKind::schema, "record " + std::to_string(record) + ": \"type\" must be a string");
            }
            try {
                sample.query_type = parse_query_type(rec["type"].get<std::string>());
            } catch (const Error&) {
                fail(ErrorKind::schema,
                     "record " + std::to_string(record) + ": unknown type \"" + rec["type"].get<std::string>() + "\"");
            }
        }

        if (rec.contains("subqueries")) {
            if (!rec["subqueries"].is_array()) {
                fail(ErrorKind::schema, "record " + std::to_string(record) + ": \"subqueries\" must be an array");
            }
            for (const auto& sq : rec["subqueries"]) {
                if (!sq.is_object() || !sq.contains("q") || !sq["q"].is_string() || !sq.contains("gold")) {
                    fail(ErrorKind::schema, "record " + std::to_string(record) + ": malformed subquery entry");
                }
                Subquery sub;
                sub.text = sq["q"].get<std::string>();
                sub.gold_paragraphs = parse_gold(sq["gold"], sample.document.paragraphs.size(), record, "subqueries.gold");
                sample.subqueries.push_back(std::move(sub));
            }
        }
        samples.push_back(std::move(sample));
    }
    return samples;
}

DatasetStats compute_stats(const std::vector<RetrievalSample>& samples) {
    DatasetStats stats;
    stats.sample_count = samples.size();
    if (samples.empty()) return stats;
    double words = 0.0;
    double paragraphs = 0.0;
    double gold = 0.0;
    for (const RetrievalSample& s : samples) {
        std::size_t wc = word_count(s.document.raw_text);
        words += static_cast<double>(wc);
        stats.max_word_count = std::max(stats.max_word_count, wc);
        paragraphs += static_cast<double>(s.document.paragraphs.size());
        gold += static_cast<double>(s.gold_paragraphs.size());
    }
    const double n = static_cast<double>(samples.size());
    stats.mean_word_count = words / n;
    stats.mean_paragraph_count = paragraphs / n;
    stats.mean_gold_count = gold / n;
    return stats;
}

}  // namespace longdoc
