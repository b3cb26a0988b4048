#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "longdoc/tokenizer.hpp"

namespace longdoc {

/// Character range [begin, end) into a document's raw text.
struct CharSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t length() const { return end - begin; }
    bool empty() const { return begin >= end; }
    bool overlaps(const CharSpan& other) const { return begin < other.end && other.begin < end; }
    bool contains(const CharSpan& other) const { return begin <= other.begin && other.end <= end; }
    bool operator==(const CharSpan&) const = default;
};

struct Paragraph {
    int index = 0;
    CharSpan span;
};

struct Sentence {
    int index = 0;
    int paragraph_index = 0;
    CharSpan span;
};

struct SegmentedDocument {
    std::string doc_id;
    std::string raw_text;
    std::vector<Paragraph> paragraphs;
    std::vector<Sentence> sentences;

    std::string_view paragraph_text(int i) const;
    std::string_view sentence_text(int i) const;
    std::vector<int> sentences_of_paragraph(int paragraph_index) const;

    /// Checks the structural invariants (sorted disjoint spans, containment,
    /// contiguous indices); throws ErrorKind::schema on violation.
    void validate() const;
};

struct SegmentationRules {
    std::string terminal_chars = ".!?";
    /// Words (with trailing period) that do not end a sentence.
    std::vector<std::string> abbreviations;

    static SegmentationRules defaults();
};

/// Splits raw text into paragraphs at blank lines and sentences at terminal
/// punctuation followed by whitespace. Throws ErrorKind::empty_document when
/// the input is empty or whitespace-only.
SegmentedDocument segment_document(std::string_view raw_text, const SegmentationRules& rules = SegmentationRules::defaults(),
                                   std::string doc_id = "doc");

/// Builds a document from a fixed paragraph list (the retrieval units of a
/// dataset record); only sentence boundaries are computed. Paragraphs are
/// joined with blank lines to form raw_text.
SegmentedDocument document_from_paragraphs(std::string doc_id, const std::vector<std::string>& paragraphs,
                                           const SegmentationRules& rules = SegmentationRules::defaults());

/// Inclusive token index range [first, last].
struct TokenSpan {
    int first = 0;
    int last = 0;

    int length() const { return last - first + 1; }
    bool contains(int t) const { return first <= t && t <= last; }
    bool operator==(const TokenSpan&) const = default;
};

struct TokenAlignment {
    std::string tokenizer_id;
    int doc_token_count = 0;
    int query_token_count = 0;
    std::vector<TokenSpan> sentence_token_spans;
    std::vector<TokenSpan> paragraph_token_spans;
};

/// Maps every sentence/paragraph to the minimal inclusive token range covering
/// its character span. A token straddling a boundary belongs to every unit it
/// overlaps. Throws ErrorKind::alignment_gap if a sentence covers no token.
TokenAlignment align_tokens(const SegmentedDocument& doc, std::string_view query, const Tokenizer& tokenizer);

/// Same as align_tokens but reuses an existing document tokenization (e.g. the
/// one a backend actually used).
TokenAlignment align_from_tokens(const SegmentedDocument& doc, const TokenizedText& doc_tokens, int query_token_count,
                                 const std::string& tokenizer_id);

enum class QueryType {
    single_hop,
    comparison,
    composition,
    summarization,
    unspecified,
};

const char* query_type_name(QueryType t);
QueryType parse_query_type(std::string_view name);

struct Subquery {
    std::string text;
    std::vector<int> gold_paragraphs;
};

struct RetrievalSample {
    std::string sample_id;
    SegmentedDocument document;
    std::string query;
    std::vector<int> gold_paragraphs;  // sorted, unique
    QueryType query_type = QueryType::unspecified;
    std::vector<Subquery> subqueries;  // empty when the record has none
};

/// Loads the canonical JSONL dataset. Each line is one record:
///   {"id": str, "paragraphs": [str], "query": str, "gold": [int],
///    "type": str?, "subqueries": [{"q": str, "gold": [int]}]?}
/// Records may alternatively carry "text" (a raw document segmented here)
/// instead of "paragraphs". Throws ErrorKind::schema with the record number on
/// any malformed record.
std::vector<RetrievalSample> load_dataset(const std::string& path, const SegmentationRules& rules = SegmentationRules::defaults());

struct DatasetStats {
    std::size_t sample_count = 0;
    double mean_word_count = 0.0;
    std::size_t max_word_count = 0;
    double mean_paragraph_count = 0.0;
    double mean_gold_count = 0.0;
};

DatasetStats compute_stats(const std::vector<RetrievalSample>& samples);

}  // namespace longdoc
