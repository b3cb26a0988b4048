#include "longdoc/scripted_backend.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>

#include "longdoc/error.hpp"
#include "longdoc/hash.hpp"

namespace longdoc {

ScriptedAttentionBackend::ScriptedAttentionBackend(int window_limit, int prompt_overhead, std::string model_id)
    : window_limit_(window_limit), prompt_overhead_(prompt_overhead), model_id_(std::move(model_id)) {}

ScriptedAttentionBackend ScriptedAttentionBackend::from_json(const nlohmann::json& fixture) {
    ScriptedAttentionBackend backend(fixture.value("window_limit", 8192), fixture.value("prompt_overhead", 0),
                                     fixture.value("model_id", std::string("scripted-attention")));
    backend.fail_ = fixture.value("fail", false);
    if (!fixture.contains("entries") || !fixture["entries"].is_array() || fixture["entries"].empty()) {
        fail(ErrorKind::config, "scripted attention fixture needs a non-empty \"entries\" array");
    }
    for (const auto& e : fixture["entries"]) {
        Entry entry;
        entry.document = e.value("document", std::string());
        entry.query = e.value("query", std::string());
        entry.tensor = attention_tensor_from_json(e);
        backend.entries_.push_back(std::move(entry));
    }
    return backend;
}

ScriptedAttentionBackend ScriptedAttentionBackend::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::config, "cannot open attention fixture " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::config, "invalid attention fixture " + path + ": " + e.what());
    }
    return from_json(j);
}

void ScriptedAttentionBackend::add_entry(std::string document, std::string query, AttentionTensor tensor) {
    tensor.validate();
    entries_.push_back({std::move(document), std::move(query), std::move(tensor)});
}

const ScriptedAttentionBackend::Entry& ScriptedAttentionBackend::match(const std::string& document_text,
                                                                       const std::string& query_text) const {
    if (entries_.empty()) fail(ErrorKind::backend, "scripted attention backend has no entries");
    for (const Entry& e : entries_) {
        if (!e.document.empty() && e.document == document_text && (e.query.empty() || e.query == query_text)) return e;
    }
    for (const Entry& e : entries_) {
        if (e.document.empty() && !e.query.empty() && e.query == query_text) return e;
    }
    if (entries_.size() == 1) return entries_.front();
    fail(ErrorKind::backend, "no scripted attention entry matches the given document/query");
}

AttentionTensor ScriptedAttentionBackend::entry_slice(const Entry& entry, const std::string& document_text,
                                                      const std::string& query_text, const std::vector<int>& layers) const {
    TokenizedText doc_tokens = tokenizer_.tokenize(document_text);
    TokenizedText query_tokens = tokenizer_.tokenize(query_text);
    if (static_cast<int>(doc_tokens.size()) != entry.tensor.doc_token_count ||
        static_cast<int>(query_tokens.size()) != entry.tensor.query_token_count) {
        fail(ErrorKind::backend, "scripted tensor shape [" + std::to_string(entry.tensor.doc_token_count) + "x" +
                                     std::to_string(entry.tensor.query_token_count) + "] does not match tokenization [" +
                                     std::to_string(doc_tokens.size()) + "x" + std::to_string(query_tokens.size()) + "]");
    }
    if (layers.empty()) return entry.tensor;
    return entry.tensor.select_layers(layers);
}

ForwardResult ScriptedAttentionBackend::forward(const std::string& document_text, const std::string& query_text,
                                                const std::vector<int>& layers) {
    if (fail_) fail(ErrorKind::backend, "scripted attention backend configured to fail");
    const Entry& entry = match(document_text, query_text);
    ForwardResult result;
    result.attention = entry_slice(entry, document_text, query_text, layers);
    result.doc_tokens = tokenizer_.tokenize(document_text);
    result.query_token_count = static_cast<int>(tokenizer_.tokenize(query_text).size());
    return result;
}

AttentionTensor ScriptedAttentionBackend::forward_restricted(const std::string& document_text, const std::string& query_text,
                                                             const std::vector<int>& layers,
                                                             const std::vector<int>& visible_tokens) {
    if (fail_) fail(ErrorKind::backend, "scripted attention backend configured to fail");
    const Entry& entry = match(document_text, query_text);
    return entry_slice(entry, document_text, query_text, layers).select_doc_tokens(visible_tokens);
}

std::vector<int> ScriptedAttentionBackend::available_layers() const {
    std::set<int> ids;
    for (const Entry& e : entries_) ids.insert(e.tensor.layer_ids.begin(), e.tensor.layer_ids.end());
    return {ids.begin(), ids.end()};
}

ScriptedEmbeddingBackend::ScriptedEmbeddingBackend(std::string model_id) : model_id_(std::move(model_id)) {}

ScriptedEmbeddingBackend ScriptedEmbeddingBackend::from_json(const nlohmann::json& fixture) {
    ScriptedEmbeddingBackend backend(fixture.value("model_id", std::string("scripted-embedding")));
    backend.fail_ = fixture.value("fail", false);
    if (!fixture.contains("vectors") || !fixture["vectors"].is_object()) {
        fail(ErrorKind::config, "scripted embedding fixture needs a \"vectors\" object");
    }
    for (const auto& [text, vec] : fixture["vectors"].items()) {
        if (!vec.is_array()) fail(ErrorKind::config, "embedding fixture vectors must be arrays");
        backend.vectors_[text] = vec.get<std::vector<double>>();
    }
    if (fixture.contains("default")) backend.default_ = fixture["default"].get<std::vector<double>>();
    return backend;
}

ScriptedEmbeddingBackend ScriptedEmbeddingBackend::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::config, "cannot open embedding fixture " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::config, "invalid embedding fixture " + path + ": " + e.what());
    }
    return from_json(j);
}

void ScriptedEmbeddingBackend::assign(std::string text, std::vector<double> vector) {
    vectors_[std::move(text)] = std::move(vector);
}

std::vector<EmbeddingVector> ScriptedEmbeddingBackend::embed(const std::vector<std::string>& texts) {
    if (fail_) fail(ErrorKind::backend, "scripted embedding backend configured to fail");
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const std::string& text : texts) {
        auto it = vectors_.find(text);
        if (it != vectors_.end()) {
            out.push_back({it->second, model_id_});
        } else if (default_) {
            out.push_back({*default_, model_id_});
        } else {
            fail(ErrorKind::backend, "no scripted embedding for text \"" + text + "\"");
        }
    }
    return out;
}

HashedEmbeddingBackend::HashedEmbeddingBackend(int dim) : dim_(dim) {
    if (dim_ < 2) fail(ErrorKind::config, "hashed embedding dimension must be >= 2");
}

std::string HashedEmbeddingBackend::model_id() const {
    return "hashed-" + std::to_string(dim_);
}

std::vector<EmbeddingVector> HashedEmbeddingBackend::embed(const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const std::string& text : texts) {
        std::vector<double> v(static_cast<std::size_t>(dim_), 0.0);
        std::string word;
        auto flush = [&] {
            if (word.empty()) return;
            std::uint64_t h = fnv1a64(word);
            std::size_t slot = static_cast<std::size_t>(h % static_cast<std::uint64_t>(dim_));
            double sign = ((h >> 32) & 1U) != 0U ? 1.0 : -1.0;
            v[slot] += sign;
            word.clear();
        };
        for (unsigned char c : text) {
            if (std::isalnum(c) != 0 || c >= 0x80) {
                word.push_back(static_cast<char>(std::tolower(c)));
            } else {
                flush();
            }
        }
        flush();
        double norm = 0.0;
        for (double x : v) norm += x * x;
        if (norm == 0.0) {
            // no word characters at all; hash the raw bytes so the vector
            // keeps a non-zero norm
            v[static_cast<std::size_t>(fnv1a64(text) % static_cast<std::uint64_t>(dim_))] = 1.0;
            norm = 1.0;
        }
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
        out.push_back({std::move(v), model_id()});
    }
    return out;
}

}  // namespace longdoc
