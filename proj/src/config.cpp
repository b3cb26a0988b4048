#include "longdoc/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "longdoc/error.hpp"
#include "longdoc/hash.hpp"

extern char** environ;

namespace longdoc {

namespace {

using nlohmann::json;

struct TomlParser {
    std::string_view text;
    std::size_t pos = 0;
    std::size_t line = 1;
    const std::string& origin;

    [[noreturn]] void error(const std::string& message) const {
        fail(ErrorKind::config, origin + ":" + std::to_string(line) + ": " + message);
    }

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }

    void skip_inline_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos;
    }

    void skip_ws_and_comments() {
        while (!eof()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r') {
                ++pos;
            } else if (c == '\n') {
                ++pos;
                ++line;
            } else if (c == '#') {
                while (!eof() && peek() != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    void expect_line_end() {
        skip_inline_ws();
        if (!eof() && peek() == '#') {
            while (!eof() && peek() != '\n') ++pos;
        }
        if (eof()) return;
        if (peek() != '\n') error("unexpected trailing characters");
    }

    std::string parse_bare_key() {
        std::size_t begin = pos;
        while (!eof()) {
            char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '-') {
                ++pos;
            } else {
                break;
            }
        }
        if (pos == begin) error("expected a key");
        return std::string(text.substr(begin, pos - begin));
    }

    std::string parse_string() {
        ++pos;  // opening quote
        std::string out;
        while (true) {
            if (eof() || peek() == '\n') error("unterminated string");
            char c = text[pos++];
            if (c == '"') break;
            if (c == '\\') {
                if (eof()) error("unterminated escape");
                char e = text[pos++];
                switch (e) {
                    case 'n': out.push_back('\n'); break;
                    case 't': out.push_back('\t'); break;
                    case 'r': out.push_back('\r'); break;
                    case '"': out.push_back('"'); break;
                    case '\\': out.push_back('\\'); break;
                    default: error(std::string("unsupported escape \\") + e);
                }
            } else {
                out.push_back(c);
            }
        }
        return out;
    }

    json parse_value() {
        skip_inline_ws();
        if (eof()) error("expected a value");
        char c = peek();
        if (c == '"') return parse_string();
        if (c == '[') {
            ++pos;
            json array = json::array();
            skip_ws_and_comments();
            if (!eof() && peek() == ']') {
                ++pos;
                return array;
            }
            while (true) {
                skip_ws_and_comments();
                array.push_back(parse_value());
                skip_ws_and_comments();
                if (eof()) error("unterminated array");
                if (peek() == ',') {
                    ++pos;
                    skip_ws_and_comments();
                    if (!eof() && peek() == ']') {
                        ++pos;
                        return array;
                    }
                    continue;
                }
                if (peek() == ']') {
                    ++pos;
                    return array;
                }
                error("expected ',' or ']' in array");
            }
        }
        // bare scalar: bool, integer, or float
        std::size_t begin = pos;
        while (!eof() && peek() != '\n' && peek() != '#' && peek() != ',' && peek() != ']') ++pos;
        std::string raw(text.substr(begin, pos - begin));
        while (!raw.empty() && (raw.back() == ' ' || raw.back() == '\t' || raw.back() == '\r')) raw.pop_back();
        if (raw == "true") return true;
        if (raw == "false") return false;
        if (raw.empty()) error("expected a value");
        bool looks_float = raw.find_first_of(".eE") != std::string::npos;
        try {
            std::size_t used = 0;
            if (looks_float) {
                double d = std::stod(raw, &used);
                if (used != raw.size()) error("invalid number \"" + raw + "\"");
                return d;
            }
            long long i = std::stoll(raw, &used);
            if (used != raw.size()) error("invalid number \"" + raw + "\"");
            return i;
        } catch (const std::exception&) {
            error("invalid value \"" + raw + "\"");
        }
    }

    json parse() {
        json root = json::object();
        json* table = &root;
        while (true) {
            skip_ws_and_comments();
            if (eof()) break;
            if (peek() == '[') {
                ++pos;
                json* cursor = &root;
                while (true) {
                    skip_inline_ws();
                    std::string part = parse_bare_key();
                    cursor = &(*cursor)[part];
                    if (!cursor->is_object()) *cursor = json::object();
                    skip_inline_ws();
                    if (!eof() && peek() == '.') {
                        ++pos;
                        continue;
                    }
                    break;
                }
                if (eof() || peek() != ']') error("expected ']' after table name");
                ++pos;
                expect_line_end();
                table = cursor;
                continue;
            }
            std::string key = peek() == '"' ? parse_string() : parse_bare_key();
            skip_inline_ws();
            if (eof() || peek() != '=') error("expected '=' after key \"" + key + "\"");
            ++pos;
            (*table)[key] = parse_value();
            expect_line_end();
        }
        return root;
    }
};

json parse_scalar_for_override(const std::string& raw) {
    std::string origin = "env";
    TomlParser parser{raw, 0, 1, origin};
    json value = parser.parse_value();
    parser.skip_inline_ws();
    if (!parser.eof()) return raw;  // treat anything trailing as a plain string
    return value;
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string resolve_path(const std::string& base_dir, const std::string& path) {
    if (path.empty() || base_dir.empty()) return path;
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(base_dir) / p).string();
}

}  // namespace

json parse_toml(std::string_view text, const std::string& origin) {
    TomlParser parser{text, 0, 1, origin};
    return parser.parse();
}

json parse_toml_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::config, "cannot open config file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_toml(buffer.str(), path);
}

void apply_env_overrides(json& tree, const std::string& prefix) {
    for (char** env = environ; *env != nullptr; ++env) {
        std::string entry(*env);
        if (entry.rfind(prefix, 0) != 0) continue;
        std::size_t eq = entry.find('=');
        if (eq == std::string::npos) continue;
        std::string path = entry.substr(prefix.size(), eq - prefix.size());
        std::string raw = entry.substr(eq + 1);
        json* cursor = &tree;
        std::size_t start = 0;
        while (true) {
            std::size_t sep = path.find("__", start);
            std::string part = lower(path.substr(start, sep == std::string::npos ? std::string::npos : sep - start));
            if (part.empty()) break;
            if (sep == std::string::npos) {
                (*cursor)[part] = parse_scalar_for_override(raw);
                break;
            }
            cursor = &(*cursor)[part];
            if (!cursor->is_object()) *cursor = json::object();
            start = sep + 2;
        }
    }
}

std::string default_prompt_template() {
    return "You are given an article and a question. Find the parts of the article relevant to the question.\n\n"
           "Article: {document}\n\nQuestion: {query}";
}

PipelineConfig PipelineConfig::load(const std::string& path) {
    json tree = parse_toml_file(path);
    apply_env_overrides(tree);
    std::string base_dir = std::filesystem::path(path).parent_path().string();
    return from_json(tree, base_dir);
}

PipelineConfig PipelineConfig::from_json(const json& tree, const std::string& base_dir) {
    PipelineConfig cfg;
    try {
        if (tree.contains("attention")) {
            const json& a = tree["attention"];
            cfg.attention.kind = a.value("backend", cfg.attention.kind);
            cfg.attention.fixture = resolve_path(base_dir, a.value("fixture", std::string()));
            cfg.attention.url = a.value("url", std::string());
            cfg.attention.window_limit = a.value("window_limit", cfg.attention.window_limit);
            if (a.contains("layers")) cfg.attention.layers = a["layers"].get<std::vector<int>>();
            cfg.attention.prompt_template = a.value("template", cfg.attention.prompt_template);
            cfg.attention.normalize_layers = a.value("normalize_layers", false);
            if (a.contains("long_context")) {
                const json& lc = a["long_context"];
                cfg.attention.long_context.strategy =
                    parse_long_context_strategy(lc.value("strategy", std::string("none")));
                cfg.attention.long_context.segment_length = lc.value("segment_length", 0);
                cfg.attention.long_context.overlap = lc.value("overlap", 0);
                cfg.attention.long_context.cache_budget = lc.value("cache_budget", 0);
            }
        }
        if (tree.contains("embedding")) {
            const json& e = tree["embedding"];
            cfg.embedding.kind = e.value("backend", cfg.embedding.kind);
            cfg.embedding.fixture = resolve_path(base_dir, e.value("fixture", std::string()));
            cfg.embedding.url = e.value("url", std::string());
            cfg.embedding.dim = e.value("dim", cfg.embedding.dim);
            cfg.embedding.batch_size = e.value("batch_size", cfg.embedding.batch_size);
        }
        if (tree.contains("entity")) {
            cfg.recognizer.kind = tree["entity"].value("recognizer", cfg.recognizer.kind);
        }
        if (tree.contains("retrieval")) {
            const json& r = tree["retrieval"];
            cfg.k = r.value("k", cfg.k);
            cfg.ablation = parse_ablation(r.value("ablation", std::string("none")));
        }
        if (tree.contains("segmentation")) {
            const json& s = tree["segmentation"];
            cfg.segmentation.terminal_chars = s.value("terminal_chars", cfg.segmentation.terminal_chars);
            if (s.contains("extra_abbreviations")) {
                for (const auto& abbr : s["extra_abbreviations"]) {
                    cfg.segmentation.abbreviations.push_back(abbr.get<std::string>());
                }
            }
        }
        cfg.workers = tree.value("workers", cfg.workers);
        cfg.seed = tree.value("seed", cfg.seed);
        cfg.out_dir = resolve_path(base_dir, tree.value("out", cfg.out_dir));
    } catch (const json::exception& e) {
        fail(ErrorKind::config, std::string("malformed config value: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

void PipelineConfig::validate() const {
    if (k < 1) fail(ErrorKind::config, "retrieval.k must be >= 1");
    if (workers < 1) fail(ErrorKind::config, "workers must be >= 1");
    const bool attention_enabled = ablation != Ablation::embedding_only;
    if (attention_enabled) {
        if (attention.kind != "scripted" && attention.kind != "http") {
            fail(ErrorKind::config, "attention.backend must be \"scripted\" or \"http\"");
        }
        if (attention.layers.empty()) fail(ErrorKind::config, "attention.layers must be non-empty");
        if (attention.kind == "scripted") {
            if (attention.fixture.empty()) fail(ErrorKind::config, "attention.fixture is required for the scripted backend");
            if (!std::filesystem::exists(attention.fixture)) {
                fail(ErrorKind::config, "attention fixture not found: " + attention.fixture);
            }
        }
        if (attention.kind == "http" && attention.url.empty()) {
            fail(ErrorKind::config, "attention.url is required for the http backend");
        }
    }
    const bool embedding_enabled = ablation != Ablation::attention_only;
    if (embedding_enabled) {
        if (embedding.kind != "hashed" && embedding.kind != "scripted" && embedding.kind != "http") {
            fail(ErrorKind::config, "embedding.backend must be \"hashed\", \"scripted\", or \"http\"");
        }
        if (embedding.kind == "scripted") {
            if (embedding.fixture.empty()) fail(ErrorKind::config, "embedding.fixture is required for the scripted backend");
            if (!std::filesystem::exists(embedding.fixture)) {
                fail(ErrorKind::config, "embedding fixture not found: " + embedding.fixture);
            }
        }
        if (embedding.kind == "http" && embedding.url.empty()) {
            fail(ErrorKind::config, "embedding.url is required for the http backend");
        }
    }
    if (recognizer.kind != "capitalized") fail(ErrorKind::config, "entity.recognizer must be \"capitalized\"");
}

json PipelineConfig::to_json() const {
    return json{
        {"attention",
         {{"backend", attention.kind},
          {"fixture", attention.fixture},
          {"url", attention.url},
          {"window_limit", attention.window_limit},
          {"layers", attention.layers},
          {"template", attention.prompt_template},
          {"normalize_layers", attention.normalize_layers},
          {"long_context",
           {{"strategy", long_context_strategy_name(attention.long_context.strategy)},
            {"segment_length", attention.long_context.segment_length},
            {"overlap", attention.long_context.overlap},
            {"cache_budget", attention.long_context.cache_budget}}}}},
        {"embedding",
         {{"backend", embedding.kind},
          {"fixture", embedding.fixture},
          {"url", embedding.url},
          {"dim", embedding.dim},
          {"batch_size", embedding.batch_size}}},
        {"entity", {{"recognizer", recognizer.kind}}},
        {"retrieval", {{"k", k}, {"ablation", ablation_name(ablation)}}},
        {"segmentation",
         {{"terminal_chars", segmentation.terminal_chars}, {"abbreviations", segmentation.abbreviations}}},
        {"workers", workers},
        {"seed", seed},
        {"out", out_dir},
    };
}

std::string PipelineConfig::fingerprint() const {
    return hex64(fnv1a64(to_json().dump()));
}

}  // namespace longdoc
