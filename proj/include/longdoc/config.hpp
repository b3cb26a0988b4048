#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "longdoc/backend.hpp"
#include "longdoc/corpus.hpp"
#include "longdoc/retrieval.hpp"

namespace longdoc {

/// Minimal TOML-style parser covering what the config format needs: [table]
/// and [table.sub] headers, key = value pairs, quoted strings, integers,
/// floats, booleans, flat arrays, and # comments.
nlohmann::json parse_toml(std::string_view text, const std::string& origin);
nlohmann::json parse_toml_file(const std::string& path);

/// Applies LONGDOC_-prefixed environment variables onto a parsed config tree;
/// double underscores separate nesting levels (LONGDOC_RETRIEVAL__K=5 sets
/// retrieval.k).
void apply_env_overrides(nlohmann::json& tree, const std::string& prefix = "LONGDOC_");

std::string default_prompt_template();

struct AttentionBackendConfig {
    std::string kind = "scripted";  // scripted | http
    std::string fixture;            // scripted fixture path
    std::string url;                // http bridge endpoint
    int window_limit = 8192;
    std::vector<int> layers;
    std::string prompt_template = default_prompt_template();
    LongContextConfig long_context;
    bool normalize_layers = false;
};

struct EmbeddingBackendConfig {
    std::string kind = "hashed";  // hashed | scripted | http
    std::string fixture;
    std::string url;
    int dim = 64;
    int batch_size = 32;
};

struct RecognizerConfig {
    std::string kind = "capitalized";
};

struct PipelineConfig {
    AttentionBackendConfig attention;
    EmbeddingBackendConfig embedding;
    RecognizerConfig recognizer;
    int k = 3;
    Ablation ablation = Ablation::none;
    SegmentationRules segmentation = SegmentationRules::defaults();
    int workers = 1;
    std::uint64_t seed = 0;
    std::string out_dir = ".";

    static PipelineConfig load(const std::string& path);
    static PipelineConfig from_json(const nlohmann::json& tree, const std::string& base_dir = "");

    /// Fully resolved canonical form; equal configs fingerprint equally.
    nlohmann::json to_json() const;
    std::string fingerprint() const;

    void validate() const;
};

}  // namespace longdoc
