#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace longdoc::cli {

// exit codes: 0 success, 2 config/data errors, 3 backend errors

struct RetrieveArgs {
    std::string config_path;
    std::string document_path;
    std::string query;
    int k = 0;  // 0 = config value
    std::string strategy;
    std::string ablation;
};

int cmd_retrieve(const RetrieveArgs& args, std::ostream& out, std::ostream& err);

struct EvalArgs {
    std::string config_path;
    std::string dataset_path;
    std::vector<int> ks;  // empty = {1, 2, 3, 5}
    std::string out_dir;  // empty = config value
    int workers = 0;      // 0 = config value
    std::string ablation;
};

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);

struct AnalyzeLayersArgs {
    std::string config_path;
    std::string dataset_path;
    std::string out_dir;
};

int cmd_analyze_layers(const AnalyzeLayersArgs& args, std::ostream& out, std::ostream& err);

struct NiahArgs {
    std::string config_path;
    std::string haystack_path;
    std::string out_dir;
};

int cmd_niah(const NiahArgs& args, std::ostream& out, std::ostream& err);

struct FixturesArgs {
    std::string kind;  // attention | embedding | niah
    std::string document_path;
    std::string haystack_path;
    std::string query;
    std::string out_path;
    std::vector<int> layers = {0};
    int heads = 2;
    int dim = 16;
    int spike_sentence = -1;
    int spike_heads = 3;
    int window_limit = 8192;
    std::uint64_t seed = 0;
};

int cmd_fixtures(const FixturesArgs& args, std::ostream& out, std::ostream& err);

}  // namespace longdoc::cli
