#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "longdoc/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Long-document retrieval toolkit: attention + embedding sentence scoring with entity-based expansion"};
    app.require_subcommand(1);

    longdoc::cli::RetrieveArgs retrieve_args;
    CLI::App* retrieve = app.add_subcommand("retrieve", "Retrieve paragraphs from a document for one query");
    retrieve->add_option("--config", retrieve_args.config_path, "Pipeline config (TOML)")->required();
    retrieve->add_option("--doc", retrieve_args.document_path, "Document text file")->required();
    retrieve->add_option("--query", retrieve_args.query, "Query string")->required();
    retrieve->add_option("--k", retrieve_args.k, "Override top-k");
    retrieve->add_option("--strategy", retrieve_args.strategy, "Override long-context strategy (none|chunked|cascading)");
    retrieve->add_option("--ablation", retrieve_args.ablation, "Ablation arm (attn_only|emb_only|no_entity)");

    longdoc::cli::EvalArgs eval_args;
    std::string ks_csv;
    CLI::App* eval = app.add_subcommand("eval", "Evaluate retrieval F-1 over a JSONL dataset");
    eval->add_option("--config", eval_args.config_path, "Pipeline config (TOML)")->required();
    eval->add_option("--dataset", eval_args.dataset_path, "Canonical JSONL dataset")->required();
    eval->add_option("--ks", ks_csv, "Comma-separated top-k sweep (default 1,2,3,5)");
    eval->add_option("--out", eval_args.out_dir, "Output directory for report.json/report.csv");
    eval->add_option("--workers", eval_args.workers, "Worker threads (default from config)");
    eval->add_option("--ablation", eval_args.ablation, "Ablation arm (attn_only|emb_only|no_entity)");

    longdoc::cli::AnalyzeLayersArgs analyze_args;
    CLI::App* analyze = app.add_subcommand("analyze-layers", "Profile gold-paragraph rank per layer and subquery");
    analyze->add_option("--config", analyze_args.config_path, "Pipeline config (TOML)")->required();
    analyze->add_option("--dataset", analyze_args.dataset_path, "JSONL dataset with subquery decompositions")->required();
    analyze->add_option("--out", analyze_args.out_dir, "Output directory");

    longdoc::cli::NiahArgs niah_args;
    CLI::App* niah = app.add_subcommand("niah", "Needle-in-a-haystack head-count sweep");
    niah->add_option("--config", niah_args.config_path, "Pipeline config (TOML)")->required();
    niah->add_option("--haystack", niah_args.haystack_path, "Haystack spec (JSON)")->required();
    niah->add_option("--out", niah_args.out_dir, "Output directory");

    longdoc::cli::FixturesArgs fixtures_args;
    std::string layers_csv = "0";
    CLI::App* fixtures = app.add_subcommand("fixtures", "Generate scripted-backend fixtures");
    fixtures->add_option("kind", fixtures_args.kind, "attention | embedding | niah")->required();
    fixtures->add_option("--doc", fixtures_args.document_path, "Document text file (attention/embedding)");
    fixtures->add_option("--haystack", fixtures_args.haystack_path, "Haystack spec (niah)");
    fixtures->add_option("--query", fixtures_args.query, "Query string");
    fixtures->add_option("--out", fixtures_args.out_path, "Fixture output path")->required();
    fixtures->add_option("--layers", layers_csv, "Comma-separated layer ids (default 0)");
    fixtures->add_option("--heads", fixtures_args.heads, "Head count");
    fixtures->add_option("--dim", fixtures_args.dim, "Embedding dimension");
    fixtures->add_option("--spike-sentence", fixtures_args.spike_sentence, "Sentence receiving the planted signal");
    fixtures->add_option("--spike-heads", fixtures_args.spike_heads, "Heads pointing at the needle (niah)");
    fixtures->add_option("--window-limit", fixtures_args.window_limit, "Scripted window limit");
    fixtures->add_option("--seed", fixtures_args.seed, "RNG seed");

    CLI11_PARSE(app, argc, argv);

    auto parse_csv_ints = [](const std::string& csv) {
        std::vector<int> out;
        std::size_t start = 0;
        while (start <= csv.size() && !csv.empty()) {
            std::size_t comma = csv.find(',', start);
            std::string part = csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            if (!part.empty()) out.push_back(std::stoi(part));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        return out;
    };

    if (retrieve->parsed()) return longdoc::cli::cmd_retrieve(retrieve_args, std::cout, std::cerr);
    if (eval->parsed()) {
        eval_args.ks = parse_csv_ints(ks_csv);
        return longdoc::cli::cmd_eval(eval_args, std::cout, std::cerr);
    }
    if (analyze->parsed()) return longdoc::cli::cmd_analyze_layers(analyze_args, std::cout, std::cerr);
    if (niah->parsed()) return longdoc::cli::cmd_niah(niah_args, std::cout, std::cerr);
    if (fixtures->parsed()) {
        fixtures_args.layers = parse_csv_ints(layers_csv);
        return longdoc::cli::cmd_fixtures(fixtures_args, std::cout, std::cerr);
    }
    return 0;
}
