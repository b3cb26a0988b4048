#include "longdoc/commands.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "longdoc/analysis.hpp"
#include "longdoc/config.hpp"
#include "longdoc/error.hpp"
#include "longdoc/eval.hpp"
#include "longdoc/fixturegen.hpp"
#include "longdoc/pipeline.hpp"

namespace longdoc::cli {

namespace {

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::backend:
        case ErrorKind::context_overflow:
        case ErrorKind::shape_mismatch:
        case ErrorKind::zero_norm:
            return 3;
        default:
            return 2;
    }
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::config, "cannot open file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::config, "cannot write " + path);
    out << text;
}

std::string ensure_out_dir(const std::string& dir) {
    if (!dir.empty()) std::filesystem::create_directories(dir);
    return dir.empty() ? "." : dir;
}

}  // namespace

int cmd_retrieve(const RetrieveArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        PipelineConfig cfg = PipelineConfig::load(args.config_path);
        if (args.k > 0) cfg.k = args.k;
        if (!args.strategy.empty()) cfg.attention.long_context.strategy = parse_long_context_strategy(args.strategy);
        if (!args.ablation.empty()) cfg.ablation = parse_ablation(args.ablation);
        cfg.validate();

        RetrievalSample sample;
        sample.sample_id = std::filesystem::path(args.document_path).filename().string();
        sample.document = segment_document(read_file(args.document_path), cfg.segmentation, sample.sample_id);
        sample.query = args.query;

        Pipeline pipeline(cfg);
        RetrievalResult result = pipeline.run(sample);
        EntityIndex index;
        if (cfg.ablation != Ablation::no_entity) index = extract_entities(sample.document, pipeline.recognizer());
        out << retrieval_result_to_json(result, index).dump(2) << "\n";
        return 0;
    });
}

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        PipelineConfig cfg = PipelineConfig::load(args.config_path);
        if (args.workers > 0) cfg.workers = args.workers;
        if (!args.ablation.empty()) cfg.ablation = parse_ablation(args.ablation);
        if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
        cfg.validate();

        std::vector<int> ks = args.ks.empty() ? std::vector<int>{1, 2, 3, 5} : args.ks;
        std::vector<RetrievalSample> samples = load_dataset(args.dataset_path, cfg.segmentation);
        EvalReport report = run_eval(samples, cfg, ks);

        const std::string dir = ensure_out_dir(cfg.out_dir);
        write_report_json(report, dir + "/report.json");
        write_report_csv(report, dir + "/report.csv");

        out << "k\tmean_f1\tmean_seconds\n";
        for (const KAggregate& a : report.aggregates) {
            out << a.k << "\t" << std::fixed << std::setprecision(4) << a.mean_f1 << "\t" << std::setprecision(4)
                << a.mean_seconds << "\n";
        }
        if (!report.failed_ids.empty()) {
            err << report.failed_ids.size() << " sample(s) failed; see report.json\n";
        }
        return 0;
    });
}

int cmd_analyze_layers(const AnalyzeLayersArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        PipelineConfig cfg = PipelineConfig::load(args.config_path);
        if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
        std::vector<RetrievalSample> samples = load_dataset(args.dataset_path, cfg.segmentation);

        auto backend = make_attention_backend(cfg.attention);
        LayerProfile profile = profile_layers(samples, *backend, cfg.attention.layers);

        const std::string dir = ensure_out_dir(cfg.out_dir);
        nlohmann::json profile_json = layer_profile_to_json(profile);
        write_text(dir + "/layer_profile.json", profile_json.dump(2) + "\n");

        std::ostringstream csv;
        csv << "layer,subquery,mean_rank\n";
        for (std::size_t li = 0; li < profile.layer_ids.size(); ++li) {
            for (int sq = 0; sq < profile.subquery_count(); ++sq) {
                csv << profile.layer_ids[li] << "," << sq + 1 << "," << profile.ranks[li][static_cast<std::size_t>(sq)]
                    << "\n";
            }
        }
        write_text(dir + "/layer_ranks.csv", csv.str());

        out << profile_json.dump(2) << "\n";
        return 0;
    });
}

int cmd_niah(const NiahArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        PipelineConfig cfg = PipelineConfig::load(args.config_path);
        if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
        HaystackSpec spec = HaystackSpec::from_file(args.haystack_path);

        auto backend = make_attention_backend(cfg.attention);
        std::ostringstream csv;
        csv << "layer,depth,head_count\n";
        nlohmann::json rows = nlohmann::json::array();
        for (const HaystackDocument& hd : build_haystack(spec, cfg.segmentation)) {
            auto [tensor, alignment] =
                forward_with_attention(*backend, hd.document, spec.query, cfg.attention.layers, cfg.attention.long_context);
            const TokenSpan needle = alignment.paragraph_token_spans[static_cast<std::size_t>(hd.needle_paragraph)];
            std::vector<int> counts = needle_head_count(tensor, needle);
            for (std::size_t li = 0; li < counts.size(); ++li) {
                csv << tensor.layer_ids[li] << "," << hd.depth << "," << counts[li] << "\n";
                rows.push_back({{"layer", tensor.layer_ids[li]}, {"depth", hd.depth}, {"head_count", counts[li]}});
            }
        }
        const std::string dir = ensure_out_dir(cfg.out_dir);
        write_text(dir + "/niah_head_counts.csv", csv.str());
        out << rows.dump(2) << "\n";
        return 0;
    });
}

int cmd_fixtures(const FixturesArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (args.out_path.empty()) fail(ErrorKind::config, "--out is required");
        nlohmann::json fixture;
        if (args.kind == "attention") {
            SegmentedDocument doc = segment_document(read_file(args.document_path));
            AttentionFixtureOptions options;
            options.layer_ids = args.layers;
            options.head_count = args.heads;
            options.spike_sentence = args.spike_sentence;
            options.window_limit = args.window_limit;
            options.seed = args.seed;
            fixture = make_attention_fixture(doc, args.query, options);
        } else if (args.kind == "embedding") {
            SegmentedDocument doc = segment_document(read_file(args.document_path));
            EmbeddingFixtureOptions options;
            options.dim = args.dim;
            options.gold_sentence = args.spike_sentence;
            options.seed = args.seed;
            fixture = make_embedding_fixture(doc, args.query, options);
        } else if (args.kind == "niah") {
            HaystackSpec spec = HaystackSpec::from_file(args.haystack_path);
            NiahFixtureOptions options;
            options.layer_ids = args.layers;
            options.head_count = args.heads;
            options.spike_heads = args.spike_heads;
            options.seed = args.seed;
            fixture = make_niah_fixture(spec, options);
        } else {
            fail(ErrorKind::config, "fixtures kind must be attention, embedding, or niah");
        }
        write_text(args.out_path, fixture.dump() + "\n");
        out << nlohmann::json{{"written", args.out_path}}.dump() << "\n";
        return 0;
    });
}

}  // namespace longdoc::cli
