#include "longdoc/eval.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <thread>

#include "longdoc/error.hpp"
#include "longdoc/pipeline.hpp"

namespace longdoc {

F1Result retrieval_f1(std::span<const int> retrieved, std::span<const int> gold) {
    std::set<int> retrieved_set(retrieved.begin(), retrieved.end());
    std::set<int> gold_set(gold.begin(), gold.end());
    if (gold_set.empty()) fail(ErrorKind::empty_gold, "gold paragraph set is empty");

    std::size_t intersection = 0;
    for (int p : retrieved_set) intersection += gold_set.count(p);

    F1Result result;
    result.precision = retrieved_set.empty() ? 0.0 : static_cast<double>(intersection) / static_cast<double>(retrieved_set.size());
    result.recall = static_cast<double>(intersection) / static_cast<double>(gold_set.size());
    result.f1 = result.precision + result.recall == 0.0
                    ? 0.0
                    : 2.0 * result.precision * result.recall / (result.precision + result.recall);
    return result;
}

namespace {

void evaluate_range(const std::vector<RetrievalSample>& samples, const PipelineConfig& cfg, const std::vector<int>& ks,
                    std::size_t begin, std::size_t end, std::vector<SampleEvalRow>& rows) {
    Pipeline pipeline(cfg);
    for (std::size_t s = begin; s < end; ++s) {
        for (std::size_t ki = 0; ki < ks.size(); ++ki) {
            SampleEvalRow& row = rows[ki * samples.size() + s];
            row.sample_id = samples[s].sample_id;
            row.k = ks[ki];
            const auto start = std::chrono::steady_clock::now();
            try {
                RetrievalResult result = pipeline.run(samples[s], ks[ki]);
                F1Result f1 = retrieval_f1(result.paragraphs, samples[s].gold_paragraphs);
                row.precision = f1.precision;
                row.recall = f1.recall;
                row.f1 = f1.f1;
            } catch (const std::exception& e) {
                row.failed = true;
                row.error = e.what();
                row.precision = row.recall = row.f1 = 0.0;
            }
            row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
    }
}

}  // namespace

EvalReport run_eval(const std::vector<RetrievalSample>& samples, const PipelineConfig& cfg, const std::vector<int>& ks) {
    if (ks.empty()) fail(ErrorKind::invalid_k, "k sweep must be non-empty");
    for (int k : ks) {
        if (k < 1) fail(ErrorKind::invalid_k, "top_k must be >= 1, got " + std::to_string(k));
    }

    EvalReport report;
    report.config_fingerprint = cfg.fingerprint();
    report.ks = ks;
    report.per_sample.assign(ks.size() * samples.size(), SampleEvalRow{});

    const int workers = std::min<int>(cfg.workers, std::max<std::size_t>(samples.size(), 1));
    if (workers <= 1) {
        evaluate_range(samples, cfg, ks, 0, samples.size(), report.per_sample);
    } else {
        std::vector<std::thread> pool;
        const std::size_t per_worker = (samples.size() + static_cast<std::size_t>(workers) - 1) / static_cast<std::size_t>(workers);
        for (int w = 0; w < workers; ++w) {
            std::size_t begin = static_cast<std::size_t>(w) * per_worker;
            std::size_t end = std::min(begin + per_worker, samples.size());
            if (begin >= end) break;
            pool.emplace_back([&, begin, end] { evaluate_range(samples, cfg, ks, begin, end, report.per_sample); });
        }
        for (std::thread& t : pool) t.join();
    }

    std::set<std::string> failed;
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
        KAggregate aggregate;
        aggregate.k = ks[ki];
        for (std::size_t s = 0; s < samples.size(); ++s) {
            const SampleEvalRow& row = report.per_sample[ki * samples.size() + s];
            aggregate.mean_f1 += row.f1;
            aggregate.mean_seconds += row.seconds;
            if (row.failed) failed.insert(row.sample_id);
        }
        if (!samples.empty()) {
            aggregate.mean_f1 /= static_cast<double>(samples.size());
            aggregate.mean_seconds /= static_cast<double>(samples.size());
        }
        report.aggregates.push_back(aggregate);
    }
    report.failed_ids.assign(failed.begin(), failed.end());
    return report;
}

nlohmann::json report_to_json(const EvalReport& report) {
    nlohmann::json per_sample = nlohmann::json::array();
    for (const SampleEvalRow& row : report.per_sample) {
        nlohmann::json j{{"sample_id", row.sample_id}, {"k", row.k},          {"precision", row.precision},
                         {"recall", row.recall},       {"f1", row.f1},        {"seconds", row.seconds}};
        if (row.failed) j["error"] = row.error;
        per_sample.push_back(std::move(j));
    }
    nlohmann::json aggregates = nlohmann::json::array();
    for (const KAggregate& a : report.aggregates) {
        aggregates.push_back({{"k", a.k}, {"mean_f1", a.mean_f1}, {"mean_seconds", a.mean_seconds}});
    }
    return nlohmann::json{{"config_fingerprint", report.config_fingerprint},
                          {"ks", report.ks},
                          {"per_sample", std::move(per_sample)},
                          {"aggregates", std::move(aggregates)},
                          {"failed_ids", report.failed_ids}};
}

void write_report_json(const EvalReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::config, "cannot write report to " + path);
    out << report_to_json(report).dump(2) << "\n";
}

void write_report_csv(const EvalReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::config, "cannot write report to " + path);
    out << "sample_id,k,f1,seconds\n";
    for (const SampleEvalRow& row : report.per_sample) {
        out << row.sample_id << "," << row.k << "," << row.f1 << "," << row.seconds << "\n";
    }
}

}  // namespace longdoc
