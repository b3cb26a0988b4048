#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "longdoc/config.hpp"
#include "longdoc/corpus.hpp"

namespace longdoc {

struct F1Result {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Paragraph-level precision/recall/F-1 on index sets. Throws
/// ErrorKind::empty_gold when gold is empty; empty retrieved scores 0.
F1Result retrieval_f1(std::span<const int> retrieved, std::span<const int> gold);

struct SampleEvalRow {
    std::string sample_id;
    int k = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double seconds = 0.0;
    bool failed = false;
    std::string error;
};

struct KAggregate {
    int k = 0;
    double mean_f1 = 0.0;
    double mean_seconds = 0.0;
};

struct EvalReport {
    std::string config_fingerprint;
    std::vector<int> ks;
    std::vector<SampleEvalRow> per_sample;
    std::vector<KAggregate> aggregates;
    std::vector<std::string> failed_ids;
};

/// Runs the full pipeline per (k, sample), timing indexing + retrieval with a
/// monotonic clock. Per-sample failures score 0 and are flagged, not fatal.
/// cfg.workers > 1 evaluates samples in a worker pool, one Pipeline per
/// worker; scores are independent of the worker count.
EvalReport run_eval(const std::vector<RetrievalSample>& samples, const PipelineConfig& cfg, const std::vector<int>& ks);

nlohmann::json report_to_json(const EvalReport& report);
void write_report_json(const EvalReport& report, const std::string& path);
void write_report_csv(const EvalReport& report, const std::string& path);

}  // namespace longdoc
