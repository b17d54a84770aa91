#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "nfrbench/gateway.hpp"
#include "nfrbench/model.hpp"
#include "nfrbench/orchestrator.hpp"
#include "nfrbench/prompt.hpp"
#include "nfrbench/ranker.hpp"

namespace nfrbench {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MissingGroundTruth : public std::invalid_argument {
public:
    explicit MissingGroundTruth(const std::string& task_id)
        : std::invalid_argument("problem " + task_id + " has no canonical solution") {}
};

// ---------------------------------------------------------------------------
// Datasets
// ---------------------------------------------------------------------------

struct Dataset {
    std::vector<Problem> problems;
    std::vector<std::string> warnings;
};

/// One Problem per non-blank JSON line. Throws SchemaError carrying the
/// 1-based line number of the first offending line.
Dataset load_dataset(const std::filesystem::path& path);
Dataset parse_dataset(std::string_view jsonl);

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct ProviderConfig {
    std::string kind = "mock";  // mock | openai
    std::filesystem::path fixtures_dir;
    std::string model = "gpt-3.5-turbo-16k";
    std::optional<std::string> base_url;
    int timeout_s = 120;
    GatewayOptions gateway;
};

struct RunnerConfig {
    std::string kind = "stub";  // stub | process
    std::vector<std::string> command;
    int pool_size = 4;
};

struct RunConfig {
    std::filesystem::path dataset;
    std::filesystem::path output_dir = "nfrbench-out";
    std::string seed_label;

    ProviderConfig provider;
    RunnerConfig runner;

    std::set<Stage> stages{Stage::Requirements, Stage::Code, Stage::Tests};
    SamplingConfig requirements_sampling = SamplingConfig::greedy(1);
    SamplingConfig code_sampling;
    SamplingConfig tests_sampling = SamplingConfig::greedy(1);

    std::optional<std::filesystem::path> icl_dir;
    std::optional<std::size_t> icl_limit;
    std::optional<std::filesystem::path> templates_dir;
    // Fixed NFR paragraph in code-stage prompts (ablation; off by default).
    bool nfr_instruction = false;
    std::optional<PreferenceMode> preference_mode;
    std::set<Category> preference_targets;

    WeightProfile weights;
    std::vector<int> ks{1};
    int parallelism = 1;       // problems in flight
    int exec_parallelism = 4;  // candidate rows in flight per matrix
    bool use_cache = true;

    /// Code-generating stage in use: Code or CodeTdd.
    Stage code_stage() const;
    /// Throws ConfigError on invalid combinations.
    void validate() const;
};

/// Relative paths in `j` resolve against `base_dir`.
RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig load_config(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Run records
// ---------------------------------------------------------------------------

struct StageArtifact {
    std::string prompt;
    std::vector<std::string> completions;
    bool cached = false;
};

struct ProblemRecord {
    std::string task_id;
    ProblemMode mode = ProblemMode::Function;
    ResourceLimits limits;
    std::optional<std::string> skipped;

    std::map<std::string, StageArtifact> stages;
    std::optional<RequirementSet> requirements;
    std::vector<GeneratedTest> generated_tests;
    std::vector<std::string> warnings;
    std::vector<CodeCandidate> candidates;
    std::vector<GeneratedTest> gt_tests;

    std::optional<VerdictMatrix> generated_matrix;
    std::optional<VerdictMatrix> gt_matrix;
    std::vector<ScoredCandidate> scores;
    std::vector<int> ranking;
};

struct RunRecord {
    nlohmann::json config;
    std::vector<int> ks;
    WeightProfile weights;
    std::vector<ProblemRecord> problems;

    // Run-dependent bookkeeping, kept out of reports.
    std::map<std::string, double> stage_seconds;
    std::int64_t provider_calls = 0;
    std::int64_t cache_hits = 0;

    std::size_t skipped_count() const;
    std::size_t aborted_rows() const;
};

nlohmann::json record_to_json(const RunRecord& r);
RunRecord record_from_json(const nlohmann::json& j);
void save_record(const RunRecord& r, const std::filesystem::path& path);
RunRecord load_record(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

/// Completion cache under `<output_dir>/cache`, one file per request key.
class CompletionCache {
public:
    explicit CompletionCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

    static std::string key(const std::string& provider_id, Stage stage, const std::string& task_id,
                           const std::string& prompt, const SamplingConfig& sampling,
                           const std::string& seed_label = {});
    std::optional<std::vector<std::string>> get(const std::string& key) const;
    void put(const std::string& key, const std::vector<std::string>& completions) const;

private:
    std::filesystem::path dir_;
};

struct PipelineDeps {
    std::shared_ptr<CompletionProvider> provider;
    std::shared_ptr<Runner> runner;
};

/// Provider and runner described by the config.
PipelineDeps make_deps(const RunConfig& cfg);

struct PipelineOptions {
    /// Run the matrices and score; generation-only commands turn this off.
    bool execute = true;
};

RunRecord run_pipeline(const RunConfig& cfg, const PipelineDeps& deps, PipelineOptions opts = {});

/// Re-runs execution and scoring over the artifacts of a stored record.
RunRecord rescore(RunRecord record, Runner& runner, int exec_parallelism);

/// Verdict data of one recorded problem, or nullopt when it was skipped or
/// never executed.
std::optional<ProblemVerdicts> problem_verdicts(const ProblemRecord& p);

// ---------------------------------------------------------------------------
// Quality control
// ---------------------------------------------------------------------------

struct QcResult {
    std::vector<GeneratedTest> kept;
    std::vector<std::pair<GeneratedTest, Verdict>> discarded;
};

/// Keeps the functional tests the canonical solution passes.
QcResult qc_filter_fr_tests(const Problem& problem, const std::vector<GeneratedTest>& candidate_tests,
                            Runner& runner);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

PassKReport compute_report(const RunRecord& record);

/// Canonical JSON report: sorted keys, no wall-clock or cache fields.
nlohmann::json report_json(const RunRecord& record);
std::string report_text(const RunRecord& record);

/// Writes report.json and report.txt into `dir`.
void emit_report(const RunRecord& record, const std::filesystem::path& dir);

}  // namespace nfrbench
