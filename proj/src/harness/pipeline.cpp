#include <atomic>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "nfrbench/hash.hpp"
#include "nfrbench/harness.hpp"
#include "nfrbench/parser.hpp"
#include "nfrbench/text.hpp"

namespace nfrbench {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string CompletionCache::key(const std::string& provider_id, Stage stage, const std::string& task_id,
                                 const std::string& prompt, const SamplingConfig& sampling,
                                 const std::string& seed_label) {
    json j = {{"provider", provider_id},
              {"stage", std::string(to_string(stage))},
              {"task_id", task_id},
              {"prompt", prompt},
              {"sampling", sampling.hash()},
              {"seed", seed_label}};
    return sha256_hex(j.dump(-1, ' ', false, json::error_handler_t::replace));
}

std::optional<std::vector<std::string>> CompletionCache::get(const std::string& key) const {
    std::ifstream in(dir_ / (key + ".json"), std::ios::binary);
    if (!in) return std::nullopt;
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.contains("completions") || !j.at("completions").is_array()) return std::nullopt;
    try {
        return j.at("completions").get<std::vector<std::string>>();
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

void CompletionCache::put(const std::string& key, const std::vector<std::string>& completions) const {
    std::filesystem::create_directories(dir_);
    std::ostringstream tid;
    tid << std::this_thread::get_id();
    const auto tmp = dir_ / (key + ".json.tmp" + tid.str());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write cache entry " + tmp.string());
        out << json{{"completions", completions}}.dump(-1, ' ', false, json::error_handler_t::replace);
    }
    std::filesystem::rename(tmp, dir_ / (key + ".json"));
}

PipelineDeps make_deps(const RunConfig& cfg) {
    PipelineDeps deps;
    if (cfg.provider.kind == "mock") {
        deps.provider = MockProvider::from_directory(cfg.provider.fixtures_dir);
    } else {
        OpenAIOptions defaults;
        defaults.model = cfg.provider.model;
        defaults.timeout = std::chrono::seconds(cfg.provider.timeout_s);
        OpenAIOptions opts = OpenAIOptions::from_env(defaults);
        if (cfg.provider.base_url) opts.base_url = *cfg.provider.base_url;
        deps.provider = std::make_shared<OpenAIProvider>(opts);
    }
    if (cfg.runner.kind == "process") {
        deps.runner = std::make_shared<ProcessRunner>(cfg.runner.command, cfg.runner.pool_size);
    } else {
        deps.runner = std::make_shared<StubRunner>();
    }
    return deps;
}

std::optional<ProblemVerdicts> problem_verdicts(const ProblemRecord& p) {
    if (p.skipped || !p.generated_matrix || !p.gt_matrix) return std::nullopt;
    return ProblemVerdicts{p.task_id, p.generated_tests, *p.generated_matrix, p.gt_tests, *p.gt_matrix};
}

namespace {

void execute_problem(ProblemRecord& rec, Runner& runner, const RunRecord& run, int exec_parallelism) {
    rec.generated_matrix = run_matrix(runner, rec.candidates, rec.generated_tests, rec.limits, rec.mode,
                                      exec_parallelism);
    rec.gt_matrix = run_matrix(runner, rec.candidates, rec.gt_tests, rec.limits, rec.mode, exec_parallelism);
    const ProblemPassK pk = evaluate_problem(*problem_verdicts(rec), run.ks, run.weights);
    rec.scores = pk.scores;
    rec.ranking = pk.ranking;
}

class PipelineRun {
public:
    PipelineRun(const RunConfig& cfg, const PipelineDeps& deps, PipelineOptions opts)
        : cfg_(cfg),
          deps_(deps),
          opts_(opts),
          gateway_(deps.provider, cfg.provider.gateway),
          cache_(cfg.output_dir / "cache"),
          templates_(cfg.templates_dir ? PromptTemplates::load(*cfg.templates_dir) : PromptTemplates::builtin()) {
        if (cfg.icl_dir) examples_ = load_icl_examples(*cfg.icl_dir, cfg.icl_limit);
    }

    RunRecord run(const std::vector<Problem>& problems) {
        record_.config = config_to_json(cfg_);
        record_.ks = cfg_.ks;
        record_.weights = cfg_.weights;
        record_.problems.resize(problems.size());

        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mu;
        auto worker = [&] {
            for (std::size_t i; (i = next.fetch_add(1)) < problems.size();) {
                try {
                    process(problems[i], record_.problems[i]);
                } catch (...) {
                    std::lock_guard lock(failure_mu);
                    if (!failure) failure = std::current_exception();
                    next = problems.size();
                }
            }
        };
        const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(cfg_.parallelism), problems.size());
        if (n_threads <= 1) {
            worker();
        } else {
            std::vector<std::thread> threads;
            for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
            for (auto& t : threads) t.join();
        }
        if (failure) std::rethrow_exception(failure);

        record_.provider_calls = gateway_.stats().calls;
        record_.cache_hits = cache_hits_;
        return std::move(record_);
    }

private:
    void add_time(const std::string& stage, Clock::time_point since) {
        const double s = std::chrono::duration<double>(Clock::now() - since).count();
        std::lock_guard lock(time_mu_);
        record_.stage_seconds[stage] += s;
    }

    PromptPlan plan_for(Stage stage, ExtraContext extra) const {
        PromptPlan plan = make_plan(stage, examples_, std::move(extra));
        if (cfg_.nfr_instruction && (stage == Stage::Code || stage == Stage::CodeTdd)) plan.nfr_instruction = true;
        if (cfg_.preference_mode) plan = apply_preference(std::move(plan), *cfg_.preference_mode, cfg_.preference_targets);
        return plan;
    }

    StageArtifact generate(const Problem& p, Stage stage, std::string prompt, const SamplingConfig& sampling,
                           bool allow_call) {
        const auto started = Clock::now();
        StageArtifact a;
        a.prompt = std::move(prompt);
        const std::string key = CompletionCache::key(gateway_.provider().id(), stage, p.task_id, a.prompt, sampling,
                                                     cfg_.seed_label);
        if (cfg_.use_cache) {
            if (auto hit = cache_.get(key); hit && hit->size() == static_cast<std::size_t>(sampling.n)) {
                a.completions = std::move(*hit);
                a.cached = true;
                ++cache_hits_;
                return a;
            }
        }
        if (!allow_call) {
            throw ConfigError("stage '" + std::string(to_string(stage)) + "' is disabled and nothing is cached for " +
                              p.task_id);
        }
        for (auto& c : gateway_.complete(CompletionRequest{a.prompt, p.task_id, stage}, sampling)) {
            a.completions.push_back(std::move(c.text));
        }
        if (cfg_.use_cache) cache_.put(key, a.completions);
        add_time(std::string(to_string(stage)), started);
        return a;
    }

    void process(const Problem& p, ProblemRecord& rec) {
        rec.task_id = p.task_id;
        rec.mode = p.mode;
        rec.limits = p.limits;
        rec.gt_tests = p.gt_tests;
        try {
            generate_artifacts(p, rec);
        } catch (const GatewayError& e) {
            rec.skipped = e.what();
            return;
        }
        if (opts_.execute && !rec.candidates.empty()) {
            const auto started = Clock::now();
            execute_problem(rec, *deps_.runner, record_, cfg_.exec_parallelism);
            add_time("exec", started);
        }
    }

    void generate_artifacts(const Problem& p, ProblemRecord& rec) {
        const bool want_tests = cfg_.stages.count(Stage::Tests) > 0;
        const Stage code_stage = cfg_.code_stage();
        const bool want_code = cfg_.stages.count(code_stage) > 0;

        StageArtifact reqs = generate(p, Stage::Requirements, build_prompt(plan_for(Stage::Requirements, {}), p, templates_),
                                      cfg_.requirements_sampling, cfg_.stages.count(Stage::Requirements) > 0);
        std::vector<std::string> warnings;
        RequirementSet rs = parse_requirements_doc(reqs.completions.at(0), &warnings);
        for (auto& w : warnings) rec.warnings.push_back("requirements: " + w);
        const std::string r_text = rs.empty_buckets() ? std::string(text::trim(reqs.completions.at(0)))
                                                      : serialize_requirements(rs);
        rec.stages["requirements"] = std::move(reqs);
        rec.requirements = std::move(rs);

        auto tests_stage = [&, r_text] {
            ExtraContext extra;
            extra.requirements = r_text;
            return generate(p, Stage::Tests, build_prompt(plan_for(Stage::Tests, extra), p, templates_),
                            cfg_.tests_sampling, true);
        };
        auto take_tests = [&](StageArtifact art) {
            ParsedTestDoc parsed = parse_test_doc(art.completions.at(0), p.mode);
            for (auto& w : parsed.warnings) rec.warnings.push_back("tests: " + w);
            rec.generated_tests = std::move(parsed.tests);
            rec.stages["tests"] = std::move(art);
        };

        std::future<StageArtifact> pending_tests;
        if (want_tests) {
            if (code_stage == Stage::CodeTdd) {
                take_tests(tests_stage());
            } else {
                pending_tests = std::async(std::launch::async, tests_stage);
            }
        }

        std::optional<StageArtifact> code;
        std::exception_ptr code_failure;
        if (want_code) {
            try {
                ExtraContext extra;
                extra.requirements = r_text;
                if (code_stage == Stage::CodeTdd) {
                    extra.tests = rec.generated_tests.empty()
                                      ? std::string(text::trim(rec.stages.at("tests").completions.at(0)))
                                      : serialize_test_doc(rec.generated_tests, p.mode);
                }
                code = generate(p, code_stage, build_prompt(plan_for(code_stage, extra), p, templates_),
                                cfg_.code_sampling, true);
            } catch (...) {
                code_failure = std::current_exception();
            }
        }
        if (pending_tests.valid()) take_tests(pending_tests.get());
        if (code_failure) std::rethrow_exception(code_failure);

        if (code) {
            const std::string provider_id = gateway_.provider().id();
            const std::string sampling_hash = cfg_.code_sampling.hash();
            for (std::size_t i = 0; i < code->completions.size(); ++i) {
                CodeCandidate c;
                c.task_id = p.task_id;
                c.sample_index = static_cast<int>(i);
                c.provenance = Provenance{provider_id, sampling_hash};
                try {
                    ExtractedCode ex = split_code_completion(code->completions[i]);
                    c.source = std::move(ex.code);
                    c.reasoning = std::move(ex.reasoning);
                } catch (const EmptyCode&) {
                    rec.warnings.push_back("code sample " + std::to_string(i) + ": no code");
                }
                rec.candidates.push_back(std::move(c));
            }
            rec.stages[std::string(to_string(code_stage))] = std::move(*code);
        }
    }

    const RunConfig& cfg_;
    const PipelineDeps& deps_;
    PipelineOptions opts_;
    Gateway gateway_;
    CompletionCache cache_;
    PromptTemplates templates_;
    std::vector<IclExample> examples_;
    RunRecord record_;
    std::atomic<std::int64_t> cache_hits_{0};
    std::mutex time_mu_;
};

}  // namespace

RunRecord run_pipeline(const RunConfig& cfg, const PipelineDeps& deps, PipelineOptions opts) {
    cfg.validate();
    if (!deps.provider || !deps.runner) throw std::invalid_argument("pipeline needs a provider and a runner");
    const Dataset ds = load_dataset(cfg.dataset);
    PipelineRun run(cfg, deps, opts);
    return run.run(ds.problems);
}

RunRecord rescore(RunRecord record, Runner& runner, int exec_parallelism) {
    for (auto& p : record.problems) {
        if (p.skipped || p.candidates.empty()) continue;
        const auto started = Clock::now();
        execute_problem(p, runner, record, exec_parallelism);
        record.stage_seconds["exec"] += std::chrono::duration<double>(Clock::now() - started).count();
    }
    return record;
}

QcResult qc_filter_fr_tests(const Problem& problem, const std::vector<GeneratedTest>& candidate_tests,
                            Runner& runner) {
    if (!problem.canonical_solution) throw MissingGroundTruth(problem.task_id);
    for (const auto& t : candidate_tests) {
        if (!is_functional(t.category)) {
            throw std::invalid_argument("test " + t.test_id + " is not a functional test");
        }
    }
    QcResult out;
    if (candidate_tests.empty()) return out;
    CodeCandidate gt;
    gt.task_id = problem.task_id;
    gt.source = *problem.canonical_solution;
    const auto verdicts = run_candidate(runner, gt, candidate_tests, problem.limits, problem.mode);
    for (std::size_t i = 0; i < candidate_tests.size(); ++i) {
        if (verdicts[i].status == VerdictStatus::Pass) {
            out.kept.push_back(candidate_tests[i]);
        } else {
            out.discarded.emplace_back(candidate_tests[i], verdicts[i]);
        }
    }
    return out;
}

}  // namespace nfrbench
