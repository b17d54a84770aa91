#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "nfrbench/harness.hpp"
#include "nfrbench/json_io.hpp"
#include "nfrbench/text.hpp"

namespace nb = nfrbench;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kProvider = 3, kRunner = 4 };

struct Overrides {
    std::string config;
    std::string dataset;
    std::string output_dir;
    std::string seed_label;
    std::string provider;
    std::string fixtures;
    std::string model;
    std::string base_url;
    std::string runner;
    std::vector<std::string> runner_cmd;
    std::optional<int> n;
    std::optional<double> temperature;
    std::optional<double> top_p;
    std::vector<int> ks;
    std::optional<int> parallelism;
    std::optional<int> exec_parallelism;
    std::vector<std::string> weights;
    std::string normalization;
    std::string preference_mode;
    std::vector<std::string> prefer;
    std::vector<std::string> stages;
    bool no_cache = false;
    bool nfr_instruction = false;
};

void add_config_options(CLI::App* app, Overrides& o) {
    app->add_option("-c,--config", o.config, "JSON run configuration");
    app->add_option("--dataset", o.dataset, "problem file (JSON lines)");
    app->add_option("-o,--output-dir", o.output_dir, "output directory");
    app->add_option("--seed-label", o.seed_label, "label folded into cache keys");
    app->add_option("--provider", o.provider, "mock | openai");
    app->add_option("--fixtures", o.fixtures, "mock fixture directory");
    app->add_option("--model", o.model, "model name for the openai provider");
    app->add_option("--base-url", o.base_url, "OpenAI-compatible endpoint");
    app->add_option("--runner", o.runner, "stub | process");
    app->add_option("--runner-cmd", o.runner_cmd, "runner command line (process runner)");
    app->add_option("-n,--samples", o.n, "code samples per problem");
    app->add_option("--temperature", o.temperature, "code-stage temperature");
    app->add_option("--top-p", o.top_p, "code-stage nucleus top_p");
    app->add_option("-k,--k", o.ks, "Pass@k values");
    app->add_option("-j,--parallelism", o.parallelism, "problems processed concurrently");
    app->add_option("--exec-parallelism", o.exec_parallelism, "candidates executed concurrently");
    app->add_option("--weight", o.weights, "category=weight for filtering");
    app->add_option("--normalization", o.normalization, "per_category | per_test");
    app->add_option("--preference-mode", o.preference_mode, "instruction | plug_and_play");
    app->add_option("--prefer", o.prefer, "NFR category to prioritise");
    app->add_option("--stages", o.stages, "enabled stages");
    app->add_flag("--no-cache", o.no_cache, "ignore and do not write the completion cache");
    app->add_flag("--nfr-instruction", o.nfr_instruction, "add the fixed NFR paragraph to code prompts");
}

nb::Category parse_category(const std::string& s) {
    try {
        return nb::category_from_string(s);
    } catch (const nb::UnknownCategory&) {
        return nb::normalize_category(s);
    }
}

nb::RunConfig resolve_config(const Overrides& o) {
    nb::RunConfig cfg = o.config.empty() ? nb::RunConfig{} : nb::load_config(o.config);
    if (!o.dataset.empty()) cfg.dataset = o.dataset;
    if (!o.output_dir.empty()) cfg.output_dir = o.output_dir;
    if (!o.seed_label.empty()) cfg.seed_label = o.seed_label;
    if (!o.provider.empty()) cfg.provider.kind = o.provider;
    if (!o.fixtures.empty()) cfg.provider.fixtures_dir = o.fixtures;
    if (!o.model.empty()) cfg.provider.model = o.model;
    if (!o.base_url.empty()) cfg.provider.base_url = o.base_url;
    if (!o.runner.empty()) cfg.runner.kind = o.runner;
    if (!o.runner_cmd.empty()) cfg.runner.command = o.runner_cmd;
    if (o.n) cfg.code_sampling.n = *o.n;
    if (o.temperature) cfg.code_sampling.temperature = *o.temperature;
    if (o.top_p) cfg.code_sampling.top_p = *o.top_p;
    if (!o.ks.empty()) cfg.ks = o.ks;
    if (o.parallelism) cfg.parallelism = *o.parallelism;
    if (o.exec_parallelism) cfg.exec_parallelism = *o.exec_parallelism;
    for (const auto& w : o.weights) {
        const auto eq = w.find('=');
        if (eq == std::string::npos) throw nb::ConfigError("--weight expects category=value, got '" + w + "'");
        try {
            cfg.weights.set(parse_category(w.substr(0, eq)), std::stod(w.substr(eq + 1)));
        } catch (const nb::UnknownCategory& e) {
            throw nb::ConfigError(e.what());
        } catch (const std::logic_error&) {
            throw nb::ConfigError("bad weight '" + w + "'");
        }
    }
    if (!o.normalization.empty()) {
        try {
            cfg.weights.normalization = nb::normalization_from_string(o.normalization);
        } catch (const std::invalid_argument& e) {
            throw nb::ConfigError(e.what());
        }
    }
    if (!o.preference_mode.empty()) {
        try {
            cfg.preference_mode = nb::preference_mode_from_string(o.preference_mode);
        } catch (const std::invalid_argument& e) {
            throw nb::ConfigError(e.what());
        }
    }
    for (const auto& p : o.prefer) {
        try {
            cfg.preference_targets.insert(parse_category(p));
        } catch (const nb::UnknownCategory& e) {
            throw nb::ConfigError(e.what());
        }
        if (!cfg.preference_mode) cfg.preference_mode = nb::PreferenceMode::Instruction;
    }
    if (!o.stages.empty()) {
        cfg.stages.clear();
        for (const auto& s : o.stages) {
            try {
                cfg.stages.insert(nb::stage_from_string(s));
            } catch (const std::invalid_argument& e) {
                throw nb::ConfigError(e.what());
            }
        }
    }
    if (o.no_cache) cfg.use_cache = false;
    if (o.nfr_instruction) cfg.nfr_instruction = true;
    return cfg;
}

int exit_for(const nb::RunRecord& r) {
    if (r.skipped_count() > 0) {
        std::cerr << r.skipped_count() << " problem(s) skipped after provider failures\n";
        return kProvider;
    }
    if (r.aborted_rows() > 0) {
        std::cerr << r.aborted_rows() << " candidate row(s) aborted by runner failures\n";
        return kRunner;
    }
    return kOk;
}

int generate(const Overrides& o, std::optional<nb::Stage> upto) {
    nb::RunConfig cfg = resolve_config(o);
    nb::PipelineOptions opts;
    if (upto) {
        opts.execute = false;
        std::set<nb::Stage> keep;
        for (nb::Stage s : cfg.stages) {
            const bool wanted = s == nb::Stage::Requirements ||
                                (*upto != nb::Stage::Requirements && s == nb::Stage::Tests) ||
                                (*upto == nb::Stage::Code && (s == nb::Stage::Code || s == nb::Stage::CodeTdd));
            if (wanted) keep.insert(s);
        }
        if (*upto == nb::Stage::Code && !cfg.stages.count(nb::Stage::CodeTdd)) keep.erase(nb::Stage::Tests);
        if (keep.empty()) throw nb::ConfigError("no configured stage up to " + std::string(nb::to_string(*upto)));
        cfg.stages = keep;
    }
    cfg.validate();
    const auto deps = nb::make_deps(cfg);
    nb::RunRecord record = nb::run_pipeline(cfg, deps, opts);
    nb::save_record(record, cfg.output_dir / "run_record.json");
    if (!upto) {
        nb::emit_report(record, cfg.output_dir);
        std::cout << nb::report_text(record);
    } else {
        std::cout << "wrote " << (cfg.output_dir / "run_record.json").string() << " (" << record.problems.size()
                  << " problems, " << record.provider_calls << " provider calls, " << record.cache_hits
                  << " cache hits)\n";
    }
    return exit_for(record);
}

int exec_cmd(const Overrides& o, const std::string& record_path) {
    nb::RunConfig cfg = resolve_config(o);
    const fs::path path = record_path.empty() ? cfg.output_dir / "run_record.json" : fs::path(record_path);
    nb::RunRecord record = nb::load_record(path);
    const auto deps_runner = cfg.runner.kind == "process"
                                 ? std::shared_ptr<nb::Runner>(std::make_shared<nb::ProcessRunner>(
                                       cfg.runner.command, cfg.runner.pool_size))
                                 : std::shared_ptr<nb::Runner>(std::make_shared<nb::StubRunner>());
    if (!o.ks.empty()) record.ks = cfg.ks;
    if (!o.weights.empty() || !o.normalization.empty()) record.weights = cfg.weights;
    record = nb::rescore(std::move(record), *deps_runner, cfg.exec_parallelism);
    nb::save_record(record, path);
    nb::emit_report(record, path.parent_path().empty() ? fs::path(".") : path.parent_path());
    std::cout << nb::report_text(record);
    return exit_for(record);
}

int report_cmd(const std::string& record_path, const std::string& out_dir) {
    nb::RunRecord record = nb::load_record(record_path);
    const fs::path dir = !out_dir.empty() ? fs::path(out_dir)
                         : fs::path(record_path).parent_path().empty() ? fs::path(".")
                                                                        : fs::path(record_path).parent_path();
    nb::emit_report(record, dir);
    std::cout << nb::report_text(record);
    return kOk;
}

int qc_cmd(const Overrides& o, const std::string& tests_path, const std::string& out_path) {
    nb::RunConfig cfg = resolve_config(o);
    if (cfg.dataset.empty()) throw nb::ConfigError("qc-tests needs --dataset");
    const nb::Dataset ds = nb::load_dataset(cfg.dataset);
    std::map<std::string, const nb::Problem*> by_id;
    for (const auto& p : ds.problems) by_id[p.task_id] = &p;

    std::shared_ptr<nb::Runner> runner =
        cfg.runner.kind == "process"
            ? std::shared_ptr<nb::Runner>(std::make_shared<nb::ProcessRunner>(cfg.runner.command, cfg.runner.pool_size))
            : std::shared_ptr<nb::Runner>(std::make_shared<nb::StubRunner>());

    std::ifstream in(tests_path);
    if (!in) throw nb::ConfigError("cannot open " + tests_path);
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw nb::ConfigError("cannot write " + out_path);

    std::size_t kept = 0;
    std::size_t dropped = 0;
    long line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (nb::text::trim(line).empty()) continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("task_id") || !j.contains("tests")) {
            throw nb::SchemaError("expected {\"task_id\", \"tests\"}", line_no);
        }
        const auto task = j.at("task_id").get<std::string>();
        auto it = by_id.find(task);
        if (it == by_id.end()) throw nb::SchemaError("unknown task_id " + task, line_no);
        const auto tests = j.at("tests").get<std::vector<nb::GeneratedTest>>();
        nb::QcResult r = nb::qc_filter_fr_tests(*it->second, tests, *runner);
        for (const auto& [t, v] : r.discarded) {
            std::cerr << task << ": discarded " << t.test_id << " (" << nb::to_string(v.status)
                      << (v.message ? ": " + *v.message : std::string()) << ")\n";
        }
        kept += r.kept.size();
        dropped += r.discarded.size();
        out << nlohmann::json{{"task_id", task}, {"tests", r.kept}}.dump() << '\n';
    }
    std::cout << "kept " << kept << " test(s), discarded " << dropped << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nfrbench: requirement-aware code generation benchmark harness"};
    app.require_subcommand(1);

    Overrides o;
    std::string record_path;
    std::string out_dir;
    std::string tests_path;
    std::string qc_out = "qc_tests.jsonl";

    auto* run = app.add_subcommand("run", "full pipeline: generate, execute, score, report");
    auto* gen_reqs = app.add_subcommand("gen-reqs", "generate requirements only");
    auto* gen_tests = app.add_subcommand("gen-tests", "generate requirements and tests");
    auto* gen_code = app.add_subcommand("gen-code", "generate up to code samples");
    auto* exec = app.add_subcommand("exec", "re-execute and re-score a stored run record");
    auto* qc = app.add_subcommand("qc-tests", "keep functional tests the canonical solution passes");
    auto* report = app.add_subcommand("report", "emit report files from a run record");
    for (auto* sub : {run, gen_reqs, gen_tests, gen_code, exec, qc}) add_config_options(sub, o);
    exec->add_option("--record", record_path, "run record (default <output-dir>/run_record.json)");
    qc->add_option("--tests", tests_path, "JSON lines of {task_id, tests}")->required();
    qc->add_option("--out", qc_out, "kept tests (JSON lines)");
    report->add_option("record", record_path, "run record")->required();
    report->add_option("--out", out_dir, "directory for report.json / report.txt");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*run) return generate(o, std::nullopt);
        if (*gen_reqs) return generate(o, nb::Stage::Requirements);
        if (*gen_tests) return generate(o, nb::Stage::Tests);
        if (*gen_code) return generate(o, nb::Stage::Code);
        if (*exec) return exec_cmd(o, record_path);
        if (*qc) return qc_cmd(o, tests_path, qc_out);
        if (*report) return report_cmd(record_path, out_dir);
    } catch (const nb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const nb::SchemaError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kConfig;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kConfig;
    } catch (const nb::MissingContext& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const nb::GatewayError& e) {
        std::cerr << "provider error: " << e.what() << "\n";
        return kProvider;
    } catch (const nb::RunnerUnavailable& e) {
        std::cerr << "runner error: " << e.what() << "\n";
        return kRunner;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}
