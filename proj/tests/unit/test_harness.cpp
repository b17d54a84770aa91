#include <gtest/gtest.h>

#include <functional>

#include "nfrbench/harness.hpp"
#include "nfrbench/json_io.hpp"
#include "test_util.hpp"

using namespace nfrbench;
namespace fs = std::filesystem;

namespace {

fs::path mock_dir() { return testutil::fixtures() / "mock"; }

RunConfig mock_config(const fs::path& out) {
    RunConfig cfg = load_config(mock_dir() / "config.json");
    cfg.output_dir = out;
    return cfg;
}

// Copy of the mock completions with `rename(stage)` applied to each file's
// stage segment; files mapped to "" are dropped.
fs::path copy_fixtures(const fs::path& dst, const std::function<std::string(const std::string&)>& rename) {
    fs::create_directories(dst);
    for (const auto& e : fs::directory_iterator(mock_dir() / "completions")) {
        const std::string name = e.path().filename().string();
        const auto a = name.find('.');
        const auto b = name.find('.', a + 1);
        const std::string stage = rename(name.substr(a + 1, b - a - 1));
        if (stage.empty()) continue;
        fs::copy_file(e.path(), dst / (name.substr(0, a + 1) + stage + name.substr(b)));
    }
    return dst;
}

std::string problem_line(const std::string& id) {
    return R"({"task_id":")" + id +
           R"(","mode":"function","description":"def f(x):\n    pass","entry_point":"f","gt_tests":[{"test_id":"g1","category":"fr_general","kind":"assertion","payload":{"assertion_code":"assert f(1) == 1"}}]})";
}

std::string cli(const std::string& args) { return std::string(NFRBENCH_CLI) + " " + args; }

}  // namespace

TEST(Dataset, ParsesAndReportsLineNumbers) {
    auto ds = parse_dataset(problem_line("A/0") + "\n\n" + problem_line("A/1") + "\n");
    ASSERT_EQ(ds.problems.size(), 2u);
    EXPECT_TRUE(ds.warnings.empty());
    try {
        parse_dataset(problem_line("A/0") + "\n{not json\n");
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.line(), 2);
    }
    try {
        parse_dataset(problem_line("A/0") + "\n" + problem_line("A/1") + "\n" + problem_line("A/0") + "\n");
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.line(), 3);
        EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
    }
    EXPECT_THROW(parse_dataset(R"({"task_id":"x","mode":"sideways","description":"d"})"), SchemaError);
    EXPECT_EQ(parse_dataset("\n").warnings, (std::vector<std::string>{"dataset is empty"}));
    EXPECT_THROW(load_dataset("/nonexistent/problems.jsonl"), std::runtime_error);
}

TEST(Dataset, MockDatasetIsWellFormed) {
    auto ds = load_dataset(mock_dir() / "problems.jsonl");
    ASSERT_EQ(ds.problems.size(), 3u);
    EXPECT_EQ(ds.problems[2].mode, ProblemMode::Stdio);
    EXPECT_EQ(ds.problems[2].limits.timeout_s, 2.0);
    for (const auto& p : ds.problems) EXPECT_TRUE(validate_problem(p).empty()) << p.task_id;
}

TEST(Config, LoadsMockConfigWithRelativePaths) {
    auto cfg = load_config(mock_dir() / "config.json");
    EXPECT_EQ(cfg.dataset, mock_dir() / "problems.jsonl");
    EXPECT_EQ(cfg.provider.fixtures_dir, mock_dir() / "completions");
    EXPECT_EQ(cfg.ks, (std::vector<int>{1, 5, 10}));
    EXPECT_EQ(cfg.code_sampling.n, 10);
    EXPECT_EQ(cfg.requirements_sampling.n, 1);
    EXPECT_EQ(cfg.code_stage(), Stage::Code);
    EXPECT_NO_THROW(cfg.validate());
    auto again = config_from_json(config_to_json(cfg));
    EXPECT_EQ(config_to_json(again), config_to_json(cfg));
}

TEST(Config, RejectsInvalidCombinations) {
    auto base = [] { return load_config(mock_dir() / "config.json"); };
    auto c = base();
    c.stages.insert(Stage::CodeTdd);
    EXPECT_THROW(c.validate(), ConfigError);
    c = base();
    c.stages = {Stage::Requirements, Stage::CodeTdd};
    EXPECT_THROW(c.validate(), ConfigError);
    c = base();
    c.ks = {11};
    EXPECT_THROW(c.validate(), ConfigError);
    c = base();
    c.ks = {0};
    EXPECT_THROW(c.validate(), ConfigError);
    c = base();
    c.provider.fixtures_dir.clear();
    EXPECT_THROW(c.validate(), ConfigError);
    c = base();
    c.runner.kind = "process";
    EXPECT_THROW(c.validate(), ConfigError);
    c = base();
    c.preference_mode = PreferenceMode::PlugAndPlay;
    EXPECT_THROW(c.validate(), ConfigError);
    c.preference_targets = {Category::FrEdge};
    EXPECT_THROW(c.validate(), ConfigError);
    c = base();
    c.weights.weights.fill(0.0);
    EXPECT_THROW(c.validate(), ConfigError);
    c = base();
    c.parallelism = 0;
    EXPECT_THROW(c.validate(), ConfigError);

    EXPECT_THROW(config_from_json({{"dataset", "x"}, {"bogus", 1}}), ConfigError);
    EXPECT_THROW(config_from_json({{"provider", {{"kind", "mock"}, {"fixture_dir", "x"}}}}), ConfigError);
    EXPECT_THROW(config_from_json({{"weights", {{"nfr_speed", 1.0}}}}), ConfigError);
    EXPECT_THROW(config_from_json({{"stages", {"code", "deploy"}}}), ConfigError);
    EXPECT_THROW(config_from_json({{"k", "one"}}), ConfigError);
    RunConfig empty;
    EXPECT_THROW(empty.validate(), ConfigError);
}

TEST(Pipeline, MockRunScoresAndReusesCache) {
    testutil::TempDir tmp;
    auto cfg = mock_config(tmp.path());
    auto deps = make_deps(cfg);
    auto first = run_pipeline(cfg, deps);
    ASSERT_EQ(first.problems.size(), 3u);
    EXPECT_EQ(first.skipped_count(), 0u);
    EXPECT_EQ(first.aborted_rows(), 0u);
    EXPECT_EQ(first.provider_calls, 9);
    EXPECT_EQ(first.cache_hits, 0);
    for (const auto& p : first.problems) {
        EXPECT_EQ(p.candidates.size(), 10u) << p.task_id;
        EXPECT_FALSE(p.generated_tests.empty()) << p.task_id;
        ASSERT_TRUE(p.gt_matrix) << p.task_id;
        EXPECT_EQ(p.ranking.size(), 10u);
    }

    auto fresh = make_deps(cfg);
    auto second = run_pipeline(cfg, fresh);
    EXPECT_EQ(second.provider_calls, 0);
    EXPECT_EQ(second.cache_hits, 9);
    EXPECT_EQ(report_json(first), report_json(second));

    const auto report = report_json(first);
    EXPECT_NEAR(report.at("metrics").at("fr").at("unfiltered").at("1").get<double>(), (0.6 + 0.7 + 0.6) / 3, 1e-12);
    EXPECT_EQ(report.at("problems").at("scored"), 3);
}

TEST(Pipeline, RecordRoundTripAndRescore) {
    testutil::TempDir tmp;
    auto cfg = mock_config(tmp.path());
    auto record = run_pipeline(cfg, make_deps(cfg));
    save_record(record, tmp.path() / "run_record.json");
    auto loaded = load_record(tmp.path() / "run_record.json");
    EXPECT_EQ(record_to_json(loaded), record_to_json(record));
    EXPECT_EQ(report_json(loaded), report_json(record));

    StubRunner runner;
    auto rescored = rescore(loaded, runner, 3);
    EXPECT_EQ(report_json(rescored), report_json(record));
    for (std::size_t i = 0; i < record.problems.size(); ++i) {
        EXPECT_EQ(rescored.problems[i].gt_matrix->status_grid(), record.problems[i].gt_matrix->status_grid());
    }
}

TEST(Pipeline, GenerationOnlyLeavesMatricesEmpty) {
    testutil::TempDir tmp;
    auto cfg = mock_config(tmp.path());
    auto record = run_pipeline(cfg, make_deps(cfg), PipelineOptions{false});
    for (const auto& p : record.problems) {
        EXPECT_FALSE(p.gt_matrix);
        EXPECT_EQ(p.candidates.size(), 10u);
    }
    EXPECT_NE(report_text(record).find("=== 0 problems scored"), std::string::npos);
}

TEST(Pipeline, TddPromptCarriesGeneratedTests) {
    testutil::TempDir tmp;
    auto cfg = mock_config(tmp.path() / "out");
    cfg.provider.fixtures_dir =
        copy_fixtures(tmp.path() / "fx", [](const std::string& s) { return s == "code" ? std::string("code_tdd") : s; });
    cfg.stages = {Stage::Requirements, Stage::Tests, Stage::CodeTdd};
    auto record = run_pipeline(cfg, make_deps(cfg));
    EXPECT_EQ(record.skipped_count(), 0u);
    const auto& p0 = record.problems.at(0);
    const auto& prompt = p0.stages.at("code_tdd").prompt;
    EXPECT_NE(prompt.find("assert add(-4, 1) == -3"), std::string::npos);
    EXPECT_LT(prompt.find("def add(a: int"), prompt.find("assert add(-4, 1)"));
    EXPECT_EQ(p0.candidates.size(), 10u);
}

TEST(Pipeline, MissingFixtureSkipsOnlyThatProblem) {
    testutil::TempDir tmp;
    auto cfg = mock_config(tmp.path() / "out");
    auto fx = copy_fixtures(tmp.path() / "fx", [](const std::string& s) { return s; });
    fs::remove(fx / "Mock_1.code.4.txt");
    cfg.provider.fixtures_dir = fx;
    auto record = run_pipeline(cfg, make_deps(cfg));
    EXPECT_EQ(record.skipped_count(), 1u);
    ASSERT_TRUE(record.problems[1].skipped);
    EXPECT_FALSE(record.problems[0].skipped);
    const auto report = report_json(record);
    EXPECT_EQ(report.at("problems").at("scored"), 2);
    EXPECT_EQ(report.at("skipped").at(0).at("task_id"), "Mock/1");
}

TEST(Pipeline, DisabledStageWithoutCacheIsAConfigError) {
    testutil::TempDir tmp;
    auto cfg = mock_config(tmp.path());
    cfg.stages = {Stage::Tests, Stage::Code};
    EXPECT_THROW(run_pipeline(cfg, make_deps(cfg)), ConfigError);
}

TEST(Qc, KeepsTestsTheCanonicalSolutionPasses) {
    Problem p;
    p.task_id = "Q/0";
    p.description = "def f(x):\n    pass";
    p.entry_point = "f";
    p.canonical_solution = "# stub-fail: t2\ndef f(x):\n    return x\n";
    auto mk = [](std::string id, Category c) {
        return GeneratedTest{std::move(id), c, AssertionPayload{"assert f(1) == 1"}, std::nullopt};
    };
    std::vector<GeneratedTest> tests = {mk("t1", Category::FrGeneral), mk("t2", Category::FrEdge),
                                        mk("t3", Category::FrGeneral)};
    StubRunner runner;
    auto r = qc_filter_fr_tests(p, tests, runner);
    ASSERT_EQ(r.kept.size(), 2u);
    EXPECT_EQ(r.kept[1].test_id, "t3");
    ASSERT_EQ(r.discarded.size(), 1u);
    EXPECT_EQ(r.discarded[0].first.test_id, "t2");
    EXPECT_EQ(r.discarded[0].second.status, VerdictStatus::Fail);

    EXPECT_THROW(qc_filter_fr_tests(p, {mk("x", Category::NfrTime)}, runner), std::invalid_argument);
    p.canonical_solution.reset();
    EXPECT_THROW(qc_filter_fr_tests(p, tests, runner), MissingGroundTruth);
}

TEST(Report, JsonOmitsRunDependentFields) {
    testutil::TempDir tmp;
    auto cfg = mock_config(tmp.path());
    auto record = run_pipeline(cfg, make_deps(cfg));
    const std::string dump = report_json(record).dump();
    EXPECT_EQ(dump.find("cache"), std::string::npos);
    EXPECT_EQ(dump.find("seconds"), std::string::npos);
    emit_report(record, tmp.path() / "r");
    EXPECT_TRUE(fs::exists(tmp.path() / "r/report.json"));
    EXPECT_EQ(testutil::read_file(tmp.path() / "r/report.txt"), report_text(record));
}

TEST(Cli, ExitCodes) {
    testutil::TempDir tmp;
    const std::string cfg = (mock_dir() / "config.json").string();
    auto ok = testutil::run_command(cli("run -c " + cfg + " -o " + (tmp.path() / "a").string()));
    EXPECT_EQ(ok.status, 0) << ok.output;
    EXPECT_NE(ok.output.find("Functional"), std::string::npos);

    auto exec = testutil::run_command(cli("exec -c " + cfg + " -o " + (tmp.path() / "a").string()));
    EXPECT_EQ(exec.status, 0) << exec.output;
    auto report = testutil::run_command(cli("report " + (tmp.path() / "a/run_record.json").string() + " --out " +
                                            (tmp.path() / "b").string()));
    EXPECT_EQ(report.status, 0) << report.output;
    EXPECT_EQ(testutil::read_file(tmp.path() / "a/report.json"), testutil::read_file(tmp.path() / "b/report.json"));

    EXPECT_EQ(testutil::run_command(cli("run -c " + cfg + " -k 11 -o " + tmp.path().string())).status, 2);
    EXPECT_EQ(testutil::run_command(cli("run --bogus")).status, 2);
    EXPECT_EQ(testutil::run_command(cli("run -c /nonexistent.json")).status, 2);

    auto fx = copy_fixtures(tmp.path() / "fx", [](const std::string& s) { return s; });
    fs::remove(fx / "Mock_2.tests.0.txt");
    auto skipped = testutil::run_command(cli("run -c " + cfg + " --fixtures " + fx.string() + " -o " +
                                             (tmp.path() / "c").string()));
    EXPECT_EQ(skipped.status, 3) << skipped.output;

    auto crash = testutil::run_command(cli("run -c " + cfg + " --runner process --runner-cmd /bin/false -o " +
                                           (tmp.path() / "d").string()));
    EXPECT_EQ(crash.status, 4) << crash.output;
}
