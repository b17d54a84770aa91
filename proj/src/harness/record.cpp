#include <fstream>

#include "nfrbench/harness.hpp"
#include "nfrbench/json_io.hpp"

namespace nfrbench {

using nlohmann::json;

std::size_t RunRecord::skipped_count() const {
    std::size_t n = 0;
    for (const auto& p : problems) n += p.skipped ? 1 : 0;
    return n;
}

std::size_t RunRecord::aborted_rows() const {
    std::size_t n = 0;
    for (const auto& p : problems) {
        if (p.generated_matrix) n += p.generated_matrix->aborted_count();
        if (p.gt_matrix) n += p.gt_matrix->aborted_count();
    }
    return n;
}

namespace {

json weights_to_json(const WeightProfile& w) {
    json j = {{"normalization", std::string(to_string(w.normalization))}};
    for (Category c : kAllCategories) j[std::string(to_string(c))] = w.weight(c);
    return j;
}

WeightProfile weights_from_json(const json& j) {
    WeightProfile w;
    w.normalization = normalization_from_string(j.at("normalization").get<std::string>());
    for (Category c : kAllCategories) w.set(c, j.at(std::string(to_string(c))).get<double>());
    return w;
}

json scores_to_json(const std::vector<ScoredCandidate>& scores) {
    json out = json::array();
    for (const auto& [idx, s] : scores) out.push_back({{"sample_index", idx}, {"score", s}});
    return out;
}

json problem_to_json(const ProblemRecord& p) {
    json stages = json::object();
    for (const auto& [name, a] : p.stages) {
        stages[name] = {{"prompt", a.prompt}, {"completions", a.completions}, {"cached", a.cached}};
    }
    json j = {{"task_id", p.task_id},
              {"mode", std::string(to_string(p.mode))},
              {"limits", p.limits},
              {"stages", stages},
              {"generated_tests", p.generated_tests},
              {"warnings", p.warnings},
              {"candidates", p.candidates},
              {"gt_tests", p.gt_tests},
              {"scores", scores_to_json(p.scores)},
              {"ranking", p.ranking}};
    if (p.skipped) j["skipped"] = *p.skipped;
    if (p.requirements) j["requirements"] = *p.requirements;
    if (p.generated_matrix) j["generated_matrix"] = *p.generated_matrix;
    if (p.gt_matrix) j["gt_matrix"] = *p.gt_matrix;
    return j;
}

ProblemRecord problem_from_json(const json& j) {
    ProblemRecord p;
    p.task_id = j.at("task_id").get<std::string>();
    p.mode = mode_from_string(j.at("mode").get<std::string>());
    p.limits = j.at("limits").get<ResourceLimits>();
    for (const auto& [name, a] : j.at("stages").items()) {
        p.stages[name] = StageArtifact{a.at("prompt").get<std::string>(),
                                       a.at("completions").get<std::vector<std::string>>(),
                                       a.value("cached", false)};
    }
    p.generated_tests = j.at("generated_tests").get<std::vector<GeneratedTest>>();
    p.warnings = j.at("warnings").get<std::vector<std::string>>();
    p.candidates = j.at("candidates").get<std::vector<CodeCandidate>>();
    p.gt_tests = j.at("gt_tests").get<std::vector<GeneratedTest>>();
    for (const auto& s : j.at("scores")) p.scores.emplace_back(s.at("sample_index").get<int>(), s.at("score").get<double>());
    p.ranking = j.at("ranking").get<std::vector<int>>();
    if (j.contains("skipped")) p.skipped = j.at("skipped").get<std::string>();
    if (j.contains("requirements")) p.requirements = j.at("requirements").get<RequirementSet>();
    if (j.contains("generated_matrix")) p.generated_matrix = j.at("generated_matrix").get<VerdictMatrix>();
    if (j.contains("gt_matrix")) p.gt_matrix = j.at("gt_matrix").get<VerdictMatrix>();
    return p;
}

}  // namespace

json record_to_json(const RunRecord& r) {
    json problems = json::array();
    for (const auto& p : r.problems) problems.push_back(problem_to_json(p));
    return {{"format", "nfrbench-run-record/1"},
            {"config", r.config},
            {"k", r.ks},
            {"weights", weights_to_json(r.weights)},
            {"problems", problems},
            {"stage_seconds", r.stage_seconds},
            {"provider_calls", r.provider_calls},
            {"cache_hits", r.cache_hits}};
}

RunRecord record_from_json(const json& j) {
    if (j.value("format", std::string()) != "nfrbench-run-record/1") {
        throw SchemaError("not an nfrbench run record");
    }
    RunRecord r;
    try {
        r.config = j.at("config");
        r.ks = j.at("k").get<std::vector<int>>();
        r.weights = weights_from_json(j.at("weights"));
        for (const auto& p : j.at("problems")) r.problems.push_back(problem_from_json(p));
        r.stage_seconds = j.value("stage_seconds", std::map<std::string, double>{});
        r.provider_calls = j.value("provider_calls", std::int64_t{0});
        r.cache_hits = j.value("cache_hits", std::int64_t{0});
    } catch (const json::exception& e) {
        throw SchemaError(std::string("run record: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("run record: ") + e.what());
    }
    return r;
}

void save_record(const RunRecord& r, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << record_to_json(r).dump(2, ' ', false, json::error_handler_t::replace) << '\n';
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

RunRecord load_record(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open run record " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw SchemaError("run record " + path.string() + " is not valid JSON");
    return record_from_json(j);
}

}  // namespace nfrbench
