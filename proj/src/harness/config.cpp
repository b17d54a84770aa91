#include <fstream>

#include "nfrbench/harness.hpp"
#include "nfrbench/json_io.hpp"

namespace nfrbench {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [k, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || k == a;
        if (!ok) throw ConfigError("unknown key '" + k + "' in " + where);
    }
}

template <class T>
void read(const json& j, const char* key, T& out) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

SamplingConfig sampling_from_json(const json& j, SamplingConfig out, const std::string& where) {
    check_keys(j, {"n", "temperature", "top_p", "max_tokens", "stop", "strategy"}, where);
    read(j, "n", out.n);
    read(j, "temperature", out.temperature);
    read(j, "top_p", out.top_p);
    read(j, "max_tokens", out.max_tokens);
    read(j, "stop", out.stop);
    if (j.contains("strategy")) {
        try {
            out.strategy = strategy_from_string(j.at("strategy").get<std::string>());
        } catch (const std::exception& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }
    return out;
}

json sampling_to_json(const SamplingConfig& s) {
    return {{"n", s.n},
            {"temperature", s.temperature},
            {"top_p", s.top_p},
            {"max_tokens", s.max_tokens},
            {"stop", s.stop},
            {"strategy", std::string(to_string(s.strategy))}};
}

Category parse_category(const std::string& s) {
    try {
        return category_from_string(s);
    } catch (const UnknownCategory& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

Stage RunConfig::code_stage() const { return stages.count(Stage::CodeTdd) ? Stage::CodeTdd : Stage::Code; }

void RunConfig::validate() const {
    if (dataset.empty()) throw ConfigError("dataset path is required");
    if (stages.empty()) throw ConfigError("no stages enabled");
    if (stages.count(Stage::Code) && stages.count(Stage::CodeTdd)) {
        throw ConfigError("stages 'code' and 'code_tdd' are alternatives");
    }
    if (stages.count(Stage::CodeTdd) && !stages.count(Stage::Tests)) {
        throw ConfigError("stage 'code_tdd' needs the 'tests' stage");
    }
    try {
        requirements_sampling.validate();
        code_sampling.validate();
        tests_sampling.validate();
        weights.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (ks.empty()) throw ConfigError("at least one k value is required");
    for (int k : ks) {
        if (k < 1 || k > code_sampling.n) {
            throw ConfigError("k=" + std::to_string(k) + " outside [1, n=" + std::to_string(code_sampling.n) + "]");
        }
    }
    if (parallelism < 1 || exec_parallelism < 1) throw ConfigError("parallelism must be >= 1");
    if (provider.kind == "mock") {
        if (provider.fixtures_dir.empty()) throw ConfigError("mock provider needs fixtures_dir");
    } else if (provider.kind != "openai") {
        throw ConfigError("unknown provider kind '" + provider.kind + "'");
    }
    if (runner.kind == "process") {
        if (runner.command.empty()) throw ConfigError("process runner needs a command");
    } else if (runner.kind != "stub") {
        throw ConfigError("unknown runner kind '" + runner.kind + "'");
    }
    if (runner.pool_size < 1) throw ConfigError("runner pool_size must be >= 1");
    if (preference_mode) {
        if (*preference_mode == PreferenceMode::PlugAndPlay && preference_targets.empty()) {
            throw ConfigError("plug-and-play preference needs targets");
        }
        for (Category c : preference_targets) {
            if (!is_nonfunctional(c)) throw ConfigError("preference target must be an NFR category");
        }
    }
}

RunConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
    check_keys(j,
               {"dataset", "output_dir", "seed_label", "provider", "runner", "stages", "sampling", "icl",
                "templates_dir", "nfr_instruction", "preference", "weights", "k", "parallelism",
                "exec_parallelism", "use_cache"},
               "config");
    RunConfig cfg;
    std::string s;
    if (read(j, "dataset", s), !s.empty()) cfg.dataset = resolve(base_dir, s);
    s.clear();
    if (read(j, "output_dir", s), !s.empty()) cfg.output_dir = resolve(base_dir, s);
    read(j, "seed_label", cfg.seed_label);

    if (j.contains("provider")) {
        const json& p = j.at("provider");
        check_keys(p,
                   {"kind", "fixtures_dir", "model", "base_url", "timeout_s", "retry_cap", "base_backoff_ms",
                    "fan_out", "requests_per_second", "call_budget", "token_budget"},
                   "provider");
        read(p, "kind", cfg.provider.kind);
        s.clear();
        if (read(p, "fixtures_dir", s), !s.empty()) cfg.provider.fixtures_dir = resolve(base_dir, s);
        read(p, "model", cfg.provider.model);
        if (p.contains("base_url") && !p.at("base_url").is_null()) cfg.provider.base_url = p.at("base_url").get<std::string>();
        read(p, "timeout_s", cfg.provider.timeout_s);
        read(p, "retry_cap", cfg.provider.gateway.retry_cap);
        if (p.contains("base_backoff_ms")) {
            cfg.provider.gateway.base_backoff = std::chrono::milliseconds(p.at("base_backoff_ms").get<long long>());
        }
        read(p, "fan_out", cfg.provider.gateway.fan_out);
        read(p, "requests_per_second", cfg.provider.gateway.requests_per_second);
        if (p.contains("call_budget") && !p.at("call_budget").is_null()) {
            cfg.provider.gateway.call_budget = p.at("call_budget").get<std::int64_t>();
        }
        if (p.contains("token_budget") && !p.at("token_budget").is_null()) {
            cfg.provider.gateway.token_budget = p.at("token_budget").get<std::int64_t>();
        }
    }
    if (j.contains("runner")) {
        const json& r = j.at("runner");
        check_keys(r, {"kind", "command", "pool_size"}, "runner");
        read(r, "kind", cfg.runner.kind);
        read(r, "command", cfg.runner.command);
        read(r, "pool_size", cfg.runner.pool_size);
    }
    if (j.contains("stages")) {
        cfg.stages.clear();
        for (const auto& st : j.at("stages")) {
            try {
                cfg.stages.insert(stage_from_string(st.get<std::string>()));
            } catch (const std::exception& e) {
                throw ConfigError(std::string("stages: ") + e.what());
            }
        }
    }
    if (j.contains("sampling")) {
        const json& sm = j.at("sampling");
        check_keys(sm, {"requirements", "code", "tests"}, "sampling");
        if (sm.contains("requirements")) {
            cfg.requirements_sampling =
                sampling_from_json(sm.at("requirements"), cfg.requirements_sampling, "sampling.requirements");
        }
        if (sm.contains("code")) cfg.code_sampling = sampling_from_json(sm.at("code"), cfg.code_sampling, "sampling.code");
        if (sm.contains("tests")) {
            cfg.tests_sampling = sampling_from_json(sm.at("tests"), cfg.tests_sampling, "sampling.tests");
        }
    }
    if (j.contains("icl") && !j.at("icl").is_null()) {
        const json& icl = j.at("icl");
        check_keys(icl, {"dir", "limit"}, "icl");
        s.clear();
        if (read(icl, "dir", s), !s.empty()) cfg.icl_dir = resolve(base_dir, s);
        if (icl.contains("limit") && !icl.at("limit").is_null()) cfg.icl_limit = icl.at("limit").get<std::size_t>();
    }
    s.clear();
    if (read(j, "templates_dir", s), !s.empty()) cfg.templates_dir = resolve(base_dir, s);
    read(j, "nfr_instruction", cfg.nfr_instruction);
    if (j.contains("preference") && !j.at("preference").is_null()) {
        const json& pr = j.at("preference");
        check_keys(pr, {"mode", "targets"}, "preference");
        try {
            cfg.preference_mode = preference_mode_from_string(pr.value("mode", std::string("instruction")));
        } catch (const std::exception& e) {
            throw ConfigError(std::string("preference: ") + e.what());
        }
        if (pr.contains("targets")) {
            for (const auto& t : pr.at("targets")) cfg.preference_targets.insert(parse_category(t.get<std::string>()));
        }
    }
    if (j.contains("weights")) {
        const json& w = j.at("weights");
        if (!w.is_object()) throw ConfigError("weights must be an object");
        for (const auto& [k, v] : w.items()) {
            if (k == "normalization") {
                try {
                    cfg.weights.normalization = normalization_from_string(v.get<std::string>());
                } catch (const std::exception& e) {
                    throw ConfigError(e.what());
                }
            } else {
                if (!v.is_number()) throw ConfigError("weight for " + k + " must be a number");
                cfg.weights.set(parse_category(k), v.get<double>());
            }
        }
    }
    read(j, "k", cfg.ks);
    read(j, "parallelism", cfg.parallelism);
    read(j, "exec_parallelism", cfg.exec_parallelism);
    read(j, "use_cache", cfg.use_cache);
    return cfg;
}

json config_to_json(const RunConfig& cfg) {
    json stages = json::array();
    for (Stage s : cfg.stages) stages.push_back(std::string(to_string(s)));
    json weights = {{"normalization", std::string(to_string(cfg.weights.normalization))}};
    for (Category c : kAllCategories) weights[std::string(to_string(c))] = cfg.weights.weight(c);
    json provider = {{"kind", cfg.provider.kind},
                     {"model", cfg.provider.model},
                     {"timeout_s", cfg.provider.timeout_s},
                     {"retry_cap", cfg.provider.gateway.retry_cap},
                     {"base_backoff_ms", cfg.provider.gateway.base_backoff.count()},
                     {"fan_out", cfg.provider.gateway.fan_out},
                     {"requests_per_second", cfg.provider.gateway.requests_per_second}};
    if (!cfg.provider.fixtures_dir.empty()) provider["fixtures_dir"] = cfg.provider.fixtures_dir.string();
    if (cfg.provider.base_url) provider["base_url"] = *cfg.provider.base_url;
    if (cfg.provider.gateway.call_budget) provider["call_budget"] = *cfg.provider.gateway.call_budget;
    if (cfg.provider.gateway.token_budget) provider["token_budget"] = *cfg.provider.gateway.token_budget;

    json j = {{"dataset", cfg.dataset.string()},
              {"output_dir", cfg.output_dir.string()},
              {"seed_label", cfg.seed_label},
              {"provider", provider},
              {"runner", {{"kind", cfg.runner.kind}, {"command", cfg.runner.command}, {"pool_size", cfg.runner.pool_size}}},
              {"stages", stages},
              {"sampling",
               {{"requirements", sampling_to_json(cfg.requirements_sampling)},
                {"code", sampling_to_json(cfg.code_sampling)},
                {"tests", sampling_to_json(cfg.tests_sampling)}}},
              {"nfr_instruction", cfg.nfr_instruction},
              {"weights", weights},
              {"k", cfg.ks},
              {"parallelism", cfg.parallelism},
              {"exec_parallelism", cfg.exec_parallelism},
              {"use_cache", cfg.use_cache}};
    if (cfg.icl_dir) {
        j["icl"] = {{"dir", cfg.icl_dir->string()}};
        if (cfg.icl_limit) j["icl"]["limit"] = *cfg.icl_limit;
    }
    if (cfg.templates_dir) j["templates_dir"] = cfg.templates_dir->string();
    if (cfg.preference_mode) {
        json targets = json::array();
        for (Category c : cfg.preference_targets) targets.push_back(std::string(to_string(c)));
        j["preference"] = {{"mode", std::string(to_string(*cfg.preference_mode))}, {"targets", targets}};
    }
    return j;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config " + path.string() + " is not valid JSON");
    return config_from_json(j, path.parent_path());
}

}  // namespace nfrbench
