#include "nfrbench/json_io.hpp"

namespace nfrbench {

using nlohmann::json;

namespace {

std::string require_string(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_string()) {
        throw SchemaError(std::string("missing or non-string field '") + key + "'");
    }
    return j.at(key).get<std::string>();
}

std::optional<std::string> optional_string(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    if (!j.at(key).is_string()) throw SchemaError(std::string("field '") + key + "' must be a string");
    return j.at(key).get<std::string>();
}

void put_optional(json& j, const char* key, const std::optional<std::string>& v) {
    if (v) j[key] = *v;
}

}  // namespace

void to_json(json& j, Category c) { j = std::string(to_string(c)); }

void from_json(const json& j, Category& c) {
    if (!j.is_string()) throw SchemaError("category must be a string");
    try {
        c = category_from_string(j.get<std::string>());
    } catch (const UnknownCategory& e) {
        throw SchemaError(e.what());
    }
}

json payload_to_json(const TestPayload& p) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            json out = json::object();
            if constexpr (std::is_same_v<T, AssertionPayload>) {
                out["assertion_code"] = v.assertion_code;
            } else if constexpr (std::is_same_v<T, StdioPayload>) {
                out["input"] = v.input;
                put_optional(out, "expected_output", v.expected_output);
                put_optional(out, "expected_stderr_substring", v.expected_stderr_substring);
            } else if constexpr (std::is_same_v<T, CcThresholdPayload>) {
                out["cc_limit"] = v.cc_limit;
            }
            return out;
        },
        p);
}

TestPayload payload_from_json(TestKind kind, const json& j) {
    const json empty = json::object();
    const json& p = j.is_null() ? empty : j;
    if (!p.is_object()) throw SchemaError("payload must be an object");
    switch (kind) {
        case TestKind::Assertion:
            return AssertionPayload{require_string(p, "assertion_code")};
        case TestKind::Stdio:
            return StdioPayload{require_string(p, "input"), optional_string(p, "expected_output"),
                                optional_string(p, "expected_stderr_substring")};
        case TestKind::CcThreshold:
            if (!p.contains("cc_limit") || !p.at("cc_limit").is_number_integer()) {
                throw SchemaError("cc_threshold payload needs integer cc_limit");
            }
            return CcThresholdPayload{p.at("cc_limit").get<int>()};
        case TestKind::ReliabilityMarker:
            if (!p.empty()) throw SchemaError("reliability_marker payload must be empty");
            return ReliabilityPayload{};
    }
    throw SchemaError("unhandled test kind");
}

void to_json(json& j, const GeneratedTest& t) {
    j = json{{"test_id", t.test_id},
             {"category", t.category},
             {"kind", std::string(to_string(t.kind()))},
             {"payload", payload_to_json(t.payload)}};
    put_optional(j, "comment", t.comment);
}

void from_json(const json& j, GeneratedTest& t) {
    if (!j.is_object()) throw SchemaError("test must be an object");
    t.test_id = require_string(j, "test_id");
    if (!j.contains("category")) throw SchemaError("test " + t.test_id + " lacks category");
    t.category = j.at("category").get<Category>();
    TestKind kind;
    try {
        kind = kind_from_string(require_string(j, "kind"));
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what());
    }
    t.payload = payload_from_json(kind, j.contains("payload") ? j.at("payload") : json());
    t.comment = optional_string(j, "comment");
}

void to_json(json& j, const ResourceLimits& l) {
    j = json{{"timeout_s", l.timeout_s}, {"memory_mb", l.memory_mb}};
}

void from_json(const json& j, ResourceLimits& l) {
    if (!j.is_object()) throw SchemaError("limits must be an object");
    if (j.contains("timeout_s")) l.timeout_s = j.at("timeout_s").get<double>();
    if (j.contains("memory_mb")) l.memory_mb = j.at("memory_mb").get<int>();
}

void to_json(json& j, const Verdict& v) {
    j = json{{"test_id", v.test_id},
             {"status", std::string(to_string(v.status))},
             {"wall_ms", v.wall_ms},
             {"message", v.message ? json(*v.message) : json(nullptr)}};
}

void from_json(const json& j, Verdict& v) {
    if (!j.is_object()) throw SchemaError("verdict must be an object");
    v.test_id = require_string(j, "test_id");
    try {
        v.status = status_from_string(require_string(j, "status"));
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what());
    }
    v.wall_ms = j.value("wall_ms", std::int64_t{0});
    if (v.wall_ms < 0) throw SchemaError("wall_ms must be >= 0");
    v.message = optional_string(j, "message");
}

void to_json(json& j, const Problem& p) {
    j = json{{"task_id", p.task_id},
             {"mode", std::string(to_string(p.mode))},
             {"description", p.description},
             {"limits", p.limits},
             {"gt_tests", p.gt_tests}};
    put_optional(j, "entry_point", p.entry_point);
    put_optional(j, "canonical_solution", p.canonical_solution);
}

void from_json(const json& j, Problem& p) {
    if (!j.is_object()) throw SchemaError("problem must be a JSON object");
    p.task_id = require_string(j, "task_id");
    try {
        p.mode = mode_from_string(require_string(j, "mode"));
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what());
    }
    p.description = require_string(j, "description");
    p.entry_point = optional_string(j, "entry_point");
    p.canonical_solution = optional_string(j, "canonical_solution");
    p.limits = default_limits(p.mode);
    if (j.contains("limits") && !j.at("limits").is_null()) j.at("limits").get_to(p.limits);
    p.gt_tests.clear();
    if (j.contains("gt_tests")) {
        if (!j.at("gt_tests").is_array()) throw SchemaError("gt_tests must be an array");
        for (const auto& t : j.at("gt_tests")) p.gt_tests.push_back(t.get<GeneratedTest>());
    }
}

void to_json(json& j, const RequirementSet& r) {
    j = json{{"io_conditions", r.io_conditions},
             {"expected_behavior", r.expected_behavior},
             {"edge_cases", r.edge_cases},
             {"time_performance", r.time_performance},
             {"robustness", r.robustness},
             {"maintainability", r.maintainability},
             {"reliability", r.reliability},
             {"problem_agnostic", r.problem_agnostic},
             {"raw", r.raw}};
}

void from_json(const json& j, RequirementSet& r) {
    const auto list = [&](const char* key) {
        return j.contains(key) ? j.at(key).get<std::vector<std::string>>() : std::vector<std::string>{};
    };
    r.io_conditions = list("io_conditions");
    r.expected_behavior = list("expected_behavior");
    r.edge_cases = list("edge_cases");
    r.time_performance = list("time_performance");
    r.robustness = list("robustness");
    r.maintainability = list("maintainability");
    r.reliability = list("reliability");
    r.problem_agnostic = list("problem_agnostic");
    r.raw = j.value("raw", std::string{});
}

void to_json(json& j, const CodeCandidate& c) {
    j = json{{"task_id", c.task_id},
             {"sample_index", c.sample_index},
             {"source", c.source},
             {"provenance",
              {{"provider_id", c.provenance.provider_id},
               {"sampling_hash", c.provenance.sampling_hash}}}};
    put_optional(j, "reasoning", c.reasoning);
}

void from_json(const json& j, CodeCandidate& c) {
    c.task_id = require_string(j, "task_id");
    c.sample_index = j.at("sample_index").get<int>();
    c.source = require_string(j, "source");
    c.reasoning = optional_string(j, "reasoning");
    if (j.contains("provenance")) {
        const auto& p = j.at("provenance");
        c.provenance.provider_id = p.value("provider_id", std::string{});
        c.provenance.sampling_hash = p.value("sampling_hash", std::string{});
    }
}

void to_json(json& j, const VerdictRow& r) {
    j = json{{"sample_index", r.sample_index}, {"verdicts", r.verdicts}};
    put_optional(j, "infrastructure_error", r.infrastructure_error);
}

void from_json(const json& j, VerdictRow& r) {
    r.sample_index = j.at("sample_index").get<int>();
    r.verdicts = j.at("verdicts").get<std::vector<Verdict>>();
    r.infrastructure_error = optional_string(j, "infrastructure_error");
}

void to_json(json& j, const VerdictMatrix& m) { j = json{{"rows", m.rows}}; }

void from_json(const json& j, VerdictMatrix& m) {
    m.rows = j.at("rows").get<std::vector<VerdictRow>>();
}

}  // namespace nfrbench
