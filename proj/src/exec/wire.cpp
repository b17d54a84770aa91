#include <nlohmann/json.hpp>
#include <regex>

#include "nfrbench/json_io.hpp"
#include "nfrbench/orchestrator.hpp"

namespace nfrbench::wire {

using nlohmann::json;

namespace {

json parse_object(std::string_view line) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ProtocolError("line is not valid JSON");
    if (!j.is_object()) throw ProtocolError("line is not a JSON object");
    return j;
}

const json& field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw ProtocolError(std::string("missing field '") + key + "'");
    return *it;
}

std::string string_field(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_string()) throw ProtocolError(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

std::optional<std::string> nullable_string(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw ProtocolError(std::string("field '") + key + "' must be a string or null");
    return it->get<std::string>();
}

}  // namespace

std::string encode_request(const RunnerRequest& req) {
    json tests = json::array();
    for (const auto& t : req.tests) {
        tests.push_back({{"test_id", t.test_id},
                         {"kind", std::string(to_string(t.kind()))},
                         {"payload", payload_to_json(t.payload)}});
    }
    json j = {{"id", req.id},
              {"mode", std::string(to_string(req.mode))},
              {"source", req.source},
              {"tests", std::move(tests)},
              {"limits", req.limits},
              {"want_cc", req.want_cc}};
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

RunnerRequest decode_request(std::string_view line) {
    const json j = parse_object(line);
    RunnerRequest req;
    req.id = string_field(j, "id");
    try {
        req.mode = mode_from_string(string_field(j, "mode"));
        req.source = string_field(j, "source");
        const json& tests = field(j, "tests");
        if (!tests.is_array()) throw ProtocolError("field 'tests' must be an array");
        for (const auto& t : tests) {
            if (!t.is_object()) throw ProtocolError("test must be an object");
            GeneratedTest g;
            g.test_id = string_field(t, "test_id");
            const TestKind kind = kind_from_string(string_field(t, "kind"));
            if (kind != TestKind::Assertion && kind != TestKind::Stdio) {
                throw ProtocolError("test " + g.test_id + ": kind is not executable");
            }
            g.payload = payload_from_json(kind, t.contains("payload") ? t.at("payload") : json());
            req.tests.push_back(std::move(g));
        }
        req.limits = field(j, "limits").get<ResourceLimits>();
        const json& want = field(j, "want_cc");
        if (!want.is_boolean()) throw ProtocolError("field 'want_cc' must be a boolean");
        req.want_cc = want.get<bool>();
    } catch (const ProtocolError&) {
        throw;
    } catch (const std::exception& e) {
        throw ProtocolError(e.what());
    }
    return req;
}

std::string encode_response(const RunnerResponse& res) {
    json j = {{"id", res.id},
              {"verdicts", res.verdicts},
              {"cc_total", res.cc_total ? json(*res.cc_total) : json(nullptr)},
              {"runner_error", res.runner_error ? json(*res.runner_error) : json(nullptr)}};
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

RunnerResponse decode_response(std::string_view line) {
    const json j = parse_object(line);
    RunnerResponse res;
    res.id = string_field(j, "id");
    try {
        const json& verdicts = field(j, "verdicts");
        if (!verdicts.is_array()) throw ProtocolError("field 'verdicts' must be an array");
        res.verdicts = verdicts.get<std::vector<Verdict>>();
        auto cc = j.find("cc_total");
        if (cc != j.end() && !cc->is_null()) {
            if (!cc->is_number_integer() || cc->get<long long>() < 1) {
                throw ProtocolError("cc_total must be an integer >= 1 or null");
            }
            res.cc_total = cc->get<int>();
        }
        res.runner_error = nullable_string(j, "runner_error");
    } catch (const ProtocolError&) {
        throw;
    } catch (const std::exception& e) {
        throw ProtocolError(e.what());
    }
    return res;
}

std::optional<std::string> salvage_id(std::string_view line) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
        // Truncated or corrupt line: encoders write "id" as the first key.
        static const std::regex lead(R"re(^\s*\{\s*"id"\s*:\s*("(?:[^"\\]|\\.)*"))re");
        std::match_results<std::string_view::const_iterator> m;
        if (!std::regex_search(line.begin(), line.end(), m, lead)) return std::nullopt;
        json id = json::parse(m[1].first, m[1].second, nullptr, false);
        if (id.is_string()) return id.get<std::string>();
        return std::nullopt;
    }
    if (!j.is_object()) return std::nullopt;
    auto it = j.find("id");
    if (it == j.end() || !it->is_string()) return std::nullopt;
    return it->get<std::string>();
}

}  // namespace nfrbench::wire
