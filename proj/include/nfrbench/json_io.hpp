#pragma once

#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>

#include "nfrbench/model.hpp"

// JSON encodings of the domain types. Optional fields are omitted when
// absent and accepted as either absent or null on input.
namespace nfrbench {

class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(const std::string& what, long line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    long line() const noexcept { return line_; }

private:
    long line_;
};

void to_json(nlohmann::json& j, Category c);
void from_json(const nlohmann::json& j, Category& c);

nlohmann::json payload_to_json(const TestPayload& p);
TestPayload payload_from_json(TestKind kind, const nlohmann::json& j);

void to_json(nlohmann::json& j, const GeneratedTest& t);
void from_json(const nlohmann::json& j, GeneratedTest& t);

void to_json(nlohmann::json& j, const ResourceLimits& l);
void from_json(const nlohmann::json& j, ResourceLimits& l);

void to_json(nlohmann::json& j, const Verdict& v);
void from_json(const nlohmann::json& j, Verdict& v);

/// `mode` defaults limits when the object omits them.
void to_json(nlohmann::json& j, const Problem& p);
void from_json(const nlohmann::json& j, Problem& p);

void to_json(nlohmann::json& j, const RequirementSet& r);
void from_json(const nlohmann::json& j, RequirementSet& r);

void to_json(nlohmann::json& j, const CodeCandidate& c);
void from_json(const nlohmann::json& j, CodeCandidate& c);

void to_json(nlohmann::json& j, const VerdictRow& r);
void from_json(const nlohmann::json& j, VerdictRow& r);

void to_json(nlohmann::json& j, const VerdictMatrix& m);
void from_json(const nlohmann::json& j, VerdictMatrix& m);

}  // namespace nfrbench
