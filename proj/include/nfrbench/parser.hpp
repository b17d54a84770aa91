#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nfrbench/model.hpp"

namespace nfrbench {

class EmptyCode : public std::runtime_error {
public:
    EmptyCode() : std::runtime_error("completion contains no code") {}
};

/// Placeholder replaced by the candidate's source text in assertion tests.
inline constexpr std::string_view kGeneratedCodePlaceholder = "${Generated Code}";

/// Marker text that stands for the derived reliability check.
inline constexpr std::string_view kReliabilityMarkerText =
    "Satisfied if no errors occur across all test cases";

struct ExtractedCode {
    std::string code;
    /// Text preceding the final fenced block (outline and revised
    /// requirements), when the completion carried any.
    std::optional<std::string> reasoning;
};

/// Returns the last fenced code block; failing that, the suffix starting at
/// the first import/def-like line; failing that, the whole text.
/// Throws EmptyCode when the result is blank.
std::string extract_code_block(std::string_view completion);
ExtractedCode split_code_completion(std::string_view completion);

/// Best-effort parse of a requirements document into category buckets.
/// Bullets under unknown top-level headings go to `problem_agnostic` with a
/// warning; unknown sub-headings inherit their enclosing bucket.
RequirementSet parse_requirements_doc(std::string_view doc,
                                      std::vector<std::string>* warnings = nullptr);

/// Canonical heading-format rendering of the buckets. `raw` is ignored.
std::string serialize_requirements(const RequirementSet& rs);

struct ParsedTestDoc {
    std::vector<GeneratedTest> tests;
    std::vector<std::string> warnings;

    std::size_t count(Category c) const;
    std::size_t count(TestKind k) const;
    std::size_t count(Category c, TestKind k) const;
};

/// Splits a generated test document into category-tagged tests. Test ids
/// are assigned "t1", "t2", ... in document order.
ParsedTestDoc parse_test_doc(std::string_view doc, ProblemMode mode);

/// Canonical document for a test list; parse_test_doc on the result yields
/// the same tests.
std::string serialize_test_doc(const std::vector<GeneratedTest>& tests, ProblemMode mode);

/// Assertion code with the generated-code placeholder replaced by the
/// candidate source, escaped for the string literal that encloses the
/// placeholder. Non-assertion tests return an empty string.
std::string substitute_candidate(const GeneratedTest& test, const CodeCandidate& candidate);

// Helpers for the Python-flavoured literals used in stdio test documents.
namespace pyexpr {

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Value = std::variant<std::string, long long>;

/// Evaluates string/int literals combined with `+`, `*` and parentheses,
/// e.g. `"1999 2\n" + "0" * 2000`. Throws EvalError for anything else.
Value evaluate(std::string_view expr);
std::string evaluate_string(std::string_view expr);

/// Double-quoted literal whose evaluation yields `s` back.
std::string quote(std::string_view s);

}  // namespace pyexpr

}  // namespace nfrbench
