#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace nfrbench {

// ---------------------------------------------------------------------------
// Requirement categories
// ---------------------------------------------------------------------------

/// Closed set of requirement categories a test can verify. `FrGeneral` covers
/// both input/output conditions and expected behavior.
enum class Category {
    FrGeneral,
    FrEdge,
    NfrTime,
    NfrRobustness,
    NfrMaintainability,
    NfrReliability,
};

inline constexpr std::array<Category, 6> kAllCategories = {
    Category::FrGeneral,     Category::FrEdge,
    Category::NfrTime,       Category::NfrRobustness,
    Category::NfrMaintainability, Category::NfrReliability,
};

inline constexpr std::array<Category, 4> kNfrCategories = {
    Category::NfrTime,
    Category::NfrRobustness,
    Category::NfrMaintainability,
    Category::NfrReliability,
};

class UnknownCategory : public std::runtime_error {
public:
    explicit UnknownCategory(const std::string& label)
        : std::runtime_error("unknown category label: '" + label + "'"), label_(label) {}
    const std::string& label() const noexcept { return label_; }

private:
    std::string label_;
};

/// Stable snake_case identifier ("fr_general", "nfr_time", ...).
std::string_view to_string(Category c);
/// Inverse of to_string; throws UnknownCategory.
Category category_from_string(std::string_view id);
/// Human-facing name used in reports and preference instructions.
std::string_view display_name(Category c);

bool is_functional(Category c);
bool is_nonfunctional(Category c);

/// Maps a heading or label from a generated document ("## Edge Cases",
/// "### Robustness", "Performance Requirements") to its category. Leading
/// '#' marks, case and surrounding whitespace are ignored.
/// Throws UnknownCategory for labels that do not name a category.
Category normalize_category(std::string_view label);

/// Non-throwing variant of normalize_category.
std::optional<Category> try_normalize_category(std::string_view label);

// ---------------------------------------------------------------------------
// Tests and verdicts
// ---------------------------------------------------------------------------

enum class ProblemMode { Function, Stdio };

std::string_view to_string(ProblemMode m);
ProblemMode mode_from_string(std::string_view s);

enum class TestKind { Assertion, Stdio, CcThreshold, ReliabilityMarker };

std::string_view to_string(TestKind k);
TestKind kind_from_string(std::string_view s);

struct AssertionPayload {
    std::string assertion_code;
    bool operator==(const AssertionPayload&) const = default;
};

struct StdioPayload {
    std::string input;
    std::optional<std::string> expected_output;
    std::optional<std::string> expected_stderr_substring;
    bool operator==(const StdioPayload&) const = default;
};

struct CcThresholdPayload {
    int cc_limit = 10;
    bool operator==(const CcThresholdPayload&) const = default;
};

struct ReliabilityPayload {
    bool operator==(const ReliabilityPayload&) const = default;
};

using TestPayload =
    std::variant<AssertionPayload, StdioPayload, CcThresholdPayload, ReliabilityPayload>;

/// One category-tagged check. The payload alternative determines the kind.
struct GeneratedTest {
    std::string test_id;
    Category category = Category::FrGeneral;
    TestPayload payload;
    std::optional<std::string> comment;

    TestKind kind() const;
    bool operator==(const GeneratedTest&) const = default;
};

/// Structural problems with a single test (kind/category mismatch etc.).
/// Empty when the test is well formed.
std::vector<std::string> validate_test(const GeneratedTest& t, ProblemMode mode);

/// Values accepted for cc_limit without a warning.
bool is_standard_cc_limit(int limit);

/// Maintainability threshold derived from the ground-truth solution's
/// cyclomatic complexity: 5 when it is below 5, otherwise 10.
int cc_threshold_for_ground_truth(int ground_truth_cc);

struct ResourceLimits {
    double timeout_s = 5.0;
    int memory_mb = 256;
    bool operator==(const ResourceLimits&) const = default;
};

ResourceLimits default_limits(ProblemMode mode);

enum class VerdictStatus { Pass, Fail, Error, Timeout };

std::string_view to_string(VerdictStatus s);
VerdictStatus status_from_string(std::string_view s);

struct Verdict {
    std::string test_id;
    VerdictStatus status = VerdictStatus::Fail;
    std::int64_t wall_ms = 0;
    std::optional<std::string> message;

    /// Binary execution score: 1 only for a passing verdict.
    int score() const { return status == VerdictStatus::Pass ? 1 : 0; }
    bool operator==(const Verdict&) const = default;
};

// ---------------------------------------------------------------------------
// Problems, requirements and candidates
// ---------------------------------------------------------------------------

struct Problem {
    std::string task_id;
    ProblemMode mode = ProblemMode::Function;
    std::string description;
    std::optional<std::string> entry_point;
    std::optional<std::string> canonical_solution;
    std::vector<GeneratedTest> gt_tests;
    ResourceLimits limits;

    bool operator==(const Problem&) const = default;
};

/// Returns one message per violated invariant; empty when the problem is
/// well formed.
std::vector<std::string> validate_problem(const Problem& p);

/// Structured requirements document split into its category buckets.
struct RequirementSet {
    std::vector<std::string> io_conditions;
    std::vector<std::string> expected_behavior;
    std::vector<std::string> edge_cases;
    std::vector<std::string> time_performance;
    std::vector<std::string> robustness;
    std::vector<std::string> maintainability;
    std::vector<std::string> reliability;
    std::vector<std::string> problem_agnostic;
    std::string raw;

    bool empty_buckets() const;
    /// Bucket equality, ignoring `raw`.
    bool same_buckets(const RequirementSet& other) const;
    bool operator==(const RequirementSet&) const = default;
};

struct Provenance {
    std::string provider_id;
    std::string sampling_hash;
    bool operator==(const Provenance&) const = default;
};

struct CodeCandidate {
    std::string task_id;
    int sample_index = 0;
    std::string source;
    std::optional<std::string> reasoning;
    Provenance provenance;

    bool operator==(const CodeCandidate&) const = default;
};

/// Verdicts of one candidate over the executed test set.
struct VerdictRow {
    int sample_index = 0;
    std::vector<Verdict> verdicts;
    /// Set when infrastructure failed for this row; such rows carry no
    /// evidence about the code and are excluded from scoring.
    std::optional<std::string> infrastructure_error;

    bool aborted() const { return infrastructure_error.has_value(); }
    const Verdict* find(std::string_view test_id) const;
    bool operator==(const VerdictRow&) const = default;
};

struct VerdictMatrix {
    std::vector<VerdictRow> rows;

    const VerdictRow* row_for(int sample_index) const;
    std::size_t aborted_count() const;
    /// Statuses only, for comparisons that must ignore timing.
    std::vector<std::vector<VerdictStatus>> status_grid() const;
    bool operator==(const VerdictMatrix&) const = default;
};

}  // namespace nfrbench
