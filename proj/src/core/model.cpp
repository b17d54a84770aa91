#include "nfrbench/model.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <utility>

#include "nfrbench/text.hpp"

namespace nfrbench {

namespace {

struct CategoryNames {
    Category category;
    std::string_view id;
    std::string_view display;
};

constexpr std::array<CategoryNames, 6> kCategoryNames = {{
    {Category::FrGeneral, "fr_general", "General"},
    {Category::FrEdge, "fr_edge", "Edge"},
    {Category::NfrTime, "nfr_time", "Time Perf."},
    {Category::NfrRobustness, "nfr_robustness", "Robustness"},
    {Category::NfrMaintainability, "nfr_maintainability", "Maintainability"},
    {Category::NfrReliability, "nfr_reliability", "Reliability"},
}};

// Heading aliases after lower-casing and suffix stripping.
const std::vector<std::pair<std::string_view, Category>>& heading_aliases() {
    static const std::vector<std::pair<std::string_view, Category>> aliases = {
        {"general", Category::FrGeneral},
        {"input-output conditions", Category::FrGeneral},
        {"input/output conditions", Category::FrGeneral},
        {"input output conditions", Category::FrGeneral},
        {"io conditions", Category::FrGeneral},
        {"expected behavior", Category::FrGeneral},
        {"expected behaviour", Category::FrGeneral},
        {"edge", Category::FrEdge},
        {"performance", Category::NfrTime},
        {"time performance", Category::NfrTime},
        {"time perf.", Category::NfrTime},
        {"time", Category::NfrTime},
        {"robustness", Category::NfrRobustness},
        {"maintainability", Category::NfrMaintainability},
        {"reliability", Category::NfrReliability},
    };
    return aliases;
}

constexpr std::array<std::string_view, 7> kGenericSuffixes = {
    " test cases", " requirements", " requirement", " cases", " case", " tests", " test",
};

}  // namespace

std::string_view to_string(Category c) {
    for (const auto& n : kCategoryNames) {
        if (n.category == c) return n.id;
    }
    return "fr_general";
}

Category category_from_string(std::string_view id) {
    for (const auto& n : kCategoryNames) {
        if (n.id == id) return n.category;
    }
    throw UnknownCategory(std::string(id));
}

std::string_view display_name(Category c) {
    for (const auto& n : kCategoryNames) {
        if (n.category == c) return n.display;
    }
    return "General";
}

bool is_functional(Category c) { return c == Category::FrGeneral || c == Category::FrEdge; }
bool is_nonfunctional(Category c) { return !is_functional(c); }

std::optional<Category> try_normalize_category(std::string_view label) {
    std::string s = text::to_lower(text::trim(text::strip_heading_marks(label)));
    while (!s.empty() && (s.back() == ':' || std::isspace(static_cast<unsigned char>(s.back())))) {
        s.pop_back();
    }
    s = text::collapse_spaces(s);
    if (s.empty()) return std::nullopt;

    const auto lookup = [](std::string_view key) -> std::optional<Category> {
        for (const auto& [alias, cat] : heading_aliases()) {
            if (alias == key) return cat;
        }
        return std::nullopt;
    };
    if (auto c = lookup(s)) return c;
    for (auto suffix : kGenericSuffixes) {
        if (s.size() > suffix.size() && s.ends_with(suffix)) {
            if (auto c = lookup(std::string_view(s).substr(0, s.size() - suffix.size()))) return c;
        }
    }
    return std::nullopt;
}

Category normalize_category(std::string_view label) {
    if (auto c = try_normalize_category(label)) return *c;
    throw UnknownCategory(std::string(label));
}

std::string_view to_string(ProblemMode m) { return m == ProblemMode::Function ? "function" : "stdio"; }

ProblemMode mode_from_string(std::string_view s) {
    if (s == "function") return ProblemMode::Function;
    if (s == "stdio") return ProblemMode::Stdio;
    throw std::invalid_argument("unknown problem mode: '" + std::string(s) + "'");
}

std::string_view to_string(TestKind k) {
    switch (k) {
        case TestKind::Assertion: return "assertion";
        case TestKind::Stdio: return "stdio";
        case TestKind::CcThreshold: return "cc_threshold";
        case TestKind::ReliabilityMarker: return "reliability_marker";
    }
    return "assertion";
}

TestKind kind_from_string(std::string_view s) {
    if (s == "assertion") return TestKind::Assertion;
    if (s == "stdio") return TestKind::Stdio;
    if (s == "cc_threshold") return TestKind::CcThreshold;
    if (s == "reliability_marker") return TestKind::ReliabilityMarker;
    throw std::invalid_argument("unknown test kind: '" + std::string(s) + "'");
}

TestKind GeneratedTest::kind() const {
    return std::visit(
        [](const auto& p) -> TestKind {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, AssertionPayload>) return TestKind::Assertion;
            else if constexpr (std::is_same_v<T, StdioPayload>) return TestKind::Stdio;
            else if constexpr (std::is_same_v<T, CcThresholdPayload>) return TestKind::CcThreshold;
            else return TestKind::ReliabilityMarker;
        },
        payload);
}

bool is_standard_cc_limit(int limit) { return limit == 5 || limit == 10; }

int cc_threshold_for_ground_truth(int ground_truth_cc) { return ground_truth_cc < 5 ? 5 : 10; }

std::vector<std::string> validate_test(const GeneratedTest& t, ProblemMode mode) {
    std::vector<std::string> out;
    if (t.test_id.empty()) out.emplace_back("test_id must be non-empty");
    switch (t.kind()) {
        case TestKind::CcThreshold: {
            if (t.category != Category::NfrMaintainability) {
                out.push_back("cc_threshold test " + t.test_id + " must be nfr_maintainability");
            }
            if (std::get<CcThresholdPayload>(t.payload).cc_limit < 1) {
                out.push_back("cc_limit must be >= 1 in " + t.test_id);
            }
            break;
        }
        case TestKind::ReliabilityMarker:
            if (t.category != Category::NfrReliability) {
                out.push_back("reliability_marker test " + t.test_id + " must be nfr_reliability");
            }
            break;
        case TestKind::Stdio: {
            if (mode != ProblemMode::Stdio) {
                out.push_back("stdio test " + t.test_id + " requires mode=stdio");
            }
            const auto& p = std::get<StdioPayload>(t.payload);
            if (!p.expected_output && !p.expected_stderr_substring) {
                out.push_back("stdio test " + t.test_id + " has no expectation");
            }
            break;
        }
        case TestKind::Assertion:
            if (mode != ProblemMode::Function) {
                out.push_back("assertion test " + t.test_id + " requires mode=function");
            }
            break;
    }
    return out;
}

ResourceLimits default_limits(ProblemMode mode) {
    return ResourceLimits{mode == ProblemMode::Function ? 5.0 : 2.0, 256};
}

std::string_view to_string(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::Pass: return "pass";
        case VerdictStatus::Fail: return "fail";
        case VerdictStatus::Error: return "error";
        case VerdictStatus::Timeout: return "timeout";
    }
    return "fail";
}

VerdictStatus status_from_string(std::string_view s) {
    if (s == "pass") return VerdictStatus::Pass;
    if (s == "fail") return VerdictStatus::Fail;
    if (s == "error") return VerdictStatus::Error;
    if (s == "timeout") return VerdictStatus::Timeout;
    throw std::invalid_argument("unknown verdict status: '" + std::string(s) + "'");
}

std::vector<std::string> validate_problem(const Problem& p) {
    std::vector<std::string> out;
    if (p.task_id.empty()) out.emplace_back("task_id required");
    if (p.mode == ProblemMode::Function && (!p.entry_point || p.entry_point->empty())) {
        out.emplace_back("entry_point required");
    }
    if (p.mode == ProblemMode::Stdio && p.entry_point) {
        out.emplace_back("entry_point must be absent in stdio mode");
    }
    if (!(p.limits.timeout_s > 0.0)) out.emplace_back("limits.timeout_s must be positive");
    if (p.limits.memory_mb <= 0) out.emplace_back("limits.memory_mb must be positive");

    std::set<std::string> seen;
    for (const auto& t : p.gt_tests) {
        if (!seen.insert(t.test_id).second) out.push_back("duplicate test_id: " + t.test_id);
        for (auto& msg : validate_test(t, p.mode)) out.push_back(std::move(msg));
    }
    return out;
}

bool RequirementSet::empty_buckets() const {
    return io_conditions.empty() && expected_behavior.empty() && edge_cases.empty() &&
           time_performance.empty() && robustness.empty() && maintainability.empty() &&
           reliability.empty() && problem_agnostic.empty();
}

bool RequirementSet::same_buckets(const RequirementSet& o) const {
    return io_conditions == o.io_conditions && expected_behavior == o.expected_behavior &&
           edge_cases == o.edge_cases && time_performance == o.time_performance &&
           robustness == o.robustness && maintainability == o.maintainability &&
           reliability == o.reliability && problem_agnostic == o.problem_agnostic;
}

const Verdict* VerdictRow::find(std::string_view test_id) const {
    auto it = std::find_if(verdicts.begin(), verdicts.end(),
                           [&](const Verdict& v) { return v.test_id == test_id; });
    return it == verdicts.end() ? nullptr : &*it;
}

const VerdictRow* VerdictMatrix::row_for(int sample_index) const {
    auto it = std::find_if(rows.begin(), rows.end(),
                           [&](const VerdictRow& r) { return r.sample_index == sample_index; });
    return it == rows.end() ? nullptr : &*it;
}

std::size_t VerdictMatrix::aborted_count() const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [](const VerdictRow& r) { return r.aborted(); }));
}

std::vector<std::vector<VerdictStatus>> VerdictMatrix::status_grid() const {
    std::vector<std::vector<VerdictStatus>> grid;
    grid.reserve(rows.size());
    for (const auto& r : rows) {
        std::vector<VerdictStatus> line;
        line.reserve(r.verdicts.size());
        for (const auto& v : r.verdicts) line.push_back(v.status);
        grid.push_back(std::move(line));
    }
    return grid;
}

}  // namespace nfrbench
