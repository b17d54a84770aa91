#include <gtest/gtest.h>

#include "nfrbench/json_io.hpp"
#include "nfrbench/model.hpp"
#include "nfrbench/text.hpp"

using namespace nfrbench;
using nlohmann::json;

TEST(Category, IdsRoundTrip) {
    for (Category c : kAllCategories) EXPECT_EQ(category_from_string(to_string(c)), c);
    EXPECT_THROW(category_from_string("nfr_speed"), UnknownCategory);
}

TEST(Category, HeadingAliases) {
    EXPECT_EQ(normalize_category("## General Cases"), Category::FrGeneral);
    EXPECT_EQ(normalize_category("## Input-output Conditions"), Category::FrGeneral);
    EXPECT_EQ(normalize_category("## Expected Behavior"), Category::FrGeneral);
    EXPECT_EQ(normalize_category("## Edge Cases"), Category::FrEdge);
    EXPECT_EQ(normalize_category("## Performance Requirements"), Category::NfrTime);
    EXPECT_EQ(normalize_category("performance"), Category::NfrTime);
    EXPECT_EQ(normalize_category("### ROBUSTNESS:"), Category::NfrRobustness);
    EXPECT_EQ(normalize_category("#### Maintainability"), Category::NfrMaintainability);
    EXPECT_EQ(normalize_category("## Reliability"), Category::NfrReliability);
    EXPECT_FALSE(try_normalize_category("## Specific Quality Requirements"));
    EXPECT_FALSE(try_normalize_category("### Inputs"));
    EXPECT_FALSE(try_normalize_category("Requirements"));
    EXPECT_THROW(normalize_category("Security"), UnknownCategory);
}

TEST(Category, FunctionalSplit) {
    int fr = 0;
    for (Category c : kAllCategories) fr += is_functional(c) ? 1 : 0;
    EXPECT_EQ(fr, 2);
    for (Category c : kNfrCategories) EXPECT_TRUE(is_nonfunctional(c));
}

TEST(Model, CcThresholdRule) {
    EXPECT_EQ(cc_threshold_for_ground_truth(1), 5);
    EXPECT_EQ(cc_threshold_for_ground_truth(4), 5);
    EXPECT_EQ(cc_threshold_for_ground_truth(5), 10);
    EXPECT_EQ(cc_threshold_for_ground_truth(23), 10);
    EXPECT_TRUE(is_standard_cc_limit(5));
    EXPECT_TRUE(is_standard_cc_limit(10));
    EXPECT_FALSE(is_standard_cc_limit(7));
}

TEST(Model, DefaultLimitsByMode) {
    EXPECT_DOUBLE_EQ(default_limits(ProblemMode::Function).timeout_s, 5.0);
    EXPECT_DOUBLE_EQ(default_limits(ProblemMode::Stdio).timeout_s, 2.0);
    EXPECT_EQ(default_limits(ProblemMode::Stdio).memory_mb, 256);
}

TEST(Model, ValidateTestKindsAgainstMode) {
    GeneratedTest cc{"t1", Category::FrGeneral, CcThresholdPayload{10}, {}};
    EXPECT_FALSE(validate_test(cc, ProblemMode::Function).empty());
    cc.category = Category::NfrMaintainability;
    EXPECT_TRUE(validate_test(cc, ProblemMode::Function).empty());

    GeneratedTest io{"t2", Category::FrGeneral, StdioPayload{"1\n", std::nullopt, std::nullopt}, {}};
    auto errs = validate_test(io, ProblemMode::Function);
    EXPECT_EQ(errs.size(), 2u);  // wrong mode, no expectation

    GeneratedTest a{"t3", Category::FrEdge, AssertionPayload{"assert f(0) == 0"}, {}};
    EXPECT_FALSE(validate_test(a, ProblemMode::Stdio).empty());

    GeneratedTest marker{"t4", Category::NfrTime, ReliabilityPayload{}, {}};
    EXPECT_FALSE(validate_test(marker, ProblemMode::Function).empty());
}

TEST(Model, ValidateProblem) {
    Problem p;
    p.task_id = "X/1";
    p.mode = ProblemMode::Function;
    EXPECT_FALSE(validate_problem(p).empty());  // entry point missing
    p.entry_point = "f";
    EXPECT_TRUE(validate_problem(p).empty());
    p.gt_tests = {{"a", Category::FrGeneral, AssertionPayload{"assert f()"}, {}},
                  {"a", Category::FrGeneral, AssertionPayload{"assert f()"}, {}}};
    EXPECT_FALSE(validate_problem(p).empty());
    p.gt_tests.pop_back();
    p.limits.timeout_s = 0;
    EXPECT_FALSE(validate_problem(p).empty());
}

TEST(Json, GeneratedTestRoundTrip) {
    std::vector<GeneratedTest> tests = {
        {"t1", Category::FrGeneral, AssertionPayload{"assert f(1) == 2"}, std::string("general")},
        {"t2", Category::FrEdge, StdioPayload{"0 0\n", std::string("0"), std::nullopt}, std::nullopt},
        {"t3", Category::NfrRobustness, StdioPayload{"x\n", std::nullopt, std::string("invalid")}, std::nullopt},
        {"t4", Category::NfrMaintainability, CcThresholdPayload{5}, std::nullopt},
        {"t5", Category::NfrReliability, ReliabilityPayload{}, std::nullopt},
    };
    for (const auto& t : tests) {
        json j = t;
        EXPECT_EQ(j.get<GeneratedTest>(), t) << j.dump();
        EXPECT_EQ(json::parse(j.dump()).get<GeneratedTest>(), t);
    }
}

TEST(Json, RejectsMalformedTests) {
    EXPECT_THROW((json{{"test_id", "t"}, {"kind", "assertion"}, {"payload", {{"assertion_code", "x"}}}}
                      .get<GeneratedTest>()),
                 SchemaError);
    EXPECT_THROW((json{{"test_id", "t"}, {"category", "fr_general"}, {"kind", "bogus"}}.get<GeneratedTest>()),
                 SchemaError);
    EXPECT_THROW((json{{"test_id", "t"}, {"category", "nfr_maintainability"}, {"kind", "cc_threshold"},
                       {"payload", {{"cc_limit", "ten"}}}}
                      .get<GeneratedTest>()),
                 SchemaError);
    EXPECT_THROW((json{{"test_id", "t"}, {"category", "nfr_reliability"}, {"kind", "reliability_marker"},
                       {"payload", {{"x", 1}}}}
                      .get<GeneratedTest>()),
                 SchemaError);
}

TEST(Json, ProblemRoundTripAndDefaults) {
    Problem p;
    p.task_id = "HumanEval/0";
    p.mode = ProblemMode::Function;
    p.description = "def f(x):\n    \"\"\"doc\"\"\"\n";
    p.entry_point = "f";
    p.canonical_solution = "    return x\n";
    p.gt_tests = {{"g1", Category::FrGeneral, AssertionPayload{"assert f(1) == 1"}, {}}};
    json j = p;
    EXPECT_EQ(j.get<Problem>(), p);

    json stdio = {{"task_id", "CC/1"}, {"mode", "stdio"}, {"description", "d"}};
    Problem s = stdio.get<Problem>();
    EXPECT_EQ(s.limits, default_limits(ProblemMode::Stdio));
    EXPECT_TRUE(s.gt_tests.empty());
}

TEST(Json, VerdictAndMatrixRoundTrip) {
    VerdictMatrix m;
    m.rows.push_back({0, {{"t1", VerdictStatus::Pass, 3, std::nullopt}, {"t2", VerdictStatus::Timeout, 5000, std::string("slow")}}, std::nullopt});
    m.rows.push_back({1, {}, std::string("runner crashed")});
    json j = m;
    VerdictMatrix back = j.get<VerdictMatrix>();
    EXPECT_EQ(back, m);
    EXPECT_EQ(back.aborted_count(), 1u);
    EXPECT_EQ(back.row_for(0)->find("t2")->status, VerdictStatus::Timeout);
    EXPECT_EQ(back.row_for(7), nullptr);

    EXPECT_THROW((json{{"test_id", "t"}, {"status", "pass"}, {"wall_ms", -1}}.get<Verdict>()), SchemaError);
    EXPECT_THROW((json{{"test_id", "t"}, {"status", "crashed"}}.get<Verdict>()), SchemaError);
}

TEST(Json, RequirementSetRoundTrip) {
    RequirementSet rs;
    rs.io_conditions = {"takes a list"};
    rs.edge_cases = {"empty list"};
    rs.maintainability = {"CC <= 10"};
    rs.raw = "raw text";
    json j = rs;
    EXPECT_EQ(j.get<RequirementSet>(), rs);
}

TEST(Text, Helpers) {
    EXPECT_EQ(text::trim("  a b \t"), "a b");
    EXPECT_EQ(text::heading_depth("### x"), 3);
    EXPECT_EQ(text::heading_depth("#x"), 0);
    EXPECT_EQ(text::heading_depth("#"), 1);
    EXPECT_EQ(text::strip_heading_marks("## Edge Cases  "), "Edge Cases");
    EXPECT_EQ(text::split_lines("a\r\nb\n").size(), 2u);
    EXPECT_EQ(text::split_lines("a\n\nb").size(), 3u);
    EXPECT_EQ(text::normalize_output("18  \n\n"), "18");
    EXPECT_EQ(text::replace_all("aXbXc", "X", "--"), "a--b--c");
}
