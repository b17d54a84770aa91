#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <random>

#include "nfrbench/json_io.hpp"
#include "nfrbench/parser.hpp"
#include "test_util.hpp"

using namespace nfrbench;
using nlohmann::json;

namespace {

std::size_t bucket_size(const RequirementSet& rs, const std::string& name) {
    if (name == "problem_agnostic") return rs.problem_agnostic.size();
    if (name == "io_conditions") return rs.io_conditions.size();
    if (name == "expected_behavior") return rs.expected_behavior.size();
    if (name == "edge_cases") return rs.edge_cases.size();
    if (name == "time_performance") return rs.time_performance.size();
    if (name == "robustness") return rs.robustness.size();
    if (name == "reliability") return rs.reliability.size();
    if (name == "maintainability") return rs.maintainability.size();
    throw std::invalid_argument(name);
}

json manifest() { return json::parse(testutil::read_file(testutil::fixtures() / "docs/manifest.json")); }

}  // namespace

// ---------------------------------------------------------------------------
// pyexpr
// ---------------------------------------------------------------------------

TEST(PyExpr, LiteralsAndOperators) {
    EXPECT_EQ(pyexpr::evaluate_string(R"("2 2\n101\n000\n000")"), "2 2\n101\n000\n000");
    EXPECT_EQ(pyexpr::evaluate_string(R"('a' 'b')"), "ab");
    EXPECT_EQ(std::get<long long>(pyexpr::evaluate("10**6")), 1000000);
    EXPECT_EQ(std::get<long long>(pyexpr::evaluate("(2 + 3) * 4")), 20);
    EXPECT_EQ(pyexpr::evaluate_string(R"("ab" * 3)"), "ababab");
    EXPECT_EQ(pyexpr::evaluate_string(R"(3 * "ab")"), "ababab");
    EXPECT_EQ(pyexpr::evaluate_string(R"("x" * 0)"), "");
    EXPECT_EQ(pyexpr::evaluate_string(R"("\x41\t\\")"), "A\t\\");
    EXPECT_EQ(pyexpr::evaluate_string("12"), "12");
}

TEST(PyExpr, LargeConstructedInputs) {
    auto s = pyexpr::evaluate_string(R"("1999 2\n" + "0" * 2000 + "\n" + "0" * 2000)");
    EXPECT_EQ(s.size(), 7u + 2000 + 1 + 2000);
    auto grid = pyexpr::evaluate_string(R"("2 1999\n" + "0\n" * 2000)");
    EXPECT_EQ(grid.size(), 7u + 4000);
}

TEST(PyExpr, RejectsNonLiterals) {
    EXPECT_THROW(pyexpr::evaluate("input()"), pyexpr::EvalError);
    EXPECT_THROW(pyexpr::evaluate(R"("a" + 1)"), pyexpr::EvalError);
    EXPECT_THROW(pyexpr::evaluate(R"("a" * "b")"), pyexpr::EvalError);
    EXPECT_THROW(pyexpr::evaluate(R"("open)"), pyexpr::EvalError);
    EXPECT_THROW(pyexpr::evaluate("1 2"), pyexpr::EvalError);
    EXPECT_THROW(pyexpr::evaluate(R"("a" * 10**9)"), pyexpr::EvalError);
}

TEST(PyExpr, QuoteRoundTripProperty) {
    std::mt19937 rng(7);
    const std::string alphabet = "ab \"'\\\n\t\r\x01{}#=";
    for (int i = 0; i < 500; ++i) {
        std::string s;
        const int len = static_cast<int>(rng() % 20);
        for (int k = 0; k < len; ++k) s.push_back(alphabet[rng() % alphabet.size()]);
        EXPECT_EQ(pyexpr::evaluate_string(pyexpr::quote(s)), s);
    }
}

TEST(PyExpr, QuoteAgreesWithPython) {
    if (!testutil::have_python()) GTEST_SKIP() << "python3 not available";
    testutil::TempDir dir;
    const std::vector<std::string> samples = {"plain", "a\"b", "back\\slash", "line\nbreak", "tab\tx", "\x01\x7f",
                                              "'single'", "{}#"};
    json expected = samples;
    std::string script = "import json\nvals = [";
    for (const auto& s : samples) script += pyexpr::quote(s) + ", ";
    script += "]\nprint(json.dumps(vals))\n";
    testutil::write_file(dir.path() / "q.py", script);
    auto r = testutil::run_command("python3 " + (dir.path() / "q.py").string());
    ASSERT_EQ(r.status, 0) << r.output;
    EXPECT_EQ(json::parse(r.output), expected);
}

// ---------------------------------------------------------------------------
// Code extraction
// ---------------------------------------------------------------------------

TEST(CodeExtract, LastFencedBlockWins) {
    auto r = split_code_completion("Plan:\n1. loop\n```python\nx = 1\n```\nRevised:\n```python\ndef f():\n    return 2\n```\n");
    EXPECT_EQ(r.code, "def f():\n    return 2");
    ASSERT_TRUE(r.reasoning);
    EXPECT_NE(r.reasoning->find("Revised:"), std::string::npos);
}

TEST(CodeExtract, FallsBackToFirstCodeLine) {
    auto r = split_code_completion("Here is the outline.\nimport sys\nprint(1)\n");
    EXPECT_EQ(r.code, "import sys\nprint(1)\n");
    EXPECT_EQ(r.reasoning, "Here is the outline.");
    EXPECT_EQ(extract_code_block("x = 1\n"), "x = 1\n");
}

TEST(CodeExtract, EmptyThrows) {
    EXPECT_THROW(extract_code_block("```python\n\n```"), EmptyCode);
    EXPECT_THROW(extract_code_block("   \n"), EmptyCode);
}

// ---------------------------------------------------------------------------
// Requirements documents
// ---------------------------------------------------------------------------

TEST(RequirementsDoc, FixtureCountsMatchManifest) {
    const json m = manifest();
    for (const auto& entry : m.at("requirements")) {
        const auto file = entry.at("file").get<std::string>();
        std::vector<std::string> warnings;
        auto rs = parse_requirements_doc(testutil::read_file(testutil::fixtures() / "docs" / file), &warnings);
        for (const auto& [bucket, n] : entry.at("counts").items()) {
            EXPECT_EQ(bucket_size(rs, bucket), n.get<std::size_t>()) << file << " bucket " << bucket;
        }
        EXPECT_TRUE(warnings.empty()) << file << ": " << (warnings.empty() ? "" : warnings.front());
    }
}

TEST(RequirementsDoc, UnknownHeadingsAndStrayText) {
    std::vector<std::string> warnings;
    auto rs = parse_requirements_doc("intro line\n# Security\n- no eval\n## Edge Cases\n- empty\n", &warnings);
    EXPECT_EQ(rs.problem_agnostic, (std::vector<std::string>{"intro line", "no eval"}));
    EXPECT_EQ(rs.edge_cases, (std::vector<std::string>{"empty"}));
    EXPECT_EQ(warnings.size(), 2u);
}

TEST(RequirementsDoc, SubHeadingsInheritBucket) {
    auto rs = parse_requirements_doc("## Input-output Conditions\n### Inputs\n- n\n### Outputs\n- sum\n");
    EXPECT_EQ(rs.io_conditions.size(), 2u);
}

TEST(RequirementsDoc, SerializeRoundTrip) {
    const json m = manifest();
    for (const auto& entry : m.at("requirements")) {
        auto rs = parse_requirements_doc(
            testutil::read_file(testutil::fixtures() / "docs" / entry.at("file").get<std::string>()));
        auto again = parse_requirements_doc(serialize_requirements(rs));
        EXPECT_TRUE(again.same_buckets(rs)) << entry.at("file");
        EXPECT_EQ(serialize_requirements(again), serialize_requirements(rs));
    }
}

TEST(RequirementsDoc, RandomRoundTripProperty) {
    std::mt19937 rng(11);
    const std::vector<std::string> words = {"handle", "empty", "list", "O(n)", "return", "None", "'x'", "<= 10"};
    auto item = [&] {
        std::string s;
        const int n = 1 + static_cast<int>(rng() % 5);
        for (int i = 0; i < n; ++i) s += (i ? " " : "") + words[rng() % words.size()];
        return s;
    };
    for (int iter = 0; iter < 200; ++iter) {
        RequirementSet rs;
        for (auto* b : {&rs.problem_agnostic, &rs.io_conditions, &rs.expected_behavior, &rs.edge_cases,
                        &rs.time_performance, &rs.robustness, &rs.reliability, &rs.maintainability}) {
            const int n = static_cast<int>(rng() % 4);
            for (int i = 0; i < n; ++i) b->push_back(item());
        }
        EXPECT_TRUE(parse_requirements_doc(serialize_requirements(rs)).same_buckets(rs));
    }
}

// ---------------------------------------------------------------------------
// Test documents
// ---------------------------------------------------------------------------

TEST(TestDoc, FixtureCountsMatchManifest) {
    const json m = manifest();
    for (const auto& entry : m.at("tests")) {
        const auto file = entry.at("file").get<std::string>();
        const auto mode = mode_from_string(entry.at("mode").get<std::string>());
        auto doc = parse_test_doc(testutil::read_file(testutil::fixtures() / "docs" / file), mode);
        std::size_t total = 0;
        for (const auto& [cat, n] : entry.at("counts").items()) {
            EXPECT_EQ(doc.count(category_from_string(cat)), n.get<std::size_t>()) << file << " " << cat;
            total += n.get<std::size_t>();
        }
        EXPECT_EQ(doc.tests.size(), total) << file;
        ASSERT_EQ(doc.count(TestKind::CcThreshold), 1u) << file;
        for (const auto& t : doc.tests) {
            if (t.kind() == TestKind::CcThreshold) {
                EXPECT_EQ(std::get<CcThresholdPayload>(t.payload).cc_limit, entry.at("cc_limit").get<int>()) << file;
            }
            EXPECT_TRUE(validate_test(t, mode).empty()) << file << " " << t.test_id;
        }
        if (entry.contains("stderr_tests")) {
            std::size_t n = 0;
            for (const auto& t : doc.tests) {
                if (auto* p = std::get_if<StdioPayload>(&t.payload); p && p->expected_stderr_substring) ++n;
            }
            EXPECT_EQ(n, entry.at("stderr_tests").get<std::size_t>()) << file;
        }
        EXPECT_TRUE(doc.warnings.empty()) << file << ": " << (doc.warnings.empty() ? "" : doc.warnings.front());
    }
}

TEST(TestDoc, TestIdsAreSequential) {
    auto doc = parse_test_doc(testutil::read_file(testutil::fixtures() / "docs/change_base.tests.txt"),
                              ProblemMode::Function);
    for (std::size_t i = 0; i < doc.tests.size(); ++i) EXPECT_EQ(doc.tests[i].test_id, "t" + std::to_string(i + 1));
}

TEST(TestDoc, CommentsAndSetupAttachToAssertion) {
    auto doc = parse_test_doc(testutil::read_file(testutil::fixtures() / "docs/longest_subarray.tests.txt"),
                              ProblemMode::Function);
    ASSERT_GE(doc.tests.size(), 2u);
    EXPECT_EQ(doc.tests[1].comment, "None of the subarrays have a sum less than or equal to 3\n"
                                    "The function should return an empty list");
    // The complexity check carries no assertion code; its import lines are consumed.
    EXPECT_EQ(doc.tests.back().kind(), TestKind::CcThreshold);
}

TEST(TestDoc, TelephoneStdioPayloads) {
    auto doc = parse_test_doc(testutil::read_file(testutil::fixtures() / "docs/telephone.tests.txt"),
                              ProblemMode::Stdio);
    const auto& first = std::get<StdioPayload>(doc.tests.at(0).payload);
    EXPECT_EQ(first.input, "2 2\n101\n000\n000");
    EXPECT_EQ(first.expected_output, "18");
    EXPECT_EQ(doc.tests.at(0).comment, "general case error");
    const auto& upper_n = std::get<StdioPayload>(doc.tests.at(3).payload);
    EXPECT_EQ(upper_n.input.size(), 7u + 2000 + 1 + 2000);
}

TEST(TestDoc, UncategorizedTestsDefaultWithWarning) {
    auto doc = parse_test_doc("assert f(1) == 1\n", ProblemMode::Function);
    ASSERT_EQ(doc.tests.size(), 1u);
    EXPECT_EQ(doc.tests[0].category, Category::FrGeneral);
    EXPECT_EQ(doc.warnings.size(), 1u);
}

TEST(TestDoc, MisplacedComplexityCheckIsMaintainability) {
    auto doc = parse_test_doc("## Edge Cases\nassert result.total_complexity < 6\n", ProblemMode::Function);
    ASSERT_EQ(doc.tests.size(), 1u);
    EXPECT_EQ(doc.tests[0].category, Category::NfrMaintainability);
    EXPECT_EQ(std::get<CcThresholdPayload>(doc.tests[0].payload).cc_limit, 5);
    EXPECT_FALSE(doc.warnings.empty());
}

TEST(TestDoc, MultiLineAssertion) {
    auto doc = parse_test_doc("## General Cases\nassert f([1,\n          2]) == 3, (\n    'msg')\n", ProblemMode::Function);
    ASSERT_EQ(doc.tests.size(), 1u);
    EXPECT_EQ(std::get<AssertionPayload>(doc.tests[0].payload).assertion_code,
              "assert f([1,\n          2]) == 3, (\n    'msg')");
}

TEST(TestDoc, IncompleteStdioRecordsWarn) {
    auto doc = parse_test_doc("## General Cases\nINPUT = \"1\"\n\nOUTPUT = \"2\"\nINPUT = \"3\" + x\n", ProblemMode::Stdio);
    EXPECT_TRUE(doc.tests.empty());
    EXPECT_GE(doc.warnings.size(), 2u);
}

TEST(TestDoc, SerializeIsIdempotentOnFixtures) {
    const json m = manifest();
    for (const auto& entry : m.at("tests")) {
        const auto mode = mode_from_string(entry.at("mode").get<std::string>());
        auto doc = parse_test_doc(
            testutil::read_file(testutil::fixtures() / "docs" / entry.at("file").get<std::string>()), mode);
        auto again = parse_test_doc(serialize_test_doc(doc.tests, mode), mode);
        EXPECT_EQ(again.tests, doc.tests) << entry.at("file");
    }
}

TEST(TestDoc, RandomStdioRoundTripProperty) {
    std::mt19937 rng(5);
    const std::string alphabet = "01 ab\n\"\\x";
    auto rand_str = [&](int max) {
        std::string s;
        const int n = 1 + static_cast<int>(rng() % max);
        for (int i = 0; i < n; ++i) s.push_back(alphabet[rng() % alphabet.size()]);
        return s;
    };
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<GeneratedTest> tests;
        const int n = 1 + static_cast<int>(rng() % 6);
        for (int i = 0; i < n; ++i) {
            const Category cats[] = {Category::FrGeneral, Category::FrEdge, Category::NfrTime, Category::NfrRobustness};
            StdioPayload p{rand_str(12), std::nullopt, std::nullopt};
            if (rng() % 2) p.expected_output = rand_str(5);
            else p.expected_stderr_substring = rand_str(5);
            tests.push_back({"t" + std::to_string(tests.size() + 1), cats[rng() % 4], p, "case " + std::to_string(i)});
        }
        tests.push_back({"t" + std::to_string(tests.size() + 1), Category::NfrReliability, ReliabilityPayload{}, std::nullopt});
        tests.push_back({"t" + std::to_string(tests.size() + 1), Category::NfrMaintainability, CcThresholdPayload{10}, std::nullopt});
        // The parser groups by heading, so order the generated list the same way.
        std::stable_sort(tests.begin(), tests.end() - 2, [](const auto& a, const auto& b) { return a.category < b.category; });
        for (std::size_t i = 0; i < tests.size(); ++i) tests[i].test_id = "t" + std::to_string(i + 1);
        auto doc = parse_test_doc(serialize_test_doc(tests, ProblemMode::Stdio), ProblemMode::Stdio);
        EXPECT_EQ(doc.tests, tests);
        EXPECT_TRUE(doc.warnings.empty());
    }
}

// ---------------------------------------------------------------------------
// Candidate substitution
// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string> kTrickySources = {
    "def f(x):\n    return x\n",
    "def f():\n    return \"\"\"doc\"\"\"\n",
    "s = 'it''s'\nt = \"q\\\"uote\"\n",
    "path = 'C:\\\\temp\\\\new'\n",
    "x = 1  # trailing quote \"\n",
    "ends_with_quote = \"\"",
    "tab\there\r\nwindows\n",
};

}  // namespace

TEST(Substitute, NonAssertionsYieldEmpty) {
    GeneratedTest cc{"t1", Category::NfrMaintainability, CcThresholdPayload{10}, {}};
    EXPECT_EQ(substitute_candidate(cc, CodeCandidate{}), "");
}

TEST(Substitute, PlainPlaceholderIsVerbatim) {
    GeneratedTest t{"t1", Category::FrGeneral, AssertionPayload{"${Generated Code}\nassert f(1) == 1"}, {}};
    CodeCandidate c;
    c.source = "def f(x):\n    return x";
    EXPECT_EQ(substitute_candidate(t, c), "def f(x):\n    return x\nassert f(1) == 1");
}

// Independent check: Python must read back exactly the candidate source from
// every literal form the placeholder can sit in.
TEST(Substitute, PythonReadsBackExactSource) {
    if (!testutil::have_python()) GTEST_SKIP() << "python3 not available";
    testutil::TempDir dir;
    const std::vector<std::string> wrappers = {
        "result = ComplexityVisitor.from_code(\"\"\"${Generated Code}\"\"\")",
        "result = ComplexityVisitor.from_code('''${Generated Code}''')",
        "result = ComplexityVisitor.from_code(\"${Generated Code}\")",
        "result = ComplexityVisitor.from_code('${Generated Code}')",
    };
    int case_no = 0;
    std::string checker = "import ast, sys\nok = True\n";
    for (const auto& w : wrappers) {
        for (const auto& src : kTrickySources) {
            GeneratedTest t{"t", Category::NfrMaintainability, AssertionPayload{w}, {}};
            CodeCandidate c;
            c.source = src;
            const auto name = "case" + std::to_string(case_no++);
            testutil::write_file(dir.path() / (name + ".py"), substitute_candidate(t, c));
            testutil::write_file(dir.path() / (name + ".src"), src);
            checker += "tree = ast.parse(open(r'" + (dir.path() / (name + ".py")).string() + "', newline='').read())\n";
            checker += "lit = tree.body[0].value.args[0].value\n";
            checker += "want = open(r'" + (dir.path() / (name + ".src")).string() + "', newline='').read()\n";
            checker += "if lit != want:\n    ok = False\n    print('mismatch " + name + "', repr(lit), repr(want))\n";
        }
    }
    checker += "sys.exit(0 if ok else 1)\n";
    testutil::write_file(dir.path() / "check.py", checker);
    auto r = testutil::run_command("python3 " + (dir.path() / "check.py").string());
    EXPECT_EQ(r.status, 0) << r.output;
}
