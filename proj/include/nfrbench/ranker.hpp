#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nfrbench/model.hpp"

namespace nfrbench {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class EmptyPool : public std::invalid_argument {
public:
    EmptyPool() : std::invalid_argument("candidate pool is empty") {}
};

class MissingCategoryTests : public std::runtime_error {
public:
    explicit MissingCategoryTests(Category c)
        : std::runtime_error("no ground-truth tests for category " + std::string(to_string(c))), category_(c) {}
    Category category() const noexcept { return category_; }

private:
    Category category_;
};

enum class Normalization { PerTest, PerCategory };

std::string_view to_string(Normalization n);
Normalization normalization_from_string(std::string_view s);

struct WeightProfile {
    std::array<double, 6> weights{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};  // indexed by Category
    Normalization normalization = Normalization::PerCategory;

    double weight(Category c) const { return weights[static_cast<std::size_t>(c)]; }
    void set(Category c, double w) { weights[static_cast<std::size_t>(c)] = w; }
    /// Throws std::invalid_argument on a negative weight or all-zero weights.
    void validate() const;
    WeightProfile scaled(double factor) const;
    /// Weight 1 on `cats`, 0 elsewhere.
    static WeightProfile only(const std::set<Category>& cats);
    bool operator==(const WeightProfile&) const = default;
};

/// Weighted test compliance of one candidate. `verdicts[i]` belongs to
/// `tests[i]`.
double score_candidate(const std::vector<GeneratedTest>& tests, const std::vector<Verdict>& verdicts,
                       const WeightProfile& weights);

using ScoredCandidate = std::pair<int, double>;  // (sample_index, score)

/// Up to k sample indices by descending score, ties by ascending index.
std::vector<int> filter_top_k(std::vector<ScoredCandidate> scores, int k);

/// Unbiased Pass@k estimate 1 - C(n-c, k) / C(n, k).
double pass_at_k(int n, int c, int k);

/// Candidate passes every test of `category` (every test at all when
/// nullopt). Reliability is judged over all tests when the set carries no
/// reliability marker. Throws MissingCategoryTests when nothing in `tests`
/// can decide the category.
bool passes_category(const std::vector<GeneratedTest>& tests, const std::vector<Verdict>& verdicts,
                     std::optional<Category> category);

/// Candidate passes every functional ground-truth test.
bool passes_functional(const std::vector<GeneratedTest>& tests, const std::vector<Verdict>& verdicts);

/// Whether `tests` can decide `category`.
bool category_available(const std::vector<GeneratedTest>& tests, Category category);

/// Execution results of one problem's candidate pool against the generated
/// tests (for ranking) and the ground-truth tests (for judging).
struct ProblemVerdicts {
    std::string task_id;
    std::vector<GeneratedTest> generated_tests;
    VerdictMatrix generated;
    std::vector<GeneratedTest> gt_tests;
    VerdictMatrix ground_truth;
};

/// Sample indices usable for scoring: rows present and not aborted in both
/// matrices, ascending.
std::vector<int> scoreable_samples(const ProblemVerdicts& pv);

std::vector<ScoredCandidate> candidate_scores(const ProblemVerdicts& pv, const WeightProfile& weights);

/// 1 iff a candidate among the top k by generated-test score passes all
/// functional ground-truth tests.
int filtered_pass_at_k(const ProblemVerdicts& pv, int k, const WeightProfile& weights);

/// Pass@k per requested k, counting candidates that pass `category`
/// (nullopt: every ground-truth test).
std::vector<double> category_pass_at_k(const ProblemVerdicts& pv, std::optional<Category> category,
                                       const std::vector<int>& ks);

struct MetricResult {
    int c = 0;
    std::map<int, double> unfiltered;  // k -> Pass@k
    std::map<int, int> filtered;       // k -> 0/1
};

struct ProblemPassK {
    std::string task_id;
    int n = 0;
    int c_gt = 0;
    /// Full ranking of scoreable samples by generated-test score.
    std::vector<int> ranking;
    std::vector<ScoredCandidate> scores;
    /// Keyed by "fr" (functional headline), category ids and "all".
    std::map<std::string, MetricResult> metrics;
    /// Category ids the ground truth cannot decide.
    std::vector<std::string> missing_categories;
};

/// Metrics for one problem. k values above the number of scoreable samples
/// are left out of that problem's maps.
ProblemPassK evaluate_problem(const ProblemVerdicts& pv, const std::vector<int>& ks, const WeightProfile& weights);

struct AggregateMetric {
    std::map<int, double> unfiltered;
    std::map<int, double> filtered;
    std::map<int, int> problems;  // problems contributing per k
};

struct PassKReport {
    std::vector<int> ks;
    std::vector<ProblemPassK> problems;
    std::map<std::string, AggregateMetric> aggregates;
};

/// Means over the problems that report each metric and k.
PassKReport aggregate_pass_k(std::vector<ProblemPassK> problems, std::vector<int> ks);

}  // namespace nfrbench
