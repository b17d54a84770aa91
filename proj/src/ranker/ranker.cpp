#include "nfrbench/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "nfrbench/orchestrator.hpp"

namespace nfrbench {

std::string_view to_string(Normalization n) { return n == Normalization::PerTest ? "per_test" : "per_category"; }

Normalization normalization_from_string(std::string_view s) {
    if (s == "per_test") return Normalization::PerTest;
    if (s == "per_category") return Normalization::PerCategory;
    throw std::invalid_argument("unknown normalization: '" + std::string(s) + "'");
}

void WeightProfile::validate() const {
    bool any = false;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("weights must be >= 0");
        any = any || w > 0.0;
    }
    if (!any) throw std::invalid_argument("at least one weight must be positive");
}

WeightProfile WeightProfile::scaled(double factor) const {
    WeightProfile out = *this;
    for (double& w : out.weights) w *= factor;
    return out;
}

WeightProfile WeightProfile::only(const std::set<Category>& cats) {
    WeightProfile out;
    out.weights.fill(0.0);
    for (Category c : cats) out.set(c, 1.0);
    return out;
}

namespace {

void check_aligned(const std::vector<GeneratedTest>& tests, const std::vector<Verdict>& verdicts) {
    if (tests.size() != verdicts.size()) {
        throw std::invalid_argument("verdict row has " + std::to_string(verdicts.size()) + " entries for " +
                                    std::to_string(tests.size()) + " tests");
    }
    for (std::size_t i = 0; i < tests.size(); ++i) {
        if (tests[i].test_id != verdicts[i].test_id) {
            throw std::invalid_argument("verdict " + verdicts[i].test_id + " does not match test " +
                                        tests[i].test_id);
        }
    }
}

}  // namespace

double score_candidate(const std::vector<GeneratedTest>& tests, const std::vector<Verdict>& verdicts,
                       const WeightProfile& weights) {
    check_aligned(tests, verdicts);
    if (weights.normalization == Normalization::PerTest) {
        double score = 0.0;
        for (std::size_t i = 0; i < tests.size(); ++i) score += weights.weight(tests[i].category) * verdicts[i].score();
        return score;
    }
    std::array<int, 6> total{};
    std::array<int, 6> passed{};
    for (std::size_t i = 0; i < tests.size(); ++i) {
        const auto c = static_cast<std::size_t>(tests[i].category);
        ++total[c];
        passed[c] += verdicts[i].score();
    }
    double score = 0.0;
    for (std::size_t c = 0; c < total.size(); ++c) {
        if (total[c] == 0) continue;
        score += weights.weights[c] * static_cast<double>(passed[c]) / static_cast<double>(total[c]);
    }
    return score;
}

std::vector<int> filter_top_k(std::vector<ScoredCandidate> scores, int k) {
    if (k < 1) throw DomainError("k must be >= 1");
    if (scores.empty()) throw EmptyPool();
    // Scores that differ only by summation rounding count as ties, so the
    // selection does not depend on the overall scale of the weights.
    double top = 0.0;
    for (const auto& [_, s] : scores) {
        if (!std::isfinite(s)) throw DomainError("candidate score must be finite");
        top = std::max(top, std::abs(s));
    }
    auto key = [top](double s) -> long long {
        return top > 0.0 ? std::llround(std::ldexp(s / top, 36)) : 0;
    };
    std::sort(scores.begin(), scores.end(), [&](const ScoredCandidate& a, const ScoredCandidate& b) {
        const long long ka = key(a.second);
        const long long kb = key(b.second);
        if (ka != kb) return ka > kb;
        return a.first < b.first;
    });
    const auto take = std::min(scores.size(), static_cast<std::size_t>(k));
    std::vector<int> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(scores[i].first);
    return out;
}

double pass_at_k(int n, int c, int k) {
    if (n < 0 || c < 0 || c > n) throw DomainError("pass_at_k needs 0 <= c <= n");
    if (k < 1 || k > n) throw DomainError("pass_at_k needs 1 <= k <= n");
    if (n - c < k) return 1.0;
    // Exact binomials while they fit a double mantissa, so one correctly
    // rounded division gives e.g. pass_at_k(10, 1, 1) == 0.1.
    const auto binom = [](int m, int r) -> unsigned long long {
        r = std::min(r, m - r);
        unsigned __int128 acc = 1;
        for (int i = 0; i < r; ++i) {
            acc = acc * static_cast<unsigned>(m - i) / static_cast<unsigned>(i + 1);
            if (acc > (static_cast<unsigned __int128>(1) << 53)) return 0;
        }
        return static_cast<unsigned long long>(acc);
    };
    if (const auto all = binom(n, k); all != 0) {
        return static_cast<double>(all - binom(n - c, k)) / static_cast<double>(all);
    }
    double miss = 1.0;
    for (int i = n - c + 1; i <= n; ++i) miss *= 1.0 - static_cast<double>(k) / static_cast<double>(i);
    return 1.0 - miss;
}

bool category_available(const std::vector<GeneratedTest>& tests, Category category) {
    return std::any_of(tests.begin(), tests.end(), [&](const GeneratedTest& t) {
        if (category == Category::NfrReliability) return t.kind() != TestKind::ReliabilityMarker;
        return t.category == category;
    });
}

bool passes_category(const std::vector<GeneratedTest>& tests, const std::vector<Verdict>& verdicts,
                     std::optional<Category> category) {
    check_aligned(tests, verdicts);
    if (!category) {
        return std::all_of(verdicts.begin(), verdicts.end(),
                           [](const Verdict& v) { return v.status == VerdictStatus::Pass; });
    }
    if (!category_available(tests, *category)) throw MissingCategoryTests(*category);
    if (*category == Category::NfrReliability) {
        std::vector<Verdict> executed;
        for (std::size_t i = 0; i < tests.size(); ++i) {
            if (tests[i].kind() != TestKind::ReliabilityMarker) executed.push_back(verdicts[i]);
        }
        return evaluate_reliability(executed).status == VerdictStatus::Pass;
    }
    for (std::size_t i = 0; i < tests.size(); ++i) {
        if (tests[i].category == *category && verdicts[i].status != VerdictStatus::Pass) return false;
    }
    return true;
}

bool passes_functional(const std::vector<GeneratedTest>& tests, const std::vector<Verdict>& verdicts) {
    check_aligned(tests, verdicts);
    bool any = false;
    for (std::size_t i = 0; i < tests.size(); ++i) {
        if (!is_functional(tests[i].category)) continue;
        any = true;
        if (verdicts[i].status != VerdictStatus::Pass) return false;
    }
    if (!any) throw MissingCategoryTests(Category::FrGeneral);
    return true;
}

std::vector<int> scoreable_samples(const ProblemVerdicts& pv) {
    std::vector<int> out;
    for (const auto& row : pv.ground_truth.rows) {
        if (row.aborted()) continue;
        const VerdictRow* gen = pv.generated.row_for(row.sample_index);
        if (gen && !gen->aborted()) out.push_back(row.sample_index);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<ScoredCandidate> candidate_scores(const ProblemVerdicts& pv, const WeightProfile& weights) {
    std::vector<ScoredCandidate> out;
    for (int s : scoreable_samples(pv)) {
        out.emplace_back(s, score_candidate(pv.generated_tests, pv.generated.row_for(s)->verdicts, weights));
    }
    return out;
}

namespace {

using Judge = std::function<bool(const std::vector<Verdict>&)>;

MetricResult metric(const ProblemVerdicts& pv, const std::vector<int>& samples, const std::vector<int>& ranking,
                    const std::vector<int>& ks, const Judge& judge) {
    MetricResult r;
    std::map<int, bool> ok;
    for (int s : samples) {
        ok[s] = judge(pv.ground_truth.row_for(s)->verdicts);
        r.c += ok[s] ? 1 : 0;
    }
    const int n = static_cast<int>(samples.size());
    for (int k : ks) {
        if (k < 1 || k > n) continue;
        r.unfiltered[k] = pass_at_k(n, r.c, k);
        int hit = 0;
        for (int i = 0; i < k; ++i) hit = hit || ok[ranking[static_cast<std::size_t>(i)]];
        r.filtered[k] = hit;
    }
    return r;
}

}  // namespace

int filtered_pass_at_k(const ProblemVerdicts& pv, int k, const WeightProfile& weights) {
    for (int s : filter_top_k(candidate_scores(pv, weights), k)) {
        if (passes_functional(pv.gt_tests, pv.ground_truth.row_for(s)->verdicts)) return 1;
    }
    return 0;
}

std::vector<double> category_pass_at_k(const ProblemVerdicts& pv, std::optional<Category> category,
                                       const std::vector<int>& ks) {
    if (category && !category_available(pv.gt_tests, *category)) throw MissingCategoryTests(*category);
    const auto samples = scoreable_samples(pv);
    int c = 0;
    for (int s : samples) c += passes_category(pv.gt_tests, pv.ground_truth.row_for(s)->verdicts, category) ? 1 : 0;
    std::vector<double> out;
    for (int k : ks) out.push_back(pass_at_k(static_cast<int>(samples.size()), c, k));
    return out;
}

ProblemPassK evaluate_problem(const ProblemVerdicts& pv, const std::vector<int>& ks, const WeightProfile& weights) {
    ProblemPassK out;
    out.task_id = pv.task_id;
    const auto samples = scoreable_samples(pv);
    out.n = static_cast<int>(samples.size());
    out.scores = candidate_scores(pv, weights);
    if (!samples.empty()) out.ranking = filter_top_k(out.scores, out.n);

    const bool has_fr = std::any_of(pv.gt_tests.begin(), pv.gt_tests.end(),
                                    [](const GeneratedTest& t) { return is_functional(t.category); });
    if (has_fr) {
        out.metrics["fr"] = metric(pv, samples, out.ranking, ks,
                                   [&](const auto& v) { return passes_functional(pv.gt_tests, v); });
        out.c_gt = out.metrics["fr"].c;
    } else {
        out.missing_categories.push_back("fr");
    }
    for (Category cat : kAllCategories) {
        const std::string key(to_string(cat));
        if (!category_available(pv.gt_tests, cat)) {
            out.missing_categories.push_back(key);
            continue;
        }
        out.metrics[key] = metric(pv, samples, out.ranking, ks,
                                  [&](const auto& v) { return passes_category(pv.gt_tests, v, cat); });
    }
    if (!pv.gt_tests.empty()) {
        out.metrics["all"] = metric(pv, samples, out.ranking, ks,
                                    [&](const auto& v) { return passes_category(pv.gt_tests, v, std::nullopt); });
    }
    return out;
}

PassKReport aggregate_pass_k(std::vector<ProblemPassK> problems, std::vector<int> ks) {
    PassKReport report;
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    report.ks = ks;
    std::map<std::string, std::map<int, std::pair<double, double>>> sums;
    for (const auto& p : problems) {
        for (const auto& [key, m] : p.metrics) {
            auto& agg = report.aggregates[key];
            for (const auto& [k, v] : m.unfiltered) {
                sums[key][k].first += v;
                sums[key][k].second += m.filtered.at(k);
                ++agg.problems[k];
            }
        }
    }
    for (auto& [key, agg] : report.aggregates) {
        for (const auto& [k, count] : agg.problems) {
            agg.unfiltered[k] = sums[key][k].first / count;
            agg.filtered[k] = sums[key][k].second / count;
        }
    }
    report.problems = std::move(problems);
    return report;
}

}  // namespace nfrbench
