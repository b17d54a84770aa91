#include <cstdio>
#include <fstream>

#include "nfrbench/harness.hpp"

namespace nfrbench {

using nlohmann::json;

namespace {

struct ScoredProblems {
    std::vector<ProblemPassK> evaluated;
    std::vector<const ProblemRecord*> records;
};

ScoredProblems evaluate_all(const RunRecord& record) {
    ScoredProblems out;
    for (const auto& p : record.problems) {
        if (auto pv = problem_verdicts(p)) {
            out.evaluated.push_back(evaluate_problem(*pv, record.ks, record.weights));
            out.records.push_back(&p);
        }
    }
    return out;
}

template <class V>
json by_k(const std::map<int, V>& m) {
    json j = json::object();
    for (const auto& [k, v] : m) j[std::to_string(k)] = v;
    return j;
}

std::string pct(const std::map<int, double>& m, int k) {
    auto it = m.find(k);
    if (it == m.end()) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", it->second * 100.0);
    return buf;
}

std::string pad(std::string s, std::size_t width, bool left = true) {
    if (s.size() >= width) return s;
    return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

constexpr const char* kAllNote = "'all' requires passing every ground-truth test of every category, functional tests included";

}  // namespace

PassKReport compute_report(const RunRecord& record) {
    return aggregate_pass_k(evaluate_all(record).evaluated, record.ks);
}

json report_json(const RunRecord& record) {
    const ScoredProblems scored = evaluate_all(record);
    const PassKReport report = aggregate_pass_k(scored.evaluated, record.ks);

    json skipped = json::array();
    std::size_t not_executed = 0;
    for (const auto& p : record.problems) {
        if (p.skipped) {
            skipped.push_back({{"task_id", p.task_id}, {"reason", *p.skipped}});
        } else if (!problem_verdicts(p)) {
            ++not_executed;
        }
    }

    std::vector<std::size_t> test_counts;
    std::map<std::string, double> by_category;
    for (const ProblemRecord* p : scored.records) {
        test_counts.push_back(p->generated_tests.size());
        for (const auto& t : p->generated_tests) by_category[std::string(to_string(t.category))] += 1.0;
    }
    json avg = nullptr;
    if (!test_counts.empty()) {
        avg = count_generated_tests(test_counts);
        for (auto& [_, v] : by_category) v /= static_cast<double>(test_counts.size());
    }

    json metrics = json::object();
    for (const auto& [key, agg] : report.aggregates) {
        metrics[key] = {{"unfiltered", by_k(agg.unfiltered)},
                        {"filtered", by_k(agg.filtered)},
                        {"problems", by_k(agg.problems)}};
    }

    json per_problem = json::array();
    for (const auto& pk : report.problems) {
        json m = json::object();
        for (const auto& [key, r] : pk.metrics) {
            m[key] = {{"c", r.c}, {"unfiltered", by_k(r.unfiltered)}, {"filtered", by_k(r.filtered)}};
        }
        per_problem.push_back({{"task_id", pk.task_id},
                               {"n", pk.n},
                               {"c_gt", pk.c_gt},
                               {"ranking", pk.ranking},
                               {"metrics", m},
                               {"missing_categories", pk.missing_categories}});
    }

    json weights = {{"normalization", std::string(to_string(record.weights.normalization))}};
    for (Category c : kAllCategories) weights[std::string(to_string(c))] = record.weights.weight(c);

    return {{"format", "nfrbench-report/1"},
            {"problems",
             {{"total", record.problems.size()},
              {"scored", scored.evaluated.size()},
              {"skipped", skipped.size()},
              {"not_executed", not_executed}}},
            {"skipped", skipped},
            {"k", report.ks},
            {"weights", weights},
            {"aborted_rows", record.aborted_rows()},
            {"avg_generated_tests_per_problem", avg},
            {"generated_tests_per_category", by_category},
            {"metrics", metrics},
            {"per_problem", per_problem},
            {"notes", json::array({kAllNote})}};
}

std::string report_text(const RunRecord& record) {
    const ScoredProblems scored = evaluate_all(record);
    const PassKReport report = aggregate_pass_k(scored.evaluated, record.ks);
    std::string out = "nfrbench report\n";
    out += "problems: " + std::to_string(record.problems.size()) + " total, " +
           std::to_string(scored.evaluated.size()) + " scored, " + std::to_string(record.skipped_count()) +
           " skipped\n";
    if (record.aborted_rows() > 0) {
        out += "aborted rows (runner failures, excluded): " + std::to_string(record.aborted_rows()) + "\n";
    }
    if (scored.evaluated.empty()) {
        out += "\n=== 0 problems scored: no Pass@k to report ===\n";
        return out;
    }

    constexpr std::size_t kLabel = 28;
    constexpr std::size_t kCol = 9;
    auto header = [&](const std::string& title) {
        std::string h = pad(title, kLabel);
        for (int k : report.ks) h += pad("k=" + std::to_string(k), kCol, false);
        return h + "\n";
    };
    auto row = [&](const std::string& label, const std::map<int, double>& m) {
        std::string r = pad("  " + label, kLabel);
        for (int k : report.ks) r += pad(pct(m, k), kCol, false);
        return r + "\n";
    };
    auto metric_rows = [&](const std::string& key, const std::string& label) {
        auto it = report.aggregates.find(key);
        if (it == report.aggregates.end()) return pad("  " + label, kLabel) + "n/a (no ground-truth tests)\n";
        return row(label, it->second.unfiltered) + row(label + " (filtered)", it->second.filtered);
    };

    out += "\n" + header("Pass@k (%)");
    out += metric_rows("fr", "Functional");
    out += "\n" + header("Per category (%)");
    out += metric_rows("all", "All");
    for (Category c : kNfrCategories) out += metric_rows(std::string(to_string(c)), std::string(display_name(c)));

    std::vector<std::size_t> counts;
    for (const ProblemRecord* p : scored.records) counts.push_back(p->generated_tests.size());
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", count_generated_tests(counts));
    out += "\naverage generated tests per problem: " + std::string(buf) + "\n";
    out += std::string("note: ") + kAllNote + "\n";
    return out;
}

void emit_report(const RunRecord& record, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "report.json", std::ios::binary | std::ios::trunc);
        out << report_json(record).dump(2, ' ', false, json::error_handler_t::replace) << '\n';
        if (!out) throw std::runtime_error("cannot write " + (dir / "report.json").string());
    }
    std::ofstream out(dir / "report.txt", std::ios::binary | std::ios::trunc);
    out << report_text(record);
    if (!out) throw std::runtime_error("cannot write " + (dir / "report.txt").string());
}

}  // namespace nfrbench
