#include "nfrbench/orchestrator.hpp"

#include <atomic>
#include <map>
#include <thread>

#include "nfrbench/parser.hpp"

namespace nfrbench {

Verdict evaluate_reliability(const std::vector<Verdict>& verdicts, std::string test_id) {
    Verdict out;
    out.test_id = std::move(test_id);
    out.status = VerdictStatus::Pass;
    for (const auto& v : verdicts) {
        if (v.status == VerdictStatus::Error) {
            out.status = VerdictStatus::Fail;
            out.message = "runtime error in " + v.test_id;
            break;
        }
    }
    return out;
}

std::vector<Verdict> run_candidate(Runner& runner, const CodeCandidate& candidate,
                                   const std::vector<GeneratedTest>& tests, const ResourceLimits& limits,
                                   ProblemMode mode) {
    if (tests.empty()) throw std::invalid_argument("run_candidate needs at least one test");

    RunnerRequest req;
    req.id = candidate.task_id + "#" + std::to_string(candidate.sample_index);
    req.mode = mode;
    req.source = candidate.source;
    req.limits = limits;
    for (const auto& t : tests) {
        switch (t.kind()) {
            case TestKind::Assertion: {
                GeneratedTest sent = t;
                sent.payload = AssertionPayload{substitute_candidate(t, candidate)};
                req.tests.push_back(std::move(sent));
                break;
            }
            case TestKind::Stdio:
                req.tests.push_back(t);
                break;
            case TestKind::CcThreshold:
                req.want_cc = true;
                break;
            case TestKind::ReliabilityMarker:
                break;
        }
    }

    RunnerResponse res;
    if (!req.tests.empty() || req.want_cc) {
        res = runner.execute(req);
        if (res.id != req.id) throw RunnerUnavailable("runner answered '" + res.id + "' to '" + req.id + "'");
    }

    std::map<std::string, Verdict> executed;
    for (auto& v : res.verdicts) {
        const std::string id = v.test_id;
        if (!executed.emplace(id, std::move(v)).second) {
            throw RunnerUnavailable("runner reported test " + id + " twice");
        }
    }
    if (executed.size() != req.tests.size()) {
        throw RunnerUnavailable("runner returned " + std::to_string(executed.size()) + " verdicts for " +
                                std::to_string(req.tests.size()) + " tests" +
                                (res.runner_error ? ": " + *res.runner_error : std::string()));
    }

    std::vector<Verdict> out(tests.size());
    std::vector<std::size_t> markers;
    for (std::size_t i = 0; i < tests.size(); ++i) {
        const GeneratedTest& t = tests[i];
        if (t.kind() == TestKind::ReliabilityMarker) {
            markers.push_back(i);
            continue;
        }
        if (t.kind() == TestKind::CcThreshold) {
            const int limit = std::get<CcThresholdPayload>(t.payload).cc_limit;
            Verdict v;
            v.test_id = t.test_id;
            if (res.cc_total) {
                v.status = *res.cc_total <= limit ? VerdictStatus::Pass : VerdictStatus::Fail;
                v.message = "cc_total=" + std::to_string(*res.cc_total) + " limit=" + std::to_string(limit);
            } else {
                v.status = VerdictStatus::Error;
                v.message = res.runner_error.value_or("complexity unavailable");
            }
            out[i] = std::move(v);
            continue;
        }
        auto it = executed.find(t.test_id);
        if (it == executed.end()) throw RunnerUnavailable("runner skipped test " + t.test_id);
        out[i] = it->second;
    }

    if (!markers.empty()) {
        std::vector<Verdict> others;
        for (std::size_t i = 0; i < tests.size(); ++i) {
            if (tests[i].kind() != TestKind::ReliabilityMarker) others.push_back(out[i]);
        }
        for (std::size_t i : markers) out[i] = evaluate_reliability(others, tests[i].test_id);
    }
    return out;
}

VerdictMatrix run_matrix(Runner& runner, const std::vector<CodeCandidate>& pool,
                         const std::vector<GeneratedTest>& tests, const ResourceLimits& limits,
                         ProblemMode mode, int parallelism) {
    if (parallelism < 1) throw std::invalid_argument("parallelism must be >= 1");
    VerdictMatrix m;
    m.rows.resize(pool.size());
    if (pool.empty()) return m;

    auto run_row = [&](std::size_t i) {
        VerdictRow& row = m.rows[i];
        row.sample_index = pool[i].sample_index;
        if (tests.empty()) return;
        try {
            row.verdicts = run_candidate(runner, pool[i], tests, limits, mode);
        } catch (const RunnerUnavailable& e) {
            row.verdicts.clear();
            row.infrastructure_error = e.what();
        }
    };

    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(parallelism), pool.size());
    if (workers == 1) {
        for (std::size_t i = 0; i < pool.size(); ++i) run_row(i);
        return m;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < pool.size();) run_row(i);
        });
    }
    for (auto& t : threads) t.join();
    return m;
}

}  // namespace nfrbench
