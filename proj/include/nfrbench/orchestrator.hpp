#pragma once

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nfrbench/model.hpp"

namespace nfrbench {

/// Infrastructure failure: the runner crashed, timed out past its grace
/// period or broke the protocol. Never a statement about the candidate.
class RunnerUnavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kProtocolVersion = 1;

struct RunnerRequest {
    std::string id;
    ProblemMode mode = ProblemMode::Function;
    std::string source;
    /// Assertion and stdio tests only, placeholders already substituted.
    std::vector<GeneratedTest> tests;
    ResourceLimits limits;
    bool want_cc = false;

    bool operator==(const RunnerRequest&) const = default;
};

struct RunnerResponse {
    std::string id;
    std::vector<Verdict> verdicts;
    std::optional<int> cc_total;
    std::optional<std::string> runner_error;

    bool operator==(const RunnerResponse&) const = default;
};

// Newline-delimited JSON codec. Encoded lines carry no trailing newline.
namespace wire {

std::string encode_request(const RunnerRequest& req);
RunnerRequest decode_request(std::string_view line);
std::string encode_response(const RunnerResponse& res);
RunnerResponse decode_response(std::string_view line);

/// Best-effort id extraction from a malformed request line.
std::optional<std::string> salvage_id(std::string_view line);

}  // namespace wire

class Runner {
public:
    virtual ~Runner() = default;
    /// Throws RunnerUnavailable on infrastructure failure.
    virtual RunnerResponse execute(const RunnerRequest& req) = 0;
};

/// Deterministic in-process runner. Every test passes unless the candidate
/// source carries directive comments:
///
///   # stub-fail: <test_id>...      fail the listed tests
///   # stub-error: <test_id>...     report a runtime error
///   # stub-timeout: <test_id>...   report a timeout at the limit
///   # stub-cc: <N>|none            cc_total (default 1; none = unparseable)
///
/// `*` matches every test.
RunnerResponse stub_execute(const RunnerRequest& req);

class StubRunner : public Runner {
public:
    RunnerResponse execute(const RunnerRequest& req) override { return stub_execute(req); }
};

/// Pool of runner subprocesses speaking the wire protocol over their
/// standard streams. Dead or desynchronized workers are killed and
/// respawned on next use.
class ProcessRunner : public Runner {
public:
    /// `argv` is the runner command line; the protocol flag is appended.
    ProcessRunner(std::vector<std::string> argv, int pool_size,
                  std::chrono::milliseconds grace = std::chrono::milliseconds{500});
    ~ProcessRunner() override;
    ProcessRunner(const ProcessRunner&) = delete;
    ProcessRunner& operator=(const ProcessRunner&) = delete;

    RunnerResponse execute(const RunnerRequest& req) override;

private:
    struct Worker {
        int pid = -1;
        int in_fd = -1;   // our end of the child's stdin
        int out_fd = -1;  // our end of the child's stdout
        std::string buffer;
        bool busy = false;
    };

    void spawn(Worker& w);
    void kill(Worker& w);
    std::string read_line(Worker& w, std::chrono::steady_clock::time_point deadline);

    std::vector<std::string> argv_;
    std::chrono::milliseconds grace_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::vector<Worker> workers_;
};

/// Pass iff no verdict is an error. Wrong outputs and timeouts are not
/// runtime errors.
Verdict evaluate_reliability(const std::vector<Verdict>& verdicts, std::string test_id = "reliability");

/// Verdicts for `tests`, in the same order. Assertion and stdio tests go to
/// the runner; cc_threshold tests compare the reported cc_total with their
/// limit; the reliability marker is derived from everything else.
std::vector<Verdict> run_candidate(Runner& runner, const CodeCandidate& candidate,
                                   const std::vector<GeneratedTest>& tests, const ResourceLimits& limits,
                                   ProblemMode mode);

/// One row per candidate, in pool order. A row whose runner call failed is
/// marked aborted instead of failing the whole matrix.
VerdictMatrix run_matrix(Runner& runner, const std::vector<CodeCandidate>& pool,
                         const std::vector<GeneratedTest>& tests, const ResourceLimits& limits,
                         ProblemMode mode, int parallelism);

}  // namespace nfrbench
