#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "nfrbench/prompt.hpp"

namespace nfrbench {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class GatewayError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Transport or server failure that may succeed on retry. Providers throw
/// it; the gateway converts exhaustion into ProviderUnavailable.
class TransientError : public GatewayError {
public:
    using GatewayError::GatewayError;
};

class ProviderUnavailable : public GatewayError {
public:
    using GatewayError::GatewayError;
};

class InvalidRequest : public GatewayError {
public:
    using GatewayError::GatewayError;
};

class BudgetExceeded : public GatewayError {
public:
    using GatewayError::GatewayError;
};

class MissingFixture : public GatewayError {
public:
    explicit MissingFixture(const std::string& key)
        : GatewayError("missing mock fixture: " + key), key_(key) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class EmptyRun : public std::invalid_argument {
public:
    EmptyRun() : std::invalid_argument("run record has no problems") {}
};

// ---------------------------------------------------------------------------
// Requests and completions
// ---------------------------------------------------------------------------

enum class SamplingStrategy { Nucleus, Greedy };

std::string_view to_string(SamplingStrategy s);
SamplingStrategy strategy_from_string(std::string_view s);

struct SamplingConfig {
    int n = 10;
    double temperature = 0.8;
    double top_p = 0.95;
    int max_tokens = 2048;
    std::vector<std::string> stop;
    SamplingStrategy strategy = SamplingStrategy::Nucleus;

    /// Temperature actually sent: 0 for greedy decoding.
    double effective_temperature() const;
    /// Completions requested per provider call.
    int per_call_n() const;
    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
    /// Short stable digest of the fields above.
    std::string hash() const;

    static SamplingConfig greedy(int n = 1);
    bool operator==(const SamplingConfig&) const = default;
};

struct TokenUsage {
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    bool operator==(const TokenUsage&) const = default;
};

struct Completion {
    std::string text;
    int sample_index = 0;
    std::string provider;
    std::optional<TokenUsage> usage;
    std::int64_t latency_ms = 0;
    bool operator==(const Completion&) const = default;
};

/// The prompt plus the key identifying which generation it belongs to.
struct CompletionRequest {
    std::string prompt;
    std::string task_id;
    Stage stage = Stage::Requirements;
};

/// One provider round-trip as issued by the gateway.
struct ProviderCall {
    int n = 1;
    int first_index = 0;
    double temperature = 0.0;
    double top_p = 1.0;
    int max_tokens = 0;
    std::vector<std::string> stop;
};

class CompletionProvider {
public:
    virtual ~CompletionProvider() = default;
    virtual std::string id() const = 0;
    /// Returns up to `call.n` completions, indexed from call.first_index.
    /// Throws TransientError for retryable failures, InvalidRequest for
    /// rejected requests.
    virtual std::vector<Completion> generate(const CompletionRequest& req, const ProviderCall& call) = 0;
};

// ---------------------------------------------------------------------------
// Mock provider
// ---------------------------------------------------------------------------

/// File-name safe form of a task id ("HumanEval/51" -> "HumanEval_51").
std::string fixture_stem(std::string_view task_id);
/// "<stem>.<stage>.<index>.txt"
std::string fixture_file_name(std::string_view task_id, Stage stage, int index);

/// Deterministic provider answering from fixtures keyed by
/// (task_id, stage, sample_index).
class MockProvider : public CompletionProvider {
public:
    using Key = std::tuple<std::string, Stage, int>;

    explicit MockProvider(std::map<Key, std::string> fixtures, std::string id = "mock");
    /// Loads every `<stem>.<stage>.<index>.txt` file in `dir`. Keys use the
    /// file stem as task id, so lookups go through fixture_stem().
    static std::shared_ptr<MockProvider> from_directory(const std::filesystem::path& dir);

    std::string id() const override { return id_; }
    std::vector<Completion> generate(const CompletionRequest& req, const ProviderCall& call) override;

    std::size_t call_count() const;
    std::vector<ProviderCall> calls() const;

private:
    std::map<Key, std::string> fixtures_;
    std::string id_;
    mutable std::mutex mu_;
    std::vector<ProviderCall> calls_;
};

// ---------------------------------------------------------------------------
// OpenAI-compatible provider
// ---------------------------------------------------------------------------

struct HttpResponse {
    int status = 0;  // 0: transport failure
    std::string body;
    std::string error;
};

class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse post_json(const std::string& path, const std::string& body,
                                   const std::map<std::string, std::string>& headers) = 0;
};

/// cpp-httplib transport for "http(s)://host[:port]" origins.
std::unique_ptr<HttpTransport> make_http_transport(const std::string& origin,
                                                   std::chrono::seconds timeout);

struct OpenAIOptions {
    std::string base_url = "https://api.openai.com/v1";
    std::string api_key;
    std::string model = "gpt-3.5-turbo-16k";
    std::chrono::seconds timeout{120};

    /// Reads NFRBENCH_API_KEY / OPENAI_API_KEY and NFRBENCH_BASE_URL /
    /// OPENAI_BASE_URL over the given defaults.
    static OpenAIOptions from_env(OpenAIOptions defaults);
    static OpenAIOptions from_env();
};

/// Chat-completions client. Every request carries n, temperature, top_p,
/// max_tokens (and stop when set) explicitly.
class OpenAIProvider : public CompletionProvider {
public:
    explicit OpenAIProvider(OpenAIOptions options, std::unique_ptr<HttpTransport> transport = nullptr);

    std::string id() const override { return "openai:" + options_.model; }
    std::vector<Completion> generate(const CompletionRequest& req, const ProviderCall& call) override;

    /// Request body for a call; exposed for tests.
    std::string request_body(const CompletionRequest& req, const ProviderCall& call) const;

private:
    OpenAIOptions options_;
    std::string path_prefix_;
    std::unique_ptr<HttpTransport> transport_;
};

// ---------------------------------------------------------------------------
// Gateway
// ---------------------------------------------------------------------------

/// Runtime-sized counting semaphore.
class Semaphore {
public:
    explicit Semaphore(int permits) : permits_(permits) {}
    void acquire();
    void release();

private:
    std::mutex mu_;
    std::condition_variable cv_;
    int permits_;
};

/// Spaces request starts at least 1/rate seconds apart.
class RateLimiter {
public:
    explicit RateLimiter(double requests_per_second);
    void acquire();

private:
    std::mutex mu_;
    std::chrono::steady_clock::duration interval_{};
    std::chrono::steady_clock::time_point next_{};
};

struct GatewayOptions {
    int retry_cap = 3;
    std::chrono::milliseconds base_backoff{500};
    int fan_out = 4;
    double requests_per_second = 0.0;  // 0: unlimited
    std::optional<std::int64_t> call_budget;
    std::optional<std::int64_t> token_budget;
};

struct GatewayStats {
    std::int64_t calls = 0;
    std::int64_t retries = 0;
    std::int64_t tokens = 0;
};

class Gateway {
public:
    Gateway(std::shared_ptr<CompletionProvider> provider, GatewayOptions options = {});

    /// Exactly cfg.n completions ordered by sample_index, or an exception.
    std::vector<Completion> complete(const CompletionRequest& req, const SamplingConfig& cfg);

    const CompletionProvider& provider() const { return *provider_; }
    GatewayStats stats() const;

private:
    std::vector<Completion> call_with_retry(const CompletionRequest& req, const ProviderCall& call);
    void reserve_budget(const ProviderCall& call);
    void account(const std::vector<Completion>& got);

    std::shared_ptr<CompletionProvider> provider_;
    GatewayOptions options_;
    Semaphore fan_out_;
    RateLimiter limiter_;
    mutable std::mutex mu_;
    GatewayStats stats_;
};

/// Mean generated tests per problem.
double count_generated_tests(std::span<const std::size_t> per_problem_counts);

}  // namespace nfrbench
