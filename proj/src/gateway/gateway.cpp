#include "nfrbench/gateway.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>
#include <thread>

#include "nfrbench/hash.hpp"

namespace nfrbench {

std::string_view to_string(SamplingStrategy s) { return s == SamplingStrategy::Greedy ? "greedy" : "nucleus"; }

SamplingStrategy strategy_from_string(std::string_view s) {
    if (s == "greedy") return SamplingStrategy::Greedy;
    if (s == "nucleus") return SamplingStrategy::Nucleus;
    throw std::invalid_argument("unknown sampling strategy: '" + std::string(s) + "'");
}

double SamplingConfig::effective_temperature() const {
    return strategy == SamplingStrategy::Greedy ? 0.0 : temperature;
}

int SamplingConfig::per_call_n() const { return strategy == SamplingStrategy::Greedy ? 1 : n; }

void SamplingConfig::validate() const {
    if (n < 1) throw std::invalid_argument("sampling n must be >= 1");
    if (temperature < 0.0) throw std::invalid_argument("temperature must be >= 0");
    if (!(top_p > 0.0 && top_p <= 1.0)) throw std::invalid_argument("top_p must be in (0, 1]");
    if (max_tokens < 1) throw std::invalid_argument("max_tokens must be >= 1");
}

std::string SamplingConfig::hash() const {
    nlohmann::json j = {{"n", n},
                        {"temperature", effective_temperature()},
                        {"top_p", top_p},
                        {"max_tokens", max_tokens},
                        {"stop", stop},
                        {"strategy", std::string(to_string(strategy))}};
    return sha256_hex(j.dump()).substr(0, 16);
}

SamplingConfig SamplingConfig::greedy(int n) {
    SamplingConfig c;
    c.n = n;
    c.temperature = 0.0;
    c.strategy = SamplingStrategy::Greedy;
    return c;
}

void Semaphore::acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return permits_ > 0; });
    --permits_;
}

void Semaphore::release() {
    {
        std::lock_guard lock(mu_);
        ++permits_;
    }
    cv_.notify_one();
}

RateLimiter::RateLimiter(double requests_per_second) {
    if (requests_per_second > 0.0) {
        interval_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
            std::chrono::duration<double>(1.0 / requests_per_second));
    }
}

void RateLimiter::acquire() {
    if (interval_ == std::chrono::steady_clock::duration::zero()) return;
    std::chrono::steady_clock::time_point slot;
    {
        std::lock_guard lock(mu_);
        auto now = std::chrono::steady_clock::now();
        slot = std::max(now, next_);
        next_ = slot + interval_;
    }
    std::this_thread::sleep_until(slot);
}

Gateway::Gateway(std::shared_ptr<CompletionProvider> provider, GatewayOptions options)
    : provider_(std::move(provider)),
      options_(options),
      fan_out_(std::max(1, options.fan_out)),
      limiter_(options.requests_per_second) {
    if (!provider_) throw std::invalid_argument("gateway needs a provider");
}

GatewayStats Gateway::stats() const {
    std::lock_guard lock(mu_);
    return stats_;
}

void Gateway::reserve_budget(const ProviderCall& call) {
    std::lock_guard lock(mu_);
    if (options_.call_budget && stats_.calls + 1 > *options_.call_budget) {
        throw BudgetExceeded("call budget of " + std::to_string(*options_.call_budget) + " exhausted");
    }
    // Worst case: every completion uses its full max_tokens allowance.
    const std::int64_t projected = stats_.tokens + std::int64_t{call.n} * call.max_tokens;
    if (options_.token_budget && projected > *options_.token_budget) {
        throw BudgetExceeded("token budget of " + std::to_string(*options_.token_budget) +
                             " would be exceeded (projected " + std::to_string(projected) + ")");
    }
    ++stats_.calls;
}

void Gateway::account(const std::vector<Completion>& got) {
    std::int64_t tokens = 0;
    for (const auto& c : got) {
        if (c.usage) {
            tokens += c.usage->prompt_tokens + c.usage->completion_tokens;
        } else {
            tokens += static_cast<std::int64_t>(c.text.size() / 4 + 1);
        }
    }
    std::lock_guard lock(mu_);
    stats_.tokens += tokens;
}

std::vector<Completion> Gateway::call_with_retry(const CompletionRequest& req, const ProviderCall& call) {
    for (int attempt = 0;; ++attempt) {
        reserve_budget(call);
        try {
            fan_out_.acquire();
            struct Release {
                Semaphore& s;
                ~Release() { s.release(); }
            } release{fan_out_};
            limiter_.acquire();
            auto got = provider_->generate(req, call);
            account(got);
            return got;
        } catch (const TransientError& e) {
            if (attempt >= options_.retry_cap) {
                throw ProviderUnavailable("provider " + provider_->id() + " unavailable after " +
                                          std::to_string(attempt + 1) + " attempts: " + e.what());
            }
            {
                std::lock_guard lock(mu_);
                ++stats_.retries;
            }
            std::this_thread::sleep_for(options_.base_backoff * (1LL << std::min(attempt, 16)));
        }
    }
}

std::vector<Completion> Gateway::complete(const CompletionRequest& req, const SamplingConfig& cfg) {
    if (req.prompt.empty()) throw InvalidRequest("prompt must be non-empty");
    cfg.validate();

    std::vector<Completion> out;
    out.reserve(static_cast<std::size_t>(cfg.n));
    // Some endpoints honour n only partially; top up until n arrived.
    int stalls = 0;
    while (static_cast<int>(out.size()) < cfg.n) {
        ProviderCall call;
        call.first_index = static_cast<int>(out.size());
        call.n = std::min(cfg.per_call_n(), cfg.n - call.first_index);
        call.temperature = cfg.effective_temperature();
        call.top_p = cfg.top_p;
        call.max_tokens = cfg.max_tokens;
        call.stop = cfg.stop;

        auto got = call_with_retry(req, call);
        if (got.empty()) {
            if (++stalls > options_.retry_cap) {
                throw ProviderUnavailable("provider " + provider_->id() + " returned no completions");
            }
            continue;
        }
        stalls = 0;
        for (auto& c : got) {
            if (static_cast<int>(out.size()) >= cfg.n) break;
            c.sample_index = static_cast<int>(out.size());
            out.push_back(std::move(c));
        }
    }
    return out;
}

double count_generated_tests(std::span<const std::size_t> per_problem_counts) {
    if (per_problem_counts.empty()) throw EmptyRun();
    const double total = std::accumulate(per_problem_counts.begin(), per_problem_counts.end(), 0.0);
    return total / static_cast<double>(per_problem_counts.size());
}

}  // namespace nfrbench
