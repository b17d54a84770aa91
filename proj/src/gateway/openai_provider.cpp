#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <algorithm>
#include <cstdlib>
#include <nlohmann/json.hpp>

#include "nfrbench/gateway.hpp"

namespace nfrbench {

namespace {

using nlohmann::json;

class HttplibTransport : public HttpTransport {
public:
    HttplibTransport(const std::string& origin, std::chrono::seconds timeout) : client_(origin) {
        client_.set_connection_timeout(timeout);
        client_.set_read_timeout(timeout);
        client_.set_write_timeout(timeout);
    }

    HttpResponse post_json(const std::string& path, const std::string& body,
                           const std::map<std::string, std::string>& headers) override {
        httplib::Headers h;
        for (const auto& [k, v] : headers) h.emplace(k, v);
        std::lock_guard lock(mu_);
        auto res = client_.Post(path, h, body, "application/json");
        if (!res) return HttpResponse{0, {}, httplib::to_string(res.error())};
        return HttpResponse{res->status, res->body, {}};
    }

private:
    std::mutex mu_;
    httplib::Client client_;
};

// Splits "https://host:port/v1" into origin and path prefix.
std::pair<std::string, std::string> split_base_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_start = url.find('/', host_start);
    if (path_start == std::string::npos) return {url, ""};
    std::string prefix = url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {url.substr(0, path_start), prefix};
}

const char* env_or_null(const char* a, const char* b) {
    if (const char* v = std::getenv(a); v && *v) return v;
    if (const char* v = std::getenv(b); v && *v) return v;
    return nullptr;
}

}  // namespace

std::unique_ptr<HttpTransport> make_http_transport(const std::string& origin, std::chrono::seconds timeout) {
    return std::make_unique<HttplibTransport>(origin, timeout);
}

OpenAIOptions OpenAIOptions::from_env(OpenAIOptions defaults) {
    if (const char* key = env_or_null("NFRBENCH_API_KEY", "OPENAI_API_KEY")) defaults.api_key = key;
    if (const char* url = env_or_null("NFRBENCH_BASE_URL", "OPENAI_BASE_URL")) defaults.base_url = url;
    return defaults;
}

OpenAIOptions OpenAIOptions::from_env() { return from_env(OpenAIOptions{}); }

OpenAIProvider::OpenAIProvider(OpenAIOptions options, std::unique_ptr<HttpTransport> transport)
    : options_(std::move(options)), transport_(std::move(transport)) {
    auto [origin, prefix] = split_base_url(options_.base_url);
    path_prefix_ = prefix;
    if (!transport_) transport_ = make_http_transport(origin, options_.timeout);
}

std::string OpenAIProvider::request_body(const CompletionRequest& req, const ProviderCall& call) const {
    json body = {{"model", options_.model},
                 {"messages", json::array({{{"role", "user"}, {"content", req.prompt}}})},
                 {"n", call.n},
                 {"temperature", call.temperature},
                 {"top_p", call.top_p},
                 {"max_tokens", call.max_tokens}};
    if (!call.stop.empty()) body["stop"] = call.stop;
    return body.dump();
}

std::vector<Completion> OpenAIProvider::generate(const CompletionRequest& req, const ProviderCall& call) {
    std::map<std::string, std::string> headers;
    if (!options_.api_key.empty()) headers["Authorization"] = "Bearer " + options_.api_key;

    const auto started = std::chrono::steady_clock::now();
    HttpResponse res = transport_->post_json(path_prefix_ + "/chat/completions", request_body(req, call), headers);
    const auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started)
                             .count();

    if (res.status == 0) throw TransientError("transport failure: " + res.error);
    if (res.status == 408 || res.status == 429 || res.status >= 500) {
        throw TransientError("HTTP " + std::to_string(res.status) + ": " + res.body.substr(0, 512));
    }
    if (res.status >= 400) {
        throw InvalidRequest("HTTP " + std::to_string(res.status) + ": " + res.body.substr(0, 512));
    }

    json doc = json::parse(res.body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("choices") || !doc["choices"].is_array()) {
        throw TransientError("malformed completion response");
    }

    std::optional<TokenUsage> usage;
    if (doc.contains("usage") && doc["usage"].is_object()) {
        const auto& u = doc["usage"];
        usage = TokenUsage{u.value("prompt_tokens", std::int64_t{0}), u.value("completion_tokens", std::int64_t{0})};
    }

    std::vector<std::pair<int, std::string>> choices;
    for (const auto& ch : doc["choices"]) {
        const int index = ch.value("index", static_cast<int>(choices.size()));
        std::string content;
        if (ch.contains("message") && ch["message"].contains("content") && ch["message"]["content"].is_string()) {
            content = ch["message"]["content"].get<std::string>();
        } else if (ch.contains("text") && ch["text"].is_string()) {
            content = ch["text"].get<std::string>();
        }
        choices.emplace_back(index, std::move(content));
    }
    std::stable_sort(choices.begin(), choices.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<Completion> out;
    for (std::size_t i = 0; i < choices.size() && static_cast<int>(i) < call.n; ++i) {
        Completion c;
        c.text = std::move(choices[i].second);
        c.sample_index = call.first_index + static_cast<int>(i);
        c.provider = id();
        c.latency_ms = latency;
        // Usage is reported per request; attribute it to the first choice.
        if (i == 0) c.usage = usage;
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace nfrbench
