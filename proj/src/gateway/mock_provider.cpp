#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "nfrbench/gateway.hpp"

namespace nfrbench {

std::string fixture_stem(std::string_view task_id) {
    std::string out;
    out.reserve(task_id.size());
    for (char c : task_id) {
        const bool safe = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
        out.push_back(safe ? c : '_');
    }
    return out;
}

std::string fixture_file_name(std::string_view task_id, Stage stage, int index) {
    return fixture_stem(task_id) + "." + std::string(to_string(stage)) + "." + std::to_string(index) + ".txt";
}

MockProvider::MockProvider(std::map<Key, std::string> fixtures, std::string id) : id_(std::move(id)) {
    for (auto& [key, text] : fixtures) {
        fixtures_.emplace(Key{fixture_stem(std::get<0>(key)), std::get<1>(key), std::get<2>(key)},
                          std::move(text));
    }
}

std::shared_ptr<MockProvider> MockProvider::from_directory(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw std::runtime_error("mock fixture directory not found: " + dir.string());
    std::map<Key, std::string> fixtures;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
        // <stem>.<stage>.<index>.txt
        const std::string name = entry.path().stem().string();
        const auto dot_index = name.rfind('.');
        if (dot_index == std::string::npos || dot_index == 0) continue;
        const auto dot_stage = name.rfind('.', dot_index - 1);
        if (dot_stage == std::string::npos) continue;
        const std::string index_text = name.substr(dot_index + 1);
        const std::string stage_text = name.substr(dot_stage + 1, dot_index - dot_stage - 1);
        if (index_text.empty() ||
            !std::all_of(index_text.begin(), index_text.end(), [](unsigned char c) { return std::isdigit(c); })) {
            continue;
        }
        Stage stage;
        try {
            stage = stage_from_string(stage_text);
        } catch (const std::invalid_argument&) {
            continue;
        }
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        fixtures.emplace(Key{name.substr(0, dot_stage), stage, std::stoi(index_text)}, ss.str());
    }
    return std::make_shared<MockProvider>(std::move(fixtures));
}

std::vector<Completion> MockProvider::generate(const CompletionRequest& req, const ProviderCall& call) {
    {
        std::lock_guard lock(mu_);
        calls_.push_back(call);
    }
    std::vector<Completion> out;
    out.reserve(static_cast<std::size_t>(call.n));
    for (int i = call.first_index; i < call.first_index + call.n; ++i) {
        auto it = fixtures_.find(Key{fixture_stem(req.task_id), req.stage, i});
        if (it == fixtures_.end()) throw MissingFixture(fixture_file_name(req.task_id, req.stage, i));
        Completion c;
        c.text = it->second;
        c.sample_index = i;
        c.provider = id_;
        out.push_back(std::move(c));
    }
    return out;
}

std::size_t MockProvider::call_count() const {
    std::lock_guard lock(mu_);
    return calls_.size();
}

std::vector<ProviderCall> MockProvider::calls() const {
    std::lock_guard lock(mu_);
    return calls_;
}

}  // namespace nfrbench
