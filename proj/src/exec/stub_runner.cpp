#include <algorithm>
#include <cmath>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "nfrbench/orchestrator.hpp"
#include "nfrbench/text.hpp"

namespace nfrbench {

namespace {

struct Directives {
    std::map<std::string, std::set<std::string>> by_kind;  // fail / error / timeout
    std::optional<int> cc = 1;
};

Directives read_directives(const std::string& source) {
    static const std::regex kLine(R"(^\s*#\s*stub-(fail|error|timeout|cc)\s*:\s*(.*)$)");
    Directives d;
    for (const auto& line : text::split_lines(source)) {
        std::smatch m;
        if (!std::regex_match(line, m, kLine)) continue;
        const std::string kind = m[1];
        const std::string rest(text::trim(m[2].str()));
        if (kind == "cc") {
            if (rest == "none") {
                d.cc.reset();
            } else {
                try {
                    d.cc = std::max(1, std::stoi(rest));
                } catch (const std::exception&) {
                    // Malformed directive: keep the default.
                }
            }
            continue;
        }
        std::istringstream ss(rest);
        for (std::string token; ss >> token;) d.by_kind[kind].insert(token);
    }
    return d;
}

bool listed(const Directives& d, const char* kind, const std::string& test_id) {
    auto it = d.by_kind.find(kind);
    return it != d.by_kind.end() && (it->second.count(test_id) || it->second.count("*"));
}

}  // namespace

RunnerResponse stub_execute(const RunnerRequest& req) {
    const Directives d = read_directives(req.source);
    RunnerResponse res;
    res.id = req.id;
    for (const auto& t : req.tests) {
        Verdict v;
        v.test_id = t.test_id;
        v.wall_ms = 1;
        if (listed(d, "timeout", t.test_id)) {
            v.status = VerdictStatus::Timeout;
            v.wall_ms = static_cast<std::int64_t>(std::llround(req.limits.timeout_s * 1000.0));
            v.message = "timeout";
        } else if (listed(d, "error", t.test_id)) {
            v.status = VerdictStatus::Error;
            v.message = "RuntimeError: stub";
        } else if (listed(d, "fail", t.test_id)) {
            v.status = VerdictStatus::Fail;
            v.message = "AssertionError";
        } else {
            v.status = VerdictStatus::Pass;
        }
        res.verdicts.push_back(std::move(v));
    }
    if (req.want_cc) {
        res.cc_total = d.cc;
        if (!d.cc) res.runner_error = "SyntaxError: stub";
    }
    return res;
}

}  // namespace nfrbench
