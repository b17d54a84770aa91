#include <regex>

#include "nfrbench/parser.hpp"
#include "nfrbench/text.hpp"

namespace nfrbench {

namespace {

bool is_fence(std::string_view line) { return text::trim(line).starts_with("```"); }

bool is_code_start(std::string_view line) {
    static const std::regex start(
        R"(^(import\s+\w|from\s+[\w.]+\s+import\s|def\s+\w|async\s+def\s+\w|class\s+\w|@\w))");
    return std::regex_search(std::string(line), start);
}

struct FenceScan {
    std::string code;
    std::size_t block_start_line = 0;  // line index of the opening fence
    bool found = false;
};

FenceScan last_fenced_block(const std::vector<std::string>& lines) {
    FenceScan result;
    bool inside = false;
    std::size_t open = 0;
    std::vector<std::string> body;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (!is_fence(lines[i])) {
            if (inside) body.push_back(lines[i]);
            continue;
        }
        if (!inside) {
            inside = true;
            open = i;
            body.clear();
        } else {
            inside = false;
            result.code = text::join(body, "\n");
            result.block_start_line = open;
            result.found = true;
        }
    }
    return result;
}

}  // namespace

ExtractedCode split_code_completion(std::string_view completion) {
    const auto lines = text::split_lines(completion);
    ExtractedCode out;

    if (auto fenced = last_fenced_block(lines); fenced.found) {
        out.code = fenced.code;
        std::vector<std::string> before(lines.begin(),
                                        lines.begin() + static_cast<long>(fenced.block_start_line));
        auto prefix = std::string(text::trim(text::join(before, "\n")));
        if (!prefix.empty()) out.reasoning = std::move(prefix);
    } else {
        std::size_t first = lines.size();
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (is_code_start(lines[i])) {
                first = i;
                break;
            }
        }
        if (first == 0 || first == lines.size()) {
            out.code = std::string(completion);
        } else {
            std::vector<std::string> tail(lines.begin() + static_cast<long>(first), lines.end());
            out.code = text::join(tail, "\n");
            if (completion.ends_with('\n')) out.code.push_back('\n');
            std::vector<std::string> head(lines.begin(), lines.begin() + static_cast<long>(first));
            auto prefix = std::string(text::trim(text::join(head, "\n")));
            if (!prefix.empty()) out.reasoning = std::move(prefix);
        }
    }

    if (text::trim(out.code).empty()) throw EmptyCode();
    return out;
}

std::string extract_code_block(std::string_view completion) {
    return split_code_completion(completion).code;
}

}  // namespace nfrbench
