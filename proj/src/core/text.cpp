#include "nfrbench/text.hpp"

#include <algorithm>
#include <cctype>

namespace nfrbench::text {

namespace {
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
}  // namespace

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    return rtrim(s);
}

std::string_view rtrim(std::string_view s) {
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string collapse_spaces(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool prev_space = false;
    for (char c : s) {
        if (is_space(c)) {
            if (!prev_space) out.push_back(' ');
            prev_space = true;
        } else {
            out.push_back(c);
            prev_space = false;
        }
    }
    return out;
}

std::vector<std::string> split_lines(std::string_view s) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < s.size()) {
        auto end = s.find('\n', start);
        if (end == std::string_view::npos) end = s.size();
        auto line = s.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.emplace_back(line);
        start = end + 1;
    }
    return lines;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out.append(sep);
        out.append(parts[i]);
    }
    return out;
}

int heading_depth(std::string_view line) {
    auto t = trim(line);
    int depth = 0;
    while (depth < static_cast<int>(t.size()) && t[static_cast<std::size_t>(depth)] == '#') ++depth;
    if (depth == 0) return 0;
    if (static_cast<std::size_t>(depth) < t.size() && !is_space(t[static_cast<std::size_t>(depth)])) {
        return 0;
    }
    return depth;
}

std::string_view strip_heading_marks(std::string_view line) {
    auto t = trim(line);
    while (!t.empty() && t.front() == '#') t.remove_prefix(1);
    return trim(t);
}

std::string replace_all(std::string_view s, std::string_view from, std::string_view to) {
    std::string out;
    if (from.empty()) return std::string(s);
    std::size_t pos = 0;
    while (true) {
        auto hit = s.find(from, pos);
        if (hit == std::string_view::npos) break;
        out.append(s.substr(pos, hit - pos));
        out.append(to);
        pos = hit + from.size();
    }
    out.append(s.substr(pos));
    return out;
}

std::string normalize_output(std::string_view s) {
    auto lines = split_lines(s);
    for (auto& l : lines) l = std::string(rtrim(l));
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return join(lines, "\n");
}

}  // namespace nfrbench::text
