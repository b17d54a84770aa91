#include "nfrbench/parser.hpp"
#include "nfrbench/text.hpp"

namespace nfrbench {

namespace {

enum class Enclosure { None, TripleDouble, TripleSingle, Double, Single };

Enclosure enclosure_before(std::string_view code, std::size_t pos) {
    auto before = code.substr(0, pos);
    if (before.ends_with("\"\"\"")) return Enclosure::TripleDouble;
    if (before.ends_with("'''")) return Enclosure::TripleSingle;
    if (before.ends_with("\"")) return Enclosure::Double;
    if (before.ends_with("'")) return Enclosure::Single;
    return Enclosure::None;
}

// Escapes `source` so the enclosing literal evaluates to it exactly.
std::string escape_for(Enclosure e, std::string_view source) {
    if (e == Enclosure::None) return std::string(source);
    const char quote = (e == Enclosure::TripleDouble || e == Enclosure::Double) ? '"' : '\'';
    const bool single_line = (e == Enclosure::Double || e == Enclosure::Single);
    std::string out;
    out.reserve(source.size() + 16);
    for (char c : source) {
        if (c == '\\') {
            out += "\\\\";
        } else if (c == quote) {
            out += '\\';
            out += c;
        } else if (c == '\n' && single_line) {
            out += "\\n";
        } else if (c == '\r') {
            // Python folds raw CR line endings even inside triple quotes.
            out += "\\r";
        } else {
            out += c;
        }
    }
    return out;
}

}  // namespace

std::string substitute_candidate(const GeneratedTest& test, const CodeCandidate& candidate) {
    const auto* a = std::get_if<AssertionPayload>(&test.payload);
    if (!a) return {};
    const std::string& code = a->assertion_code;

    std::string out;
    std::size_t pos = 0;
    for (;;) {
        auto hit = code.find(kGeneratedCodePlaceholder, pos);
        if (hit == std::string::npos) break;
        out.append(code, pos, hit - pos);
        out += escape_for(enclosure_before(code, hit), candidate.source);
        pos = hit + kGeneratedCodePlaceholder.size();
    }
    out.append(code, pos, std::string::npos);
    return out;
}

}  // namespace nfrbench
