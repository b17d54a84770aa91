#include <cctype>
#include <cstdio>

#include "nfrbench/parser.hpp"

namespace nfrbench::pyexpr {

namespace {

constexpr std::size_t kMaxStringBytes = std::size_t{64} << 20;

class Evaluator {
public:
    explicit Evaluator(std::string_view src) : src_(src) {}

    Value run() {
        Value v = expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected trailing input");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw EvalError(why + " at offset " + std::to_string(pos_) + " in: " + std::string(src_));
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Value expr() {
        Value lhs = term();
        while (eat('+')) {
            Value rhs = term();
            if (auto* a = std::get_if<std::string>(&lhs)) {
                auto* b = std::get_if<std::string>(&rhs);
                if (!b) fail("cannot add int to str");
                if (a->size() + b->size() > kMaxStringBytes) fail("string too large");
                *a += *b;
            } else {
                auto* b = std::get_if<long long>(&rhs);
                if (!b) fail("cannot add str to int");
                std::get<long long>(lhs) += *b;
            }
        }
        return lhs;
    }

    Value term() {
        Value lhs = factor();
        while (eat('*')) {
            Value rhs = factor();
            lhs = multiply(std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    Value multiply(Value a, Value b) {
        if (std::holds_alternative<long long>(a) && std::holds_alternative<long long>(b)) {
            return std::get<long long>(a) * std::get<long long>(b);
        }
        if (std::holds_alternative<std::string>(a) && std::holds_alternative<std::string>(b)) {
            fail("cannot multiply str by str");
        }
        const std::string& s = std::holds_alternative<std::string>(a) ? std::get<std::string>(a)
                                                                     : std::get<std::string>(b);
        long long n = std::holds_alternative<long long>(a) ? std::get<long long>(a)
                                                           : std::get<long long>(b);
        if (n <= 0) return std::string{};
        if (s.size() * static_cast<std::size_t>(n) > kMaxStringBytes) fail("string too large");
        std::string out;
        out.reserve(s.size() * static_cast<std::size_t>(n));
        for (long long i = 0; i < n; ++i) out += s;
        return out;
    }

    Value factor() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of expression");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Value v = expr();
            if (!eat(')')) fail("expected ')'");
            return v;
        }
        if (c == '"' || c == '\'') {
            std::string s = string_literal();
            // Adjacent literals concatenate.
            for (;;) {
                skip_ws();
                if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'')) {
                    s += string_literal();
                } else {
                    break;
                }
            }
            return s;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return integer();
        fail(std::string("unexpected character '") + c + "'");
    }

    long long integer() {
        long long v = 0;
        bool any = false;
        while (pos_ < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
            if (src_[pos_] != '_') {
                v = v * 10 + (src_[pos_] - '0');
                if (v > (1LL << 40)) fail("integer too large");
                any = true;
            }
            ++pos_;
        }
        if (!any) fail("expected integer");
        skip_ws();
        // Integer power, as in 10**6.
        if (pos_ + 1 < src_.size() && src_[pos_] == '*' && src_[pos_ + 1] == '*') {
            pos_ += 2;
            skip_ws();
            long long e = integer();
            long long r = 1;
            for (long long i = 0; i < e; ++i) {
                r *= v;
                if (r > (1LL << 40)) fail("integer too large");
            }
            return r;
        }
        return v;
    }

    std::string string_literal() {
        const char q = src_[pos_];
        const bool triple = src_.substr(pos_, 3) == std::string(3, q);
        pos_ += triple ? 3 : 1;
        std::string out;
        for (;;) {
            if (pos_ >= src_.size()) fail("unterminated string literal");
            char c = src_[pos_];
            if (triple ? src_.substr(pos_, 3) == std::string(3, q) : c == q) {
                pos_ += triple ? 3 : 1;
                return out;
            }
            if (c == '\n' && !triple) fail("newline in string literal");
            if (c != '\\') {
                out.push_back(c);
                ++pos_;
                continue;
            }
            if (pos_ + 1 >= src_.size()) fail("dangling escape");
            char e = src_[pos_ + 1];
            pos_ += 2;
            switch (e) {
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case 'r': out.push_back('\r'); break;
                case '0': out.push_back('\0'); break;
                case '\\': out.push_back('\\'); break;
                case '\'': out.push_back('\''); break;
                case '"': out.push_back('"'); break;
                case '\n': break;
                case 'x': {
                    if (pos_ + 2 > src_.size()) fail("short \\x escape");
                    auto hex = std::string(src_.substr(pos_, 2));
                    if (!std::isxdigit(static_cast<unsigned char>(hex[0])) ||
                        !std::isxdigit(static_cast<unsigned char>(hex[1]))) {
                        fail("bad \\x escape");
                    }
                    out.push_back(static_cast<char>(std::stoi(hex, nullptr, 16)));
                    pos_ += 2;
                    break;
                }
                default:
                    // Unknown escapes are kept verbatim, as Python does.
                    out.push_back('\\');
                    out.push_back(e);
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

}  // namespace

Value evaluate(std::string_view expr) { return Evaluator(expr).run(); }

std::string evaluate_string(std::string_view expr) {
    Value v = evaluate(expr);
    if (auto* s = std::get_if<std::string>(&v)) return *s;
    return std::to_string(std::get<long long>(v));
}

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '"': out += "\\\""; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20 || c == 0x7f) {
                    char buf[5];
                    std::snprintf(buf, sizeof buf, "\\x%02x", static_cast<unsigned char>(c));
                    out += buf;
                } else {
                    out.push_back(c);
                }
        }
    }
    out += '"';
    return out;
}

}  // namespace nfrbench::pyexpr
