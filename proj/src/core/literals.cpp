#include "testmend/core/literals.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <regex>

#include "testmend/core/errors.hpp"
#include "testmend/core/lexer.hpp"

namespace testmend {

namespace {

void append_utf8(std::string& out, unsigned cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_number_text(std::string_view s) {
    static const std::regex re(R"(^-?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?$)");
    return std::regex_match(s.begin(), s.end(), re);
}

bool is_integer_text(std::string_view s) {
    static const std::regex re(R"(^-?\d+$)");
    return std::regex_match(s.begin(), s.end(), re);
}

std::string shortest_double(long double v) {
    double d = static_cast<double>(v);
    char buf[64];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, d);
        if (std::strtod(buf, nullptr) == d) break;
    }
    std::string out(buf);
    if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
    return out;
}

} // namespace

std::string java_escape(std::string_view raw, char quote) {
    std::string out;
    for (char c : raw) {
        switch (c) {
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        case '\b': out += "\\b"; break;
        case '\f': out += "\\f"; break;
        default:
            if (c == quote) {
                out.push_back('\\');
                out.push_back(c);
            } else if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(c));
                out += buf;
            } else {
                out.push_back(c);
            }
        }
    }
    return out;
}

std::string java_unescape(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c != '\\' || i + 1 >= s.size()) {
            out.push_back(c);
            continue;
        }
        char e = s[++i];
        switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case 'b': out.push_back('\b'); break;
        case 'f': out.push_back('\f'); break;
        case 's': out.push_back(' '); break;
        case 'u': {
            std::size_t j = i;
            while (j < s.size() && s[j] == 'u') ++j;
            if (j + 4 <= s.size()) {
                unsigned cp = static_cast<unsigned>(std::strtoul(std::string(s.substr(j, 4)).c_str(), nullptr, 16));
                append_utf8(out, cp);
                i = j + 3;
            }
            break;
        }
        default: out.push_back(e); break;
        }
    }
    return out;
}

std::optional<Literal> parse_literal(std::string_view code) {
    std::string text = lex::strip_whitespace(code);
    if (text.empty()) return std::nullopt;
    if (text == "null") return Literal{LiteralClass::null, "null"};
    if (text == "true" || text == "false") return Literal{LiteralClass::boolean, text};
    if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
        if (text.size() >= 6 && text.compare(0, 3, "\"\"\"") == 0) {
            std::string inner = text.substr(3, text.size() - 6);
            if (!inner.empty() && inner.front() == '\n') inner.erase(0, 1);
            return Literal{LiteralClass::string, java_unescape(inner)};
        }
        return Literal{LiteralClass::string, java_unescape(std::string_view(text).substr(1, text.size() - 2))};
    }
    if (text.size() >= 3 && text.front() == '\'' && text.back() == '\'') {
        return Literal{LiteralClass::character, java_unescape(std::string_view(text).substr(1, text.size() - 2))};
    }
    bool negative = text.front() == '-';
    std::string digits = negative ? text.substr(1) : text;
    if (digits.empty() || !(std::isdigit(static_cast<unsigned char>(digits[0])) || digits[0] == '.'))
        return std::nullopt;
    std::string clean;
    for (char c : digits) {
        if (c != '_') clean.push_back(c);
    }
    bool hex = clean.size() > 2 && clean[0] == '0' && (clean[1] == 'x' || clean[1] == 'X');
    LiteralClass cls = LiteralClass::integer;
    char last = clean.back();
    if (last == 'L' || last == 'l') {
        cls = LiteralClass::long_integer;
        clean.pop_back();
    } else if (!hex && (last == 'f' || last == 'F')) {
        cls = LiteralClass::float_number;
        clean.pop_back();
    } else if (!hex && (last == 'd' || last == 'D')) {
        cls = LiteralClass::double_number;
        clean.pop_back();
    } else if (!hex && clean.find_first_of(".eE") != std::string::npos) {
        cls = LiteralClass::double_number;
    }
    if (hex) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(clean.c_str() + 2, &end, 16);
        if (*end != '\0') return std::nullopt;
        std::string value = std::to_string(v);
        return Literal{cls, negative ? "-" + value : value};
    }
    if (!is_number_text(clean)) return std::nullopt;
    if (cls == LiteralClass::integer || cls == LiteralClass::long_integer) {
        if (!is_integer_text(clean)) return std::nullopt;
        std::size_t nz = 0;
        while (nz + 1 < clean.size() && clean[nz] == '0') ++nz;
        clean = clean.substr(nz);
        return Literal{cls, negative && clean != "0" ? "-" + clean : clean};
    }
    long double v = std::strtold(clean.c_str(), nullptr);
    return Literal{cls, shortest_double(negative ? -v : v)};
}

std::string display_literal(const Literal& literal) { return literal.value; }

namespace {

bool numeric(LiteralClass c) {
    return c == LiteralClass::integer || c == LiteralClass::long_integer || c == LiteralClass::float_number ||
           c == LiteralClass::double_number;
}

} // namespace

bool literal_equal(const Literal& a, const Literal& b) {
    if (numeric(a.cls) && numeric(b.cls)) {
        return std::strtold(a.value.c_str(), nullptr) == std::strtold(b.value.c_str(), nullptr);
    }
    return a.cls == b.cls && a.value == b.value;
}

std::string render_literal(LiteralClass cls, std::string_view displayed) {
    std::string d(displayed);
    auto fail = [&](const char* what) -> std::string {
        throw UnparseableLiteral("cannot express '" + d + "' as " + what);
    };
    if (d == "null" && (cls == LiteralClass::string || cls == LiteralClass::null)) return "null";
    switch (cls) {
    case LiteralClass::string: return "\"" + java_escape(d, '"') + "\"";
    case LiteralClass::character: {
        // One code point, possibly multi-byte UTF-8.
        auto lead = d.empty() ? 0u : static_cast<unsigned char>(d[0]);
        std::size_t width = lead < 0x80 ? 1 : lead < 0xE0 ? 2 : lead < 0xF0 ? 3 : 4;
        if (d.empty() || d.size() != width) return fail("a char literal");
        return "'" + java_escape(d, '\'') + "'";
    }
    case LiteralClass::integer:
        if (!is_number_text(d)) return fail("an integer literal");
        return d;
    case LiteralClass::long_integer:
        if (!is_integer_text(d)) return fail("a long literal");
        return d + "L";
    case LiteralClass::float_number:
        if (!is_number_text(d)) return fail("a float literal");
        return d + "f";
    case LiteralClass::double_number:
        if (!is_number_text(d)) return fail("a double literal");
        return d;
    case LiteralClass::boolean:
        if (d != "true" && d != "false") return fail("a boolean literal");
        return d;
    case LiteralClass::null:
        if (d == "true" || d == "false" || is_number_text(d)) return d;
        return "\"" + java_escape(d, '"') + "\"";
    }
    return fail("a literal");
}

} // namespace testmend
