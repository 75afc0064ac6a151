#include "testmend/core/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace testmend::lex {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }
bool ident_part(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

} // namespace

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    int line = 1;
    const std::size_t n = src.size();
    auto emit = [&](TokenKind kind, std::size_t begin, std::size_t end, int at_line) {
        out.push_back(Token{kind, src.substr(begin, end - begin), begin, at_line});
    };
    while (i < n) {
        char c = src[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && src[i + 1] == '/') {
            while (i < n && src[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && src[i + 1] == '*') {
            std::size_t begin = i;
            int begin_line = line;
            i += 2;
            while (i + 1 < n && !(src[i] == '*' && src[i + 1] == '/')) {
                if (src[i] == '\n') ++line;
                ++i;
            }
            if (i + 1 >= n) {
                emit(TokenKind::invalid, begin, n, begin_line);
                return out;
            }
            i += 2;
            continue;
        }
        if (c == '"' && src.substr(i, 3) == "\"\"\"") {
            std::size_t begin = i;
            int begin_line = line;
            i += 3;
            while (i < n && src.substr(i, 3) != "\"\"\"") {
                if (src[i] == '\n') ++line;
                if (src[i] == '\\') ++i;
                ++i;
            }
            if (i >= n) {
                emit(TokenKind::invalid, begin, n, begin_line);
                return out;
            }
            i += 3;
            emit(TokenKind::string, begin, i, begin_line);
            continue;
        }
        if (c == '"' || c == '\'') {
            std::size_t begin = i;
            ++i;
            bool closed = false;
            while (i < n && src[i] != '\n') {
                if (src[i] == '\\') {
                    i += 2;
                    continue;
                }
                if (src[i] == c) {
                    closed = true;
                    ++i;
                    break;
                }
                ++i;
            }
            if (!closed) {
                emit(TokenKind::invalid, begin, std::min(i, n), line);
                return out;
            }
            emit(c == '"' ? TokenKind::string : TokenKind::character, begin, i, line);
            continue;
        }
        if (ident_start(c)) {
            std::size_t begin = i;
            while (i < n && ident_part(src[i])) ++i;
            emit(TokenKind::identifier, begin, i, line);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t begin = i;
            while (i < n) {
                char d = src[i];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.') {
                    ++i;
                } else if ((d == '+' || d == '-') && (src[i - 1] == 'e' || src[i - 1] == 'E') &&
                           !(src.substr(begin, 2) == "0x" || src.substr(begin, 2) == "0X")) {
                    ++i;
                } else {
                    break;
                }
            }
            emit(TokenKind::number, begin, i, line);
            continue;
        }
        static constexpr std::array<std::string_view, 4> multi = {"->", "::", "...", "=="};
        bool matched = false;
        for (auto op : multi) {
            if (src.substr(i, op.size()) == op) {
                emit(TokenKind::punct, i, i + op.size(), line);
                i += op.size();
                matched = true;
                break;
            }
        }
        if (matched) continue;
        emit(TokenKind::punct, i, i + 1, line);
        ++i;
    }
    return out;
}

bool has_invalid(const std::vector<Token>& tokens) {
    return std::any_of(tokens.begin(), tokens.end(),
                       [](const Token& t) { return t.kind == TokenKind::invalid; });
}

std::size_t match_close(const std::vector<Token>& tokens, std::size_t open) {
    if (open >= tokens.size()) return npos;
    std::string_view o = tokens[open].text;
    std::string_view c;
    if (o == "(") c = ")";
    else if (o == "{") c = "}";
    else if (o == "[") c = "]";
    else if (o == "<") c = ">";
    else return npos;
    int depth = 0;
    for (std::size_t i = open; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        if (t.kind != TokenKind::punct) continue;
        if (t.text == o) {
            ++depth;
        } else if (t.text == c) {
            if (--depth == 0) return i;
        } else if (o == "<" && (t.text == ";" || t.text == "{" || t.text == "(" || t.text == ")")) {
            return npos; // not a generic argument list
        }
    }
    return npos;
}

int line_of(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

namespace {

template <typename OnSpace>
std::string rewrite_outside_literals(std::string_view text, OnSpace on_space) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    bool pending_space = false;
    while (i < text.size()) {
        char c = text[i];
        if (c == '"' || c == '\'') {
            if (pending_space) on_space(out);
            pending_space = false;
            std::size_t j = i + 1;
            while (j < text.size() && text[j] != c) {
                if (text[j] == '\\') ++j;
                ++j;
            }
            j = std::min(j + 1, text.size());
            out.append(text.substr(i, j - i));
            i = j;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = true;
            ++i;
            continue;
        }
        if (pending_space) on_space(out);
        pending_space = false;
        out.push_back(c);
        ++i;
    }
    return out;
}

} // namespace

std::string collapse_whitespace(std::string_view text) {
    return rewrite_outside_literals(text, [](std::string& out) {
        if (!out.empty()) out.push_back(' ');
    });
}

std::string strip_whitespace(std::string_view text) {
    return rewrite_outside_literals(text, [](std::string&) {});
}

bool is_java_keyword(std::string_view word) {
    static constexpr std::array<std::string_view, 52> words = {
        "abstract", "assert",     "boolean",  "break",     "byte",      "case",      "catch",
        "char",     "class",      "const",    "continue",  "default",   "do",        "double",
        "else",     "enum",       "extends",  "final",     "finally",   "float",     "for",
        "goto",     "if",         "implements", "import",  "instanceof", "int",      "interface",
        "long",     "native",     "new",      "package",   "private",   "protected", "public",
        "return",   "short",      "static",   "strictfp",  "super",     "switch",    "synchronized",
        "this",     "throw",      "throws",   "transient", "try",       "void",      "volatile",
        "while",    "var",        "record"};
    return std::find(words.begin(), words.end(), word) != words.end();
}

std::string trim(std::string_view text) {
    std::size_t b = 0;
    std::size_t e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    return std::string(text.substr(b, e - b));
}

namespace {

// `Foo<Bar>` / `new X<>()` but not `a < b`.
bool looks_generic_open(std::string_view text, std::size_t i) {
    if (i == 0 || !ident_part(text[i - 1])) return false;
    if (i + 1 >= text.size()) return false;
    char next = text[i + 1];
    return std::isupper(static_cast<unsigned char>(next)) || next == '>' || next == '?';
}

} // namespace

std::vector<std::string> split_arguments(std::string_view args) {
    std::vector<std::string> out;
    if (trim(args).empty()) return out;
    int depth = 0;
    int angle = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < args.size(); ++i) {
        char c = args[i];
        if (c == '"' || c == '\'') {
            std::size_t j = i + 1;
            while (j < args.size() && args[j] != c) {
                if (args[j] == '\\') ++j;
                ++j;
            }
            i = j;
            continue;
        }
        if (c == '(' || c == '{' || c == '[') {
            ++depth;
        } else if (c == ')' || c == '}' || c == ']') {
            --depth;
        } else if (c == '<' && looks_generic_open(args, i)) {
            ++angle;
        } else if (c == '>' && angle > 0 && !(i > 0 && args[i - 1] == '-')) {
            --angle;
        } else if (c == ',' && depth == 0 && angle == 0) {
            out.push_back(trim(args.substr(start, i - start)));
            start = i + 1;
        }
    }
    out.push_back(trim(args.substr(start)));
    return out;
}

} // namespace testmend::lex
