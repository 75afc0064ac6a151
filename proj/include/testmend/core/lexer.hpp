#pragma once

// Token scanner for the Java-like dialect used by project sources and test
// classes. Comments and whitespace are dropped; literals keep their quotes.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace testmend::lex {

enum class TokenKind { identifier, number, string, character, punct, invalid };

struct Token {
    TokenKind kind = TokenKind::punct;
    std::string_view text;
    std::size_t offset = 0;
    int line = 1;

    std::size_t end() const { return offset + text.size(); }
    bool is(std::string_view punct_or_word) const { return text == punct_or_word; }
    bool is_identifier() const { return kind == TokenKind::identifier; }
    bool is_literal() const {
        return kind == TokenKind::number || kind == TokenKind::string || kind == TokenKind::character;
    }
};

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

/// Tokens of `source`. Unterminated literals/comments yield a trailing `invalid` token.
std::vector<Token> tokenize(std::string_view source);

bool has_invalid(const std::vector<Token>& tokens);

/// Index of the bracket closing tokens[open] ("(", "{", "[" or "<"), or npos.
std::size_t match_close(const std::vector<Token>& tokens, std::size_t open);

/// 1-based line number of `offset` in `text`.
int line_of(std::string_view text, std::size_t offset);

/// Collapses whitespace runs outside literals to one space and trims.
std::string collapse_whitespace(std::string_view text);

/// Removes all whitespace outside literals; used to compare expression texts.
std::string strip_whitespace(std::string_view text);

bool is_java_keyword(std::string_view word);

/// Splits the text of an argument list (without the outer parentheses) at
/// top-level commas. Returns trimmed argument texts; empty list for "".
std::vector<std::string> split_arguments(std::string_view args);

std::string trim(std::string_view text);

} // namespace testmend::lex
