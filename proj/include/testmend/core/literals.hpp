#pragma once

// Literal syntax of the test dialect: parsing code literals, the display form
// a test runner prints for a value, and rendering a displayed value back into
// a literal of a given syntax class.

#include <optional>
#include <string>
#include <string_view>

namespace testmend {

enum class LiteralClass { string, character, integer, long_integer, float_number, double_number, boolean, null };

struct Literal {
    LiteralClass cls = LiteralClass::null;
    std::string value; // unescaped text for string/char, canonical digits for numbers

    bool operator==(const Literal&) const = default;
};

/// Parses a literal as written in code ("\"a\\n\"", 'x', -5, 5L, 2.5f, true, null).
std::optional<Literal> parse_literal(std::string_view code);

/// How a runner prints the value in "expected: <..> but was: <..>".
std::string display_literal(const Literal& literal);

/// Semantic equality (numbers compare by value, 5 == 5L).
bool literal_equal(const Literal& a, const Literal& b);

/// Renders a value as printed by the runner into code with the syntax class `cls`.
/// Throws UnparseableLiteral when the value cannot be expressed in that class.
std::string render_literal(LiteralClass cls, std::string_view displayed);

std::string java_escape(std::string_view raw, char quote);
std::string java_unescape(std::string_view escaped);

} // namespace testmend
