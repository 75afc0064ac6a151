#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "testmend/core/model.hpp"

namespace testmend {

/// Parses one source file into a SourceUnit describing its first top-level type.
/// Throws ParseFailure when no balanced type declaration is found.
SourceUnit parse_source_unit(const std::string& path, std::string_view text);

/// Declared parameter types of a parameter list text (without parentheses).
std::vector<std::string> parameter_types(std::string_view params);

/// Type name with generic arguments and array suffixes removed ("List<Foo>[]" -> "List").
std::string erase_type_arguments(std::string_view type);

} // namespace testmend
