#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "testmend/core/config.hpp"
#include "testmend/core/model.hpp"

namespace testmend {

struct SymbolIndex {
    std::map<std::string, std::vector<std::string>> by_simple_name;
    std::map<std::string, SourceUnit> by_qualified_name;
    // interface/abstract qualified name -> concrete (kind=class) implementors, sorted
    std::map<std::string, std::vector<std::string>> implementors;
    std::set<std::string> classpath; // external qualified names declared by the project
    std::vector<std::string> parse_failures;

    const SourceUnit* find(const std::string& qualified_name) const;
    /// True when the name is an indexed unit or a declared classpath entry.
    bool knows(const std::string& qualified_name) const;
    /// True when some indexed unit or classpath entry lives in `package`.
    bool has_package(const std::string& package) const;
    /// Qualified names (index and classpath) whose last segment is `simple_name`, sorted.
    std::vector<std::string> candidates(const std::string& simple_name) const;
    /// Resolves a type name as written inside `context` (imports, same package, unique name).
    std::optional<std::string> resolve_in(const std::string& written, const SourceUnit& context) const;
    /// `qualified_name` plus all its indexed supertypes, nearest first.
    std::vector<std::string> ancestry(const std::string& qualified_name) const;

    bool operator==(const SymbolIndex&) const = default;
};

/// Indexes project.source_units plus the classpath name list. Units whose qualified name is
/// already taken are recorded as parse failures and skipped.
SymbolIndex build_index(const ProjectContext& project);

/// Uses `<root>/.testmend/index-<hash>.json` when `use_cache` is set; rebuilds on any mismatch.
SymbolIndex load_or_build_index(const ProjectContext& project, bool use_cache);
std::string index_content_hash(const ProjectContext& project);

struct ImportResolution {
    std::vector<std::string> candidates; // ordered by locality to the CUT; never empty

    bool unique() const { return candidates.size() == 1; }
    ImportRef best() const { return ImportRef{candidates.front(), false, false}; }
};

/// Throws NotFound when neither the index nor the classpath has the name.
ImportResolution resolve_import(const std::string& simple_name, const SymbolIndex& index,
                                const std::string& cut_package);

struct LabeledSignature {
    std::string type; // the concrete type that declares the constructor
    std::string signature;

    std::string render() const { return type + ": " + signature; }
    bool operator==(const LabeledSignature&) const = default;
};

/// Declared constructors; for interfaces and abstract classes, those of every implementor.
/// Throws UnknownType.
std::vector<LabeledSignature> constructor_signatures(const std::string& type_name, const SymbolIndex& index);

/// Methods named `method_name` declared on the type or its indexed supertypes. Throws UnknownType.
std::vector<MethodRef> method_signatures(const std::string& type_name, const std::string& method_name,
                                         const SymbolIndex& index);

/// Number of path segments two package names share from the left.
std::size_t shared_package_prefix(const std::string& a, const std::string& b);

} // namespace testmend
