#include "testmend/index/symbol_index.hpp"

#include <algorithm>
#include <deque>
#include <filesystem>
#include <fstream>

#include "testmend/core/errors.hpp"
#include "testmend/core/hash.hpp"
#include "testmend/core/serialize.hpp"

namespace testmend {

namespace {

std::string package_of(const std::string& qualified) {
    auto dot = qualified.rfind('.');
    return dot == std::string::npos ? std::string{} : qualified.substr(0, dot);
}

std::string simple_of(const std::string& qualified) {
    auto dot = qualified.rfind('.');
    return dot == std::string::npos ? qualified : qualified.substr(dot + 1);
}

} // namespace

const SourceUnit* SymbolIndex::find(const std::string& qualified_name) const {
    auto it = by_qualified_name.find(qualified_name);
    return it == by_qualified_name.end() ? nullptr : &it->second;
}

bool SymbolIndex::knows(const std::string& qualified_name) const {
    return by_qualified_name.count(qualified_name) > 0 || classpath.count(qualified_name) > 0;
}

bool SymbolIndex::has_package(const std::string& package) const {
    auto in_package = [&](const std::string& q) { return package_of(q) == package; };
    for (const auto& [q, _] : by_qualified_name) {
        if (in_package(q)) return true;
    }
    return std::any_of(classpath.begin(), classpath.end(), in_package);
}

std::vector<std::string> SymbolIndex::candidates(const std::string& simple_name) const {
    std::vector<std::string> out;
    if (auto it = by_simple_name.find(simple_name); it != by_simple_name.end()) out = it->second;
    for (const auto& q : classpath) {
        if (simple_of(q) == simple_name && !by_qualified_name.count(q)) out.push_back(q);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<std::string> SymbolIndex::resolve_in(const std::string& written, const SourceUnit& context) const {
    if (written.empty()) return std::nullopt;
    if (written.find('.') != std::string::npos) {
        if (knows(written)) return written;
        return std::nullopt;
    }
    if (context.simple_name() == written) return context.qualified_name;
    for (const auto& imp : context.imports) {
        if (!imp.is_static && !imp.wildcard && imp.simple_name() == written) return imp.qualified_name;
    }
    const std::string pkg = context.package_name();
    std::string same = pkg.empty() ? written : pkg + "." + written;
    if (knows(same)) return same;
    for (const auto& imp : context.imports) {
        if (!imp.is_static && imp.wildcard && knows(imp.qualified_name + "." + written))
            return imp.qualified_name + "." + written;
    }
    auto it = by_simple_name.find(written);
    if (it != by_simple_name.end() && it->second.size() == 1) return it->second.front();
    return std::nullopt;
}

std::vector<std::string> SymbolIndex::ancestry(const std::string& qualified_name) const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    std::deque<std::string> queue{qualified_name};
    while (!queue.empty()) {
        auto q = queue.front();
        queue.pop_front();
        if (!seen.insert(q).second) continue;
        out.push_back(q);
        const SourceUnit* unit = find(q);
        if (!unit) continue;
        for (const auto& super : unit->supertypes) {
            if (auto resolved = resolve_in(super, *unit); resolved && find(*resolved)) queue.push_back(*resolved);
        }
    }
    return out;
}

SymbolIndex build_index(const ProjectContext& project) {
    SymbolIndex index;
    index.parse_failures = project.parse_failures;
    for (const auto& name : project.classpath) index.classpath.insert(name);
    for (const auto& unit : project.source_units) {
        if (index.by_qualified_name.count(unit.qualified_name)) {
            index.parse_failures.push_back(unit.path + ": duplicate type " + unit.qualified_name);
            continue;
        }
        index.by_qualified_name.emplace(unit.qualified_name, unit);
        index.by_simple_name[unit.simple_name()].push_back(unit.qualified_name);
    }
    for (auto& [_, names] : index.by_simple_name) std::sort(names.begin(), names.end());
    for (const auto& [q, unit] : index.by_qualified_name) {
        if (unit.kind != UnitKind::class_type) continue;
        for (const auto& ancestor : index.ancestry(q)) {
            if (ancestor == q) continue;
            const SourceUnit* a = index.find(ancestor);
            if (a && (a->kind == UnitKind::interface_type || a->kind == UnitKind::abstract_type))
                index.implementors[ancestor].push_back(q);
        }
    }
    for (auto& [_, names] : index.implementors) std::sort(names.begin(), names.end());
    return index;
}

std::string index_content_hash(const ProjectContext& project) {
    std::string material;
    for (const auto& unit : project.source_units) {
        material += unit.path + '\0' + unit.body_text + '\0';
    }
    for (const auto& name : project.classpath) material += name + '\n';
    for (const auto& failure : project.parse_failures) material += failure + '\n';
    return fingerprint(material);
}

namespace {

nlohmann::json index_to_json(const SymbolIndex& index) {
    nlohmann::json units = nlohmann::json::array();
    for (const auto& [_, unit] : index.by_qualified_name) units.push_back(unit);
    return {{"units", units},
            {"by_simple_name", index.by_simple_name},
            {"implementors", index.implementors},
            {"classpath", index.classpath},
            {"parse_failures", index.parse_failures}};
}

SymbolIndex index_from_json(const nlohmann::json& j) {
    SymbolIndex index;
    for (const auto& u : j.at("units")) {
        auto unit = u.get<SourceUnit>();
        index.by_qualified_name.emplace(unit.qualified_name, std::move(unit));
    }
    index.by_simple_name = j.at("by_simple_name").get<std::map<std::string, std::vector<std::string>>>();
    index.implementors = j.at("implementors").get<std::map<std::string, std::vector<std::string>>>();
    index.classpath = j.at("classpath").get<std::set<std::string>>();
    index.parse_failures = j.at("parse_failures").get<std::vector<std::string>>();
    return index;
}

} // namespace

SymbolIndex load_or_build_index(const ProjectContext& project, bool use_cache) {
    if (!use_cache || project.root_path.empty()) return build_index(project);
    namespace fs = std::filesystem;
    fs::path dir = fs::path(project.root_path) / ".testmend";
    fs::path file = dir / ("index-" + index_content_hash(project) + ".json");
    if (fs::exists(file)) {
        try {
            std::ifstream in(file);
            return index_from_json(nlohmann::json::parse(in));
        } catch (const std::exception&) {
            // unreadable cache: rebuild below
        }
    }
    SymbolIndex index = build_index(project);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!ec) {
        std::ofstream out(file);
        if (out) out << index_to_json(index).dump(1) << "\n";
    }
    return index;
}

std::size_t shared_package_prefix(const std::string& a, const std::string& b) {
    auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        while (!s.empty()) {
            auto dot = s.find('.', start);
            parts.push_back(s.substr(start, dot == std::string::npos ? std::string::npos : dot - start));
            if (dot == std::string::npos) break;
            start = dot + 1;
        }
        return parts;
    };
    auto pa = split(a);
    auto pb = split(b);
    std::size_t n = 0;
    while (n < pa.size() && n < pb.size() && pa[n] == pb[n]) ++n;
    return n;
}

ImportResolution resolve_import(const std::string& simple_name, const SymbolIndex& index,
                                const std::string& cut_package) {
    auto names = index.candidates(simple_name);
    if (names.empty()) throw NotFound("no type named " + simple_name + " in the index or classpath");
    std::stable_sort(names.begin(), names.end(), [&](const std::string& x, const std::string& y) {
        auto sx = shared_package_prefix(package_of(x), cut_package);
        auto sy = shared_package_prefix(package_of(y), cut_package);
        if (sx != sy) return sx > sy;
        return x < y;
    });
    return ImportResolution{names};
}

namespace {

const SourceUnit& require_unit(const std::string& type_name, const SymbolIndex& index) {
    if (const SourceUnit* unit = index.find(type_name)) return *unit;
    auto it = index.by_simple_name.find(type_name);
    if (it != index.by_simple_name.end() && it->second.size() == 1) return *index.find(it->second.front());
    throw UnknownType(type_name);
}

} // namespace

std::vector<LabeledSignature> constructor_signatures(const std::string& type_name, const SymbolIndex& index) {
    const SourceUnit& unit = require_unit(type_name, index);
    std::vector<LabeledSignature> out;
    if (unit.kind == UnitKind::interface_type || unit.kind == UnitKind::abstract_type) {
        auto it = index.implementors.find(unit.qualified_name);
        if (it == index.implementors.end()) return out;
        for (const auto& impl : it->second) {
            const SourceUnit* c = index.find(impl);
            for (const auto& ctor : c->constructors) out.push_back({c->simple_name(), ctor.signature});
        }
        return out;
    }
    for (const auto& ctor : unit.constructors) out.push_back({unit.simple_name(), ctor.signature});
    return out;
}

std::vector<MethodRef> method_signatures(const std::string& type_name, const std::string& method_name,
                                         const SymbolIndex& index) {
    const SourceUnit& unit = require_unit(type_name, index);
    std::vector<MethodRef> out;
    for (const auto& q : index.ancestry(unit.qualified_name)) {
        const SourceUnit* u = index.find(q);
        if (!u) continue;
        for (const auto& m : u->methods) {
            if (m.name == method_name) out.push_back(m);
        }
    }
    return out;
}

} // namespace testmend
