#include "testmend/app/project_loader.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "testmend/core/errors.hpp"
#include "testmend/index/source_parser.hpp"

namespace fs = std::filesystem;

namespace testmend {

const std::vector<std::string>& default_classpath() {
    static const std::vector<std::string> names = {
        "org.junit.jupiter.api.Assertions",
        "org.junit.jupiter.api.Test",
        "org.junit.jupiter.api.BeforeEach",
        "org.junit.jupiter.api.AfterEach",
        "org.junit.jupiter.api.DisplayName",
        "org.junit.jupiter.api.function.Executable",
        "java.util.List",
        "java.util.ArrayList",
        "java.util.Map",
        "java.util.HashMap",
        "java.util.Set",
        "java.util.HashSet",
        "java.util.Arrays",
        "java.util.Collections",
        "java.util.Optional",
        "java.util.Objects",
    };
    return names;
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOFailure("cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidConfig(path, std::string("malformed JSON: ") + e.what());
    }
}

namespace {

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOFailure("cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> string_list(const nlohmann::json& manifest, const std::string& key,
                                     std::vector<std::string> fallback) {
    auto it = manifest.find(key);
    if (it == manifest.end() || it->is_null()) return fallback;
    if (!it->is_array()) throw InvalidConfig(key, "expected a list of strings");
    std::vector<std::string> out;
    for (const auto& v : *it) {
        if (!v.is_string()) throw InvalidConfig(key, "expected a list of strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

} // namespace

ProjectContext load_project(const std::string& root, const nlohmann::json& manifest, const PipelineConfig& config) {
    if (!manifest.is_object()) throw InvalidConfig("testmend.json", "expected an object");
    static const std::set<std::string> known = {"toolchain", "source_dirs", "classpath", "targets",
                                                "toolchain_settings"};
    for (const auto& [key, value] : manifest.items()) {
        if (!known.count(key)) throw InvalidConfig(key, "unknown manifest key");
    }

    ProjectContext project;
    project.root_path = root;
    project.config = config;
    if (auto it = manifest.find("toolchain"); it != manifest.end()) {
        if (!it->is_string()) throw InvalidConfig("toolchain", "expected a string");
        project.toolchain_id = it->get<std::string>();
    }
    project.toolchain_settings = manifest.value("toolchain_settings", nlohmann::json::object());
    if (!project.toolchain_settings.is_object()) throw InvalidConfig("toolchain_settings", "expected an object");
    project.targets = string_list(manifest, "targets", {});

    std::set<std::string> classpath(default_classpath().begin(), default_classpath().end());
    for (auto& name : string_list(manifest, "classpath", {})) classpath.insert(name);
    project.classpath.assign(classpath.begin(), classpath.end());

    std::vector<fs::path> files;
    for (const auto& dir : string_list(manifest, "source_dirs", {"src"})) {
        fs::path base = fs::path(root) / dir;
        if (!fs::is_directory(base)) throw InvalidConfig("source_dirs", "no directory " + base.string());
        for (const auto& entry : fs::recursive_directory_iterator(base)) {
            if (entry.is_regular_file() && entry.path().extension() == ".java") files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        std::string rel = fs::relative(file, root).generic_string();
        try {
            project.source_units.push_back(parse_source_unit(rel, read_text(file)));
        } catch (const ParseFailure& e) {
            project.parse_failures.push_back(rel + ": " + e.what());
        }
    }
    for (const auto& t : project.targets) {
        if (!project.find_unit(t)) throw InvalidConfig("targets", "no source unit named " + t);
    }
    return project;
}

ProjectContext load_project(const std::string& root, const PipelineConfig& config) {
    fs::path manifest = fs::path(root) / "testmend.json";
    if (!fs::exists(manifest)) throw InvalidConfig("project", "no testmend.json in " + root);
    return load_project(root, read_json_file(manifest.string()), config);
}

} // namespace testmend
