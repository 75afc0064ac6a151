#pragma once

// A project directory holds a manifest `testmend.json` next to its sources:
//   {
//     "toolchain": "mock" | "process",
//     "source_dirs": ["src"],            // scanned recursively for *.java
//     "classpath": ["org.junit.jupiter.api.Test", ...],
//     "targets": ["pkg.Foo", ...],       // optional; default every concrete class
//     "toolchain_settings": {...}        // adapter-specific
//   }

#include <string>

#include <json.hpp>

#include "testmend/core/config.hpp"

namespace testmend {

/// JUnit and JDK names every project may reference without declaring them.
const std::vector<std::string>& default_classpath();

/// Reads the manifest and parses every source file. Unparseable files are
/// listed in parse_failures. Throws InvalidConfig or IOFailure.
ProjectContext load_project(const std::string& root, const PipelineConfig& config);

/// Same, from an already parsed manifest.
ProjectContext load_project(const std::string& root, const nlohmann::json& manifest, const PipelineConfig& config);

/// Reads a JSON file. Throws IOFailure or InvalidConfig (field = path) on bad JSON.
nlohmann::json read_json_file(const std::string& path);

} // namespace testmend
