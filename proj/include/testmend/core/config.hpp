#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "testmend/core/model.hpp"

namespace testmend {

/// Mock-framework misuse exceptions that never become expected-exception oracles.
const std::vector<std::string>& default_exception_blocklist();

enum class GranularityMode { class_level, method_level, both };
enum class LlmBackendKind { http, replay, scripted };

struct LlmSettings {
    std::string endpoint = "https://api.openai.com/v1";
    std::string model = "gpt-4o-mini";
    double temperature = 0.0;
    std::string api_key_env = "TESTMEND_API_KEY";
    int max_attempts = 5;
    int initial_backoff_ms = 500;
    int request_timeout_s = 120;

    bool operator==(const LlmSettings&) const = default;
};

struct PipelineConfig {
    int max_oracle_llm_iterations = 3;
    int plain_fix_iterations = 5;
    int call_graph_depth = 2;
    std::vector<std::string> exception_blocklist = default_exception_blocklist();
    GranularityMode granularity = GranularityMode::class_level;
    LlmBackendKind llm_backend = LlmBackendKind::http;
    bool record_transcripts = false;
    LlmSettings llm;
    std::string template_dir;
    int jobs = 1;

    bool operator==(const PipelineConfig&) const = default;
};

/// Fills defaults and range-checks every field. Throws InvalidConfig naming the field.
PipelineConfig validate_config(const PipelineConfig& cfg);

/// Builds a config from a (possibly partial) JSON object; absent keys take defaults.
PipelineConfig validate_config(const nlohmann::json& partial);

/// Overlays `overrides` onto `base` key by key (used for file < flag precedence).
nlohmann::json merge_config_json(nlohmann::json base, const nlohmann::json& overrides);

nlohmann::json config_to_json(const PipelineConfig& cfg);

std::string to_string(GranularityMode mode);
std::string to_string(LlmBackendKind kind);

struct ProjectContext {
    std::string root_path;
    std::vector<SourceUnit> source_units;
    std::string toolchain_id = "mock";
    PipelineConfig config;
    std::vector<std::string> classpath;   // external type names that exist besides project sources
    nlohmann::json toolchain_settings;    // adapter-specific section of the project manifest
    std::vector<std::string> targets;     // explicit units under test; empty = every class
    std::vector<std::string> parse_failures; // "path: reason" for source files that were skipped

    const SourceUnit* find_unit(const std::string& qualified_name) const;
};

/// Throws InvalidConfig if paths repeat or `known_toolchains` lacks the project's adapter.
void validate_project(const ProjectContext& project, const std::vector<std::string>& known_toolchains);

} // namespace testmend
