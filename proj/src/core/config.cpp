#include "testmend/core/config.hpp"

#include <algorithm>
#include <set>

#include "testmend/core/errors.hpp"

namespace testmend {

const std::vector<std::string>& default_exception_blocklist() {
    static const std::vector<std::string> names = {
        "UnfinishedStubbingException",
        "UnnecessaryStubbingException",
        "WrongTypeOfReturnValue",
        "MissingMethodInvocationException",
        "InvalidUseOfMatchersException",
        "UnfinishedVerificationException",
        "NotAMockException",
        "MockitoException",
    };
    return names;
}

std::string to_string(GranularityMode mode) {
    switch (mode) {
    case GranularityMode::class_level: return "class";
    case GranularityMode::method_level: return "method";
    case GranularityMode::both: return "both";
    }
    return "class";
}

std::string to_string(LlmBackendKind kind) {
    switch (kind) {
    case LlmBackendKind::http: return "http";
    case LlmBackendKind::replay: return "replay";
    case LlmBackendKind::scripted: return "scripted";
    }
    return "http";
}

namespace {

GranularityMode granularity_mode_from(const std::string& text) {
    if (text == "class") return GranularityMode::class_level;
    if (text == "method") return GranularityMode::method_level;
    if (text == "both") return GranularityMode::both;
    throw InvalidConfig("granularity", "expected class|method|both, got '" + text + "'");
}

LlmBackendKind backend_from(const std::string& text) {
    if (text == "http") return LlmBackendKind::http;
    if (text == "replay") return LlmBackendKind::replay;
    if (text == "scripted") return LlmBackendKind::scripted;
    throw InvalidConfig("llm_backend", "expected http|replay|scripted, got '" + text + "'");
}

template <typename T>
T read_field(const nlohmann::json& obj, const char* key, const std::string& path, T fallback) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return fallback;
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InvalidConfig(path, "wrong value type");
    }
}

void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& known,
                    const std::string& prefix) {
    for (const auto& [key, value] : obj.items()) {
        if (!known.count(key)) throw InvalidConfig(prefix + key, "unknown setting");
    }
}

} // namespace

PipelineConfig validate_config(const PipelineConfig& cfg) {
    PipelineConfig out = cfg;
    if (out.max_oracle_llm_iterations < 0)
        throw InvalidConfig("max_oracle_llm_iterations", "must be >= 0");
    if (out.plain_fix_iterations < 0) throw InvalidConfig("plain_fix_iterations", "must be >= 0");
    if (out.call_graph_depth < 1) throw InvalidConfig("call_graph_depth", "must be >= 1");
    if (out.jobs < 1) throw InvalidConfig("jobs", "must be >= 1");
    if (out.llm.max_attempts < 1) throw InvalidConfig("llm.max_attempts", "must be >= 1");
    if (out.llm.initial_backoff_ms < 0) throw InvalidConfig("llm.initial_backoff_ms", "must be >= 0");
    if (out.llm.temperature < 0.0 || out.llm.temperature > 2.0)
        throw InvalidConfig("llm.temperature", "must be within [0, 2]");
    if (out.llm.request_timeout_s < 1) throw InvalidConfig("llm.request_timeout_s", "must be >= 1");
    for (const auto& name : out.exception_blocklist) {
        if (name.empty()) throw InvalidConfig("exception_blocklist", "empty exception name");
    }
    if (out.template_dir.empty()) out.template_dir = TESTMEND_TEMPLATE_DIR;
    return out;
}

PipelineConfig validate_config(const nlohmann::json& partial) {
    if (!partial.is_null() && !partial.is_object()) throw InvalidConfig("<root>", "expected an object");
    const nlohmann::json obj = partial.is_null() ? nlohmann::json::object() : partial;
    reject_unknown(obj,
                   {"max_oracle_llm_iterations", "plain_fix_iterations", "call_graph_depth",
                    "exception_blocklist", "granularity", "llm_backend", "record_transcripts", "llm",
                    "template_dir", "jobs"},
                   "");

    PipelineConfig cfg;
    cfg.exception_blocklist = default_exception_blocklist();
    cfg.max_oracle_llm_iterations =
        read_field(obj, "max_oracle_llm_iterations", "max_oracle_llm_iterations", cfg.max_oracle_llm_iterations);
    cfg.plain_fix_iterations =
        read_field(obj, "plain_fix_iterations", "plain_fix_iterations", cfg.plain_fix_iterations);
    cfg.call_graph_depth = read_field(obj, "call_graph_depth", "call_graph_depth", cfg.call_graph_depth);
    cfg.exception_blocklist =
        read_field(obj, "exception_blocklist", "exception_blocklist", cfg.exception_blocklist);
    cfg.granularity = granularity_mode_from(read_field<std::string>(obj, "granularity", "granularity", "class"));
    cfg.llm_backend = backend_from(read_field<std::string>(obj, "llm_backend", "llm_backend", "http"));
    cfg.record_transcripts = read_field(obj, "record_transcripts", "record_transcripts", cfg.record_transcripts);
    cfg.template_dir = read_field(obj, "template_dir", "template_dir", cfg.template_dir);
    cfg.jobs = read_field(obj, "jobs", "jobs", cfg.jobs);

    if (auto it = obj.find("llm"); it != obj.end() && !it->is_null()) {
        if (!it->is_object()) throw InvalidConfig("llm", "expected an object");
        const auto& llm = *it;
        reject_unknown(llm,
                       {"endpoint", "model", "temperature", "api_key_env", "max_attempts",
                        "initial_backoff_ms", "request_timeout_s"},
                       "llm.");
        cfg.llm.endpoint = read_field(llm, "endpoint", "llm.endpoint", cfg.llm.endpoint);
        cfg.llm.model = read_field(llm, "model", "llm.model", cfg.llm.model);
        cfg.llm.temperature = read_field(llm, "temperature", "llm.temperature", cfg.llm.temperature);
        cfg.llm.api_key_env = read_field(llm, "api_key_env", "llm.api_key_env", cfg.llm.api_key_env);
        cfg.llm.max_attempts = read_field(llm, "max_attempts", "llm.max_attempts", cfg.llm.max_attempts);
        cfg.llm.initial_backoff_ms =
            read_field(llm, "initial_backoff_ms", "llm.initial_backoff_ms", cfg.llm.initial_backoff_ms);
        cfg.llm.request_timeout_s =
            read_field(llm, "request_timeout_s", "llm.request_timeout_s", cfg.llm.request_timeout_s);
    }
    return validate_config(cfg);
}

nlohmann::json merge_config_json(nlohmann::json base, const nlohmann::json& overrides) {
    if (base.is_null()) base = nlohmann::json::object();
    for (const auto& [key, value] : overrides.items()) {
        if (value.is_object() && base.contains(key) && base[key].is_object()) {
            base[key] = merge_config_json(base[key], value);
        } else {
            base[key] = value;
        }
    }
    return base;
}

nlohmann::json config_to_json(const PipelineConfig& cfg) {
    return {
        {"max_oracle_llm_iterations", cfg.max_oracle_llm_iterations},
        {"plain_fix_iterations", cfg.plain_fix_iterations},
        {"call_graph_depth", cfg.call_graph_depth},
        {"exception_blocklist", cfg.exception_blocklist},
        {"granularity", to_string(cfg.granularity)},
        {"llm_backend", to_string(cfg.llm_backend)},
        {"record_transcripts", cfg.record_transcripts},
        {"llm",
         {{"endpoint", cfg.llm.endpoint},
          {"model", cfg.llm.model},
          {"temperature", cfg.llm.temperature},
          {"api_key_env", cfg.llm.api_key_env},
          {"max_attempts", cfg.llm.max_attempts},
          {"initial_backoff_ms", cfg.llm.initial_backoff_ms},
          {"request_timeout_s", cfg.llm.request_timeout_s}}},
        {"jobs", cfg.jobs},
    };
}

const SourceUnit* ProjectContext::find_unit(const std::string& qualified_name) const {
    for (const auto& unit : source_units) {
        if (unit.qualified_name == qualified_name) return &unit;
    }
    return nullptr;
}

void validate_project(const ProjectContext& project, const std::vector<std::string>& known_toolchains) {
    std::set<std::string> paths;
    for (const auto& unit : project.source_units) {
        if (!paths.insert(unit.path).second) throw InvalidConfig("sources", "duplicate path " + unit.path);
    }
    if (std::find(known_toolchains.begin(), known_toolchains.end(), project.toolchain_id) ==
        known_toolchains.end()) {
        throw InvalidConfig("toolchain", "no adapter registered as '" + project.toolchain_id + "'");
    }
}

} // namespace testmend
