#pragma once

// Drives targets through the stages and writes the output tree. Session ids
// are "<mode>/<granularity>/<target id>"; the augmentation cycle of a target
// runs in "<session id>/augment".

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "testmend/app/persistence.hpp"
#include "testmend/eval/report.hpp"
#include "testmend/generation/generation.hpp"
#include "testmend/index/call_graph.hpp"
#include "testmend/index/symbol_index.hpp"
#include "testmend/llm/scripted_backend.hpp"
#include "testmend/toolchain/adapter.hpp"

namespace testmend {

/// Timestamp written into transcripts by offline backends, so reruns are byte-identical.
inline constexpr const char* offline_timestamp = "1970-01-01T00:00:00Z";

struct RunOptions {
    std::string out_dir;                   // empty: nothing is written
    std::optional<std::string> record_dir; // save the whole transcript here
    std::optional<std::string> replay_path; // transcript file or a directory holding transcript.jsonl
    std::optional<std::string> responses_path; // scripted backend answers
    std::shared_ptr<Backend> backend;       // overrides the configured backend (tests)
    bool use_index_cache = false;           // read/write <root>/.testmend/index-<hash>.json
    std::function<void(const std::string&)> log; // progress lines; optional
};

/// Read-only state shared by every target of a run.
struct PipelineEnv {
    const ProjectContext& project;
    const ToolchainAdapter& adapter; // prototype; each target works on for_session()
    const SymbolIndex& index;
    const CallGraph& graph;
    const PipelineConfig& config;
};

struct TargetRun {
    TargetArtifacts artifacts;
    std::string session_id;
};

/// Units under test: project.targets, or every concrete class, sorted.
std::vector<const SourceUnit*> select_units(const ProjectContext& project);
/// Class target per unit, or one target per non-private method.
std::vector<GenerationTarget> select_targets(const ProjectContext& project, Granularity granularity);

std::string session_id_for(const std::string& mode, const GenerationTarget& target);

/// generation -> compile repair -> filter -> oracle repair -> augmentation.
TargetRun run_full_target(Gateway& gateway, const TemplateSet& templates, const PipelineEnv& env,
                          const GenerationTarget& target);
/// One prompt, import rules and raw error-log rounds; no oracle repair or augmentation.
TargetRun run_plain_target(Gateway& gateway, const TemplateSet& templates, const PipelineEnv& env,
                           const GenerationTarget& target);

/// Joins class and method suites of one unit into a class-level suite.
TargetRun combine_unit(const PipelineEnv& env, const SourceUnit& unit, const std::vector<const TargetRun*>& parts);

/// Answers keyed by session id, either in call order or per ledger phase:
///   {"<session>": ["first", "second"]} or {"<session>": {"<phase>": ["first", ...]}}
/// An answer starting with "@" names a file relative to `base_dir`.
ScriptedBackend::Responder scripted_responder(const nlohmann::json& responses, const std::string& base_dir = {});

/// Builds the backend named by config.llm_backend unless options supply one.
/// Throws InvalidConfig for missing replay/response files or API key.
std::shared_ptr<Backend> make_backend(const PipelineConfig& config, const RunOptions& options);

struct RunOutput {
    std::vector<RunSummary> summaries;
    std::size_t failed_targets = 0;
    std::vector<TargetRun> targets; // in summary order
};

/// Full pipeline; granularity `both` also yields the combined summary.
RunOutput cmd_generate(const ProjectContext& project, const RunOptions& options);
/// Baseline pipeline.
RunOutput cmd_plain(const ProjectContext& project, const RunOptions& options);

/// Compares the first summary against each later one and writes the report
/// into `out_dir`. Throws InvalidConfig with fewer than two summaries and
/// MismatchedTargets when target sets differ.
std::vector<Comparison> cmd_evaluate(const std::vector<RunSummary>& summaries, const std::string& out_dir);

} // namespace testmend
