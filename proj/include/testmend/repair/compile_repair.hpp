#pragma once

// Breadth-first compilation repair: import rules on the whole file, then one
// prompt each for constructor context, invocation context and the call-graph
// neighborhood, with an error-log prompt after any round that changed the
// suite but left it broken. The best suite seen so far (by compiling tests)
// is kept.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "testmend/generation/generation.hpp"
#include "testmend/index/call_graph.hpp"
#include "testmend/index/symbol_index.hpp"
#include "testmend/toolchain/adapter.hpp"

namespace testmend {

enum class RepairStep {
    rule_import_add,
    rule_import_prune,
    prompt_constructors,
    prompt_invocations,
    prompt_callgraph,
    prompt_errorlog,
    prompt_null_hint,
};

std::string to_string(RepairStep step);
RepairStep repair_step_from_string(const std::string& text);

struct RepairAction {
    RepairStep step = RepairStep::rule_import_add;
    std::string before_fingerprint;
    std::string after_fingerprint;
    bool accepted = false;
    std::size_t diagnostics_before = 0;
    std::size_t diagnostics_after = 0;
    std::string note;

    bool operator==(const RepairAction&) const = default;
};

void to_json(nlohmann::json& j, const RepairAction& v);
void from_json(const nlohmann::json& j, RepairAction& v);

using ActionSink = std::function<void(const nlohmann::json&)>;

/// Adds imports for unresolved simple names that have exactly one candidate.
std::pair<TestSuite, std::vector<RepairAction>> fix_missing_imports(const TestSuite& suite,
                                                                    const std::vector<Diagnostic>& diagnostics,
                                                                    const SymbolIndex& index);

/// Removes imports naming types that neither the index nor the classpath knows.
std::pair<TestSuite, std::vector<RepairAction>> prune_hallucinated_imports(const TestSuite& suite,
                                                                           const SymbolIndex& index);

/// Simple type names a diagnostic reports as unresolved, if any.
std::optional<std::string> unresolved_type_name(const Diagnostic& d);

/// Prompt texts for the retrieval rounds; empty when the step does not apply.
std::string constructor_context(const std::vector<Diagnostic>& diagnostics, const SymbolIndex& index);
std::string invocation_context(const std::vector<Diagnostic>& diagnostics, const SymbolIndex& index,
                               const std::string& test_file);
std::string callgraph_context(const std::vector<NeighborEntry>& neighborhood);
/// True when the log shows an ambiguous call that a null argument causes.
bool needs_null_hint(const CompileOutcome& outcome);

enum class RepairMode { full, plain };

struct CompileRepairInput {
    const ProjectContext& project;
    ToolchainAdapter& adapter;
    const SymbolIndex& index;
    const CallGraph& graph;
    const GenerationTarget& target;
    const PipelineConfig& config;
    RepairMode mode = RepairMode::full;
    ActionSink sink; // optional
};

struct CompileRepairResult {
    TestSuite suite;
    CompileOutcome outcome;
    std::vector<RepairAction> actions;
};

CompileRepairResult run_compile_repair(LlmContext& ctx, ChatSession& session, const TestSuite& suite,
                                       const CompileRepairInput& input);

/// Rendered test file name ("FooTest.java") of a suite.
std::string test_file_name(const TestSuite& suite);

} // namespace testmend
