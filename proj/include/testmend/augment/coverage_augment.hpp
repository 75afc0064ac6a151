#pragma once

// Second generation cycle aimed at branches the first suite missed. It runs in
// a fresh chat, goes through the same compile and oracle repair, and its
// passing tests are merged into the first suite.

#include <optional>
#include <string>

#include "testmend/generation/generation.hpp"
#include "testmend/repair/compile_repair.hpp"
#include "testmend/repair/oracle_repair.hpp"

namespace testmend {

/// One line per uncovered branch of `unit`, ordered by (file, line, ordinal):
/// "<file>:<line> branch <ordinal>: <condition>". Empty when all are covered.
std::string uncovered_branch_digest(const CoverageReport& report, const std::string& unit);

struct AugmentInput {
    const ProjectContext& project;
    ToolchainAdapter& adapter;
    const SymbolIndex& index;
    const CallGraph& graph;
    const GenerationTarget& target;
    const PipelineConfig& config;
    ActionSink sink; // optional
};

struct AugmentResult {
    std::optional<TestSuite> suite; // absent when the model produced nothing usable
    std::size_t generated = 0;      // active tests in the raw augmentation suite
    std::size_t compiling = 0;
    std::size_t passing = 0;
    std::vector<RepairAction> compile_actions;
    std::vector<OracleAction> oracle_actions;
    std::string error;
};

/// One augmentation cycle in `session` (expected to be fresh). Precondition: non-empty digest.
AugmentResult augment(LlmContext& ctx, ChatSession& session, const TestSuite& existing, const std::string& digest,
                      const AugmentInput& input);

/// Passing tests of both suites; later name collisions get "_2", "_3", ...;
/// cases identical to one already taken are dropped. Imports, scaffolding lines
/// and helpers of `b` are added to `a`'s. Throws TargetMismatch.
TestSuite merge_suites(const TestSuite& a, const TestSuite& b);

} // namespace testmend
