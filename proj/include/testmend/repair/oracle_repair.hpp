#pragma once

// Oracle repair for compiling suites. Rule stages rewrite failing assertions
// from observed behavior; whatever stays red goes to a bounded LLM loop.
// Every patch is recompiled and reverted if it breaks the build.

#include <string>
#include <vector>

#include <json.hpp>

#include "testmend/generation/generation.hpp"
#include "testmend/repair/compile_repair.hpp"
#include "testmend/toolchain/adapter.hpp"

namespace testmend {

enum class OracleStep { substitute_literal, invert_predicate, exceptionize, invert_exception, llm_fix };

std::string to_string(OracleStep step);

struct OracleAction {
    OracleStep step = OracleStep::substitute_literal;
    std::string test_name; // empty for suite-wide LLM rounds
    std::string before_fingerprint;
    std::string after_fingerprint;
    bool accepted = false;
    std::size_t passing_before = 0;
    std::size_t passing_after = 0;
    std::string note;

    bool operator==(const OracleAction&) const = default;
};

void to_json(nlohmann::json& j, const OracleAction& v);

/// Replaces the expected literal with the observed value, keeping the literal's syntax class.
/// Returns the assertion unchanged unless it is an equality with an observed actual value.
/// Throws UnparseableLiteral when the value cannot be written in that class.
AssertionModel substitute_literal(const AssertionModel& assertion, const ObservedState& observed);

/// assertTrue <-> assertFalse, assertNull <-> assertNotNull. Other kinds are returned unchanged.
AssertionModel invert_predicate(const AssertionModel& assertion);

/// assertThrows -> assertDoesNotThrow. Throws OpaqueOracle for unrecognized forms.
AssertionModel invert_exception_assertion(const AssertionModel& assertion);

/// Rewrites `test` to expect `thrown`: the statement that threw (or, without one,
/// the last assertion or final statement) and everything after it becomes one
/// assertThrows. Blocklisted exceptions leave the test unchanged with status failing.
/// `preamble` decides whether the simple type name is visible.
TestCase exceptionize(const TestCase& test, const std::string& thrown, const std::vector<std::string>& blocklist,
                      const ObservedState& observed = {}, const std::string& preamble = {});

bool is_blocklisted(const std::string& thrown, const std::vector<std::string>& blocklist);

struct OracleRepairInput {
    const ProjectContext& project;
    ToolchainAdapter& adapter;
    const PipelineConfig& config;
    ActionSink sink; // optional
};

struct OracleRepairResult {
    TestSuite suite;
    TestRunResult run;
    std::vector<OracleAction> actions;
};

/// LLM stage alone: at most config.max_oracle_llm_iterations prompts.
OracleRepairResult llm_fix_oracles(LlmContext& ctx, ChatSession& session, const TestSuite& suite,
                                   const TestRunResult& run, const OracleRepairInput& input);

/// Rules first, then the LLM stage. Expects a compiling suite; returns one that compiles.
OracleRepairResult run_oracle_repair(LlmContext* ctx, ChatSession* session, const TestSuite& suite,
                                     const OracleRepairInput& input);

/// Sets passing/failing status from a run.
void apply_run_status(TestSuite& suite, const TestRunResult& run);

} // namespace testmend
