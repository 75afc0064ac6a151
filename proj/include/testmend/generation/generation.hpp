#pragma once

// Chain-of-thought generation: plan -> private-method enrichment -> coverage
// challenge -> test code. All prompts go through one chat session per target.

#include <optional>
#include <string>
#include <vector>

#include "testmend/core/model.hpp"
#include "testmend/generation/plan.hpp"
#include "testmend/llm/gateway.hpp"
#include "testmend/llm/templates.hpp"
#include "testmend/toolchain/test_syntax.hpp"

namespace testmend {

/// Ledger phase tags.
namespace phase {
inline constexpr const char* plan = "plan";
inline constexpr const char* plan_private = "plan_private";
inline constexpr const char* challenge = "challenge";
inline constexpr const char* generate = "generate";
inline constexpr const char* compile_constructors = "compile_constructors";
inline constexpr const char* compile_invocations = "compile_invocations";
inline constexpr const char* compile_callgraph = "compile_callgraph";
inline constexpr const char* compile_errorlog = "compile_errorlog";
inline constexpr const char* oracle_llm = "oracle_llm";
inline constexpr const char* augment = "augment";
} // namespace phase

/// What every prompting stage needs.
struct LlmContext {
    Gateway& gateway;
    CostLedger& ledger;
    const TemplateSet& templates;
};

struct GenerationTarget {
    const SourceUnit* unit = nullptr;
    std::optional<MethodRef> method; // set for method granularity

    Granularity granularity() const { return method ? Granularity::method_level : Granularity::class_level; }
    TargetRef ref() const;
    /// Name proposed for the generated test class.
    std::string test_class_name() const;
    /// Methods the plan should cover (public API of the unit, or the one method).
    std::vector<MethodRef> plan_methods() const;
    /// Private methods reachable from the target.
    std::vector<MethodRef> private_methods() const;
};

/// Source shown to the model: the whole class, or for a method target the type
/// name, fields, constructor signatures and that one method.
std::string target_source(const GenerationTarget& target);

TestPlan draft_test_plan(LlmContext& ctx, ChatSession& session, const GenerationTarget& target);
TestPlan enrich_plan_private(LlmContext& ctx, ChatSession& session, const TestPlan& plan,
                             const GenerationTarget& target, const std::vector<MethodRef>& private_methods);
TestPlan challenge_plan(LlmContext& ctx, ChatSession& session, const TestPlan& plan, const GenerationTarget& target);
/// Throws ParseFailure, NoCodeFound or EmptySuite.
TestSuite generate_tests(LlmContext& ctx, ChatSession& session, const TestPlan& plan, const GenerationTarget& target);

/// Full chain for one target. The enrichment step runs only when private methods exist.
TestSuite run_generation(LlmContext& ctx, ChatSession& session, const GenerationTarget& target);

/// Fenced code blocks of a response (```java ... ``` or ``` ... ```) in order;
/// without fences, the span from the first package/import/class line to the last brace.
/// Throws NoCodeFound.
std::vector<std::string> extract_code_blocks(const std::string& response);

/// Combines the blocks into one test class and recognizes its members.
/// Blocks without a class declaration are spliced into the first class;
/// further classes contribute their imports, helpers and tests.
ParsedTestClass extract_code(const std::string& response);

/// Builds a suite from a response. Throws EmptySuite when no usable test remains.
TestSuite suite_from_response(const std::string& response, const TargetRef& target, Granularity granularity);

} // namespace testmend
