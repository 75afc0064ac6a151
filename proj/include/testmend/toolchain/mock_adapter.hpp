#pragma once

// Deterministic in-process toolchain. Compilation checks the test class
// against the project's symbol index; execution and coverage are driven by
// facts declared in the project manifest. A MockScript can override the
// outcome for specific suite texts.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "testmend/index/symbol_index.hpp"
#include "testmend/toolchain/adapter.hpp"

namespace testmend {

struct ScriptedVerdict {
    Verdict verdict = Verdict::pass;
    std::string log;
};

struct MockRule {
    std::optional<std::string> fingerprint; // suite_fingerprint of the rendered text
    std::optional<std::string> contains;    // substring of the rendered text
    std::optional<CompileOutcome> compile;
    std::optional<std::map<std::string, ScriptedVerdict>> run; // per test name
    Verdict run_default = Verdict::pass;                        // for tests absent from `run`
    std::optional<CoverageReport> coverage;
};

struct MockScript {
    std::vector<MockRule> rules;
    std::optional<MockRule> default_response; // absent: simulate

    /// First rule whose fingerprint or substring matches, else the default, else nullptr.
    const MockRule* match(const std::string& rendered_text, const std::string& fingerprint) const;

    static MockScript from_json(const nlohmann::json& j);
};

struct CoverageTrigger {
    int line = 0;
    std::vector<std::string> triggers;
};

struct BranchTrigger {
    BranchRef branch;
    std::vector<std::string> triggers;
};

struct UnitCoverageFacts {
    std::size_t lines_total = 0;
    std::vector<CoverageTrigger> lines;
    std::vector<BranchTrigger> branches;
};

/// Runtime behavior of the project as seen by tests. Keys are expressions (or
/// substrings of statements) compared with all whitespace removed.
struct MockRuntime {
    std::map<std::string, std::string> values; // expression -> literal it evaluates to
    std::map<std::string, std::string> throws;  // expression -> "pkg.ExceptionType[: message]"
    std::map<std::string, std::string> fails;   // substring of an opaque assertion -> failure message
    std::vector<std::string> timeouts;          // statement substrings that never finish
    std::map<std::string, UnitCoverageFacts> coverage;

    static MockRuntime from_json(const nlohmann::json& j);
};

class MockAdapter : public ToolchainAdapter {
public:
    /// Reads `runtime`, `coverage` and `script` sections of project.toolchain_settings.
    explicit MockAdapter(const ProjectContext& project);
    MockAdapter(const ProjectContext& project, MockScript script);

    std::string id() const override { return "mock"; }
    CompileOutcome compile(const TestSuite& suite, const ProjectContext& project) override;
    TestRunResult run_tests(const TestSuite& suite, const ProjectContext& project) override;
    CoverageReport measure_coverage(const std::vector<TestSuite>& suites, const ProjectContext& project) override;
    std::unique_ptr<ToolchainAdapter> for_session(const std::string& session_id) const override;

    const SymbolIndex& index() const { return state_->index; }

    /// Index-driven compile check without script overrides.
    CompileOutcome simulate_compile(const TestSuite& suite) const;
    TestRunResult simulate_run(const TestSuite& suite) const;
    CoverageReport simulate_coverage(const std::vector<TestSuite>& suites) const;

private:
    struct State {
        SymbolIndex index;
        MockRuntime runtime;
        MockScript script;
        std::vector<std::string> unit_names; // units with coverage totals
    };
    std::shared_ptr<const State> state_;

    CoverageReport empty_coverage() const;
};

} // namespace testmend
