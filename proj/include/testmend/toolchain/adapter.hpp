#pragma once

#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "testmend/core/config.hpp"
#include "testmend/core/model.hpp"
#include "testmend/toolchain/test_syntax.hpp"

namespace testmend {

struct CompileOutcome {
    bool success = false;
    std::vector<Diagnostic> diagnostics;
    std::string raw_log;
};

enum class Verdict { pass, fail, error };

struct ObservedState {
    std::optional<std::size_t> failing_assertion_index;
    std::optional<std::string> expected_text;
    std::optional<std::string> actual_text;
    std::optional<std::string> thrown_exception;
    std::optional<std::size_t> failure_line; // line in the rendered test file
    std::optional<std::size_t> statement_index; // top-level statement the failure points at
};

struct TestOutcome {
    std::string name;
    Verdict verdict = Verdict::pass;
    std::string failure_log;
    ObservedState observed;
};

struct TestRunResult {
    std::vector<TestOutcome> tests;

    const TestOutcome* find(const std::string& name) const;
    std::size_t count(Verdict verdict) const;
};

std::string to_string(Verdict verdict);
Verdict verdict_from_string(const std::string& text);

/// Ordered regex → kind table; the first match wins, no match yields `other`.
class DiagnosticPatternTable {
public:
    DiagnosticPatternTable() = default;
    void add(const std::string& pattern, DiagnosticKind kind);
    DiagnosticKind classify(const std::string& raw) const;

private:
    std::vector<std::pair<std::regex, DiagnosticKind>> rules_;
};

/// Patterns for the normalized messages of the mock toolchain and javac-style output.
const DiagnosticPatternTable& default_pattern_table();

/// Total classifier over the default table.
DiagnosticKind classify_diagnostic(const std::string& raw);

/// Parses a JUnit-style failure log (expected/actual pair, thrown type, failing line).
/// `test_class` narrows the stack frame search; statement/assertion indices are left empty.
ObservedState parse_failure_log(const std::string& log, const std::string& test_class);

/// Fills statement_index and failing_assertion_index from failure_line using the rendered layout.
void locate_failure(const RenderedSuite& rendered, const TestCase& test, ObservedState& observed);

/// Number of active test cases that have no attributed diagnostic; 0 when any diagnostic is
/// file-level or the compile result carries errors nothing can be attributed to.
std::size_t compiling_test_count(const TestSuite& suite, const CompileOutcome& outcome);

class ToolchainAdapter {
public:
    virtual ~ToolchainAdapter() = default;

    virtual std::string id() const = 0;
    virtual CompileOutcome compile(const TestSuite& suite, const ProjectContext& project) = 0;
    /// Throws NotCompiled when the suite does not compile.
    virtual TestRunResult run_tests(const TestSuite& suite, const ProjectContext& project) = 0;
    virtual CoverageReport measure_coverage(const std::vector<TestSuite>& suites,
                                            const ProjectContext& project) = 0;
    /// A copy that works in a session-private workspace.
    virtual std::unique_ptr<ToolchainAdapter> for_session(const std::string& session_id) const = 0;
};

std::vector<std::string> registered_toolchains();

/// Builds the adapter named by project.toolchain_id. Throws InvalidConfig for unknown names.
std::unique_ptr<ToolchainAdapter> make_toolchain(const ProjectContext& project);

} // namespace testmend
