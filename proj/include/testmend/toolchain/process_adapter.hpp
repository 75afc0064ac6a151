#pragma once

// Toolchain backed by external commands run through /bin/sh inside a
// workspace copy of the project. Settings (project.toolchain_settings):
//   compile_command   required; exit status 0 means success
//   test_command      prints "RESULT <name> <pass|fail|error>" lines, each
//                     optionally followed by its failure log
//   coverage_command  prints a coverage report as JSON
//   test_dir          where the test file is written (default "src/test/java")
//   patterns          [{pattern, kind}] diagnostic classification overrides
// Commands may use {workspace}, {test_file}, {test_class} and {qualified_class}.

#include <filesystem>
#include <string>

#include "testmend/toolchain/adapter.hpp"

namespace testmend {

struct CommandResult {
    int exit_status = 0;
    std::string output; // stdout and stderr interleaved
};

/// Runs `command` with /bin/sh in `cwd`, capturing its output through a temporary file.
CommandResult run_shell(const std::string& command, const std::filesystem::path& cwd);

/// Parses `path:line: error: message` lines of a compiler log.
std::vector<Diagnostic> parse_compiler_log(const std::string& log, const DiagnosticPatternTable& table);

/// Parses the RESULT protocol of the test command.
TestRunResult parse_result_protocol(const std::string& output);

class ProcessAdapter : public ToolchainAdapter {
public:
    /// Throws InvalidConfig for missing settings, ToolchainUnavailable when the
    /// compile command's program cannot be found.
    explicit ProcessAdapter(const ProjectContext& project);

    std::string id() const override { return "process"; }
    CompileOutcome compile(const TestSuite& suite, const ProjectContext& project) override;
    TestRunResult run_tests(const TestSuite& suite, const ProjectContext& project) override;
    CoverageReport measure_coverage(const std::vector<TestSuite>& suites, const ProjectContext& project) override;
    std::unique_ptr<ToolchainAdapter> for_session(const std::string& session_id) const override;

    const std::filesystem::path& workspace() const { return workspace_; }

private:
    std::filesystem::path workspace_;
    std::string compile_command_;
    std::string test_command_;
    std::string coverage_command_;
    std::string test_dir_;
    DiagnosticPatternTable patterns_;
    bool custom_patterns_ = false;

    std::filesystem::path write_suite(const TestSuite& suite) const;
    void remove_suite(const std::filesystem::path& file) const;
    std::string expand(const std::string& command, const TestSuite* suite, const std::filesystem::path& file) const;
    DiagnosticKind classify(const std::string& message) const;
};

} // namespace testmend
