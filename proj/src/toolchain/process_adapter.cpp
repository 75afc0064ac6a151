#include "testmend/toolchain/process_adapter.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "testmend/core/errors.hpp"
#include "testmend/core/hash.hpp"
#include "testmend/core/lexer.hpp"
#include "testmend/core/serialize.hpp"

namespace fs = std::filesystem;

namespace testmend {

namespace {

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "'\\''";
        else out.push_back(c);
    }
    return out + "'";
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool program_available(const std::string& command) {
    std::istringstream in(command);
    std::string program;
    in >> program;
    if (program.empty()) return false;
    if (program.find('/') != std::string::npos) return ::access(program.c_str(), X_OK) == 0;
    const char* path = std::getenv("PATH");
    std::istringstream dirs(path ? path : "");
    std::string dir;
    while (std::getline(dirs, dir, ':')) {
        if (dir.empty()) continue;
        if (::access((fs::path(dir) / program).c_str(), X_OK) == 0) return true;
    }
    // Shell builtins such as `true` or `exit` still work without a binary.
    return program == "true" || program == "false" || program == "exit" || program == "echo" || program == ":";
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
    for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
        s.replace(pos, from.size(), to);
}

} // namespace

CommandResult run_shell(const std::string& command, const fs::path& cwd) {
    char tmpl[] = "/tmp/testmend-outXXXXXX";
    int fd = ::mkstemp(tmpl);
    if (fd < 0) throw IOFailure("cannot create a capture file for: " + command);
    ::close(fd);
    const std::string full = "cd " + shell_quote(cwd.string()) + " && ( " + command + " ) > " +
                             shell_quote(tmpl) + " 2>&1";
    int status = std::system(full.c_str());
    CommandResult out;
    out.output = read_file(tmpl);
    fs::remove(tmpl);
    if (status == -1) throw ToolchainUnavailable("cannot start /bin/sh for: " + command);
    out.exit_status = WIFEXITED(status) ? WEXITSTATUS(status) : 128;
    return out;
}

std::vector<Diagnostic> parse_compiler_log(const std::string& log, const DiagnosticPatternTable& table) {
    static const std::regex line_re(R"(^(.*?):(\d+):\s*error:\s*(.*)$)");
    std::vector<Diagnostic> out;
    std::istringstream in(log);
    std::string line;
    while (std::getline(in, line)) {
        std::smatch m;
        if (!std::regex_match(line, m, line_re)) continue;
        Diagnostic d;
        d.path = m[1].str();
        d.line = static_cast<std::size_t>(std::stoul(m[2].str()));
        d.message = lex::trim(m[3].str());
        d.kind = table.classify(d.message);
        out.push_back(std::move(d));
    }
    return out;
}

TestRunResult parse_result_protocol(const std::string& output) {
    static const std::regex result_re(R"(^RESULT\s+(\S+)\s+(pass|fail|error)\s*$)");
    TestRunResult out;
    std::istringstream in(output);
    std::string line;
    TestOutcome* current = nullptr;
    while (std::getline(in, line)) {
        std::smatch m;
        if (std::regex_match(line, m, result_re)) {
            TestOutcome o;
            o.name = m[1].str();
            o.verdict = verdict_from_string(m[2].str());
            out.tests.push_back(std::move(o));
            current = &out.tests.back();
            continue;
        }
        if (current && current->verdict != Verdict::pass) current->failure_log += line + "\n";
    }
    return out;
}

ProcessAdapter::ProcessAdapter(const ProjectContext& project) : workspace_(project.root_path) {
    const auto& s = project.toolchain_settings;
    if (!s.is_object() || !s.contains("compile_command"))
        throw InvalidConfig("toolchain_settings.compile_command", "process toolchain needs a compile_command");
    compile_command_ = s["compile_command"].get<std::string>();
    test_command_ = s.value("test_command", std::string{});
    coverage_command_ = s.value("coverage_command", std::string{});
    test_dir_ = s.value("test_dir", std::string("src/test/java"));
    if (s.contains("patterns")) {
        custom_patterns_ = true;
        for (const auto& p : s["patterns"]) {
            patterns_.add(p.at("pattern").get<std::string>(), diagnostic_kind_from_string(p.at("kind").get<std::string>()));
        }
    }
    if (!program_available(compile_command_))
        throw ToolchainUnavailable("program of '" + compile_command_ + "' is not on PATH");
}

std::unique_ptr<ToolchainAdapter> ProcessAdapter::for_session(const std::string& session_id) const {
    auto copy = std::make_unique<ProcessAdapter>(*this);
    fs::path target = fs::temp_directory_path() / ("testmend-ws-" + fingerprint(workspace_.string() + "|" + session_id));
    std::error_code ec;
    fs::remove_all(target, ec);
    fs::create_directories(target);
    fs::copy(workspace_, target, fs::copy_options::recursive | fs::copy_options::overwrite_existing, ec);
    if (ec) throw IOFailure("cannot copy workspace to " + target.string() + ": " + ec.message());
    copy->workspace_ = target;
    return copy;
}

DiagnosticKind ProcessAdapter::classify(const std::string& message) const {
    if (custom_patterns_) {
        auto kind = patterns_.classify(message);
        if (kind != DiagnosticKind::other) return kind;
    }
    return classify_diagnostic(message);
}

fs::path ProcessAdapter::write_suite(const TestSuite& suite) const {
    std::string pkg = preamble_package(suite.preamble);
    std::string cls = preamble_class_name(suite.preamble);
    if (cls.empty()) throw ParseFailure("test class has no name");
    fs::path dir = workspace_ / test_dir_;
    if (!pkg.empty()) {
        std::string rel = pkg;
        std::replace(rel.begin(), rel.end(), '.', '/');
        dir /= rel;
    }
    fs::create_directories(dir);
    fs::path file = dir / (cls + ".java");
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IOFailure("cannot write " + file.string());
    out << render_text(suite);
    return file;
}

void ProcessAdapter::remove_suite(const fs::path& file) const {
    std::error_code ec;
    fs::remove(file, ec);
}

std::string ProcessAdapter::expand(const std::string& command, const TestSuite* suite, const fs::path& file) const {
    std::string out = command;
    replace_all(out, "{workspace}", shell_quote(workspace_.string()));
    replace_all(out, "{test_file}", shell_quote(file.string()));
    if (suite) {
        std::string cls = preamble_class_name(suite->preamble);
        std::string pkg = preamble_package(suite->preamble);
        replace_all(out, "{test_class}", cls);
        replace_all(out, "{qualified_class}", pkg.empty() ? cls : pkg + "." + cls);
    }
    return out;
}

CompileOutcome ProcessAdapter::compile(const TestSuite& suite, const ProjectContext&) {
    auto file = write_suite(suite);
    auto result = run_shell(expand(compile_command_, &suite, file), workspace_);
    remove_suite(file);
    CompileOutcome out;
    out.success = result.exit_status == 0;
    out.raw_log = result.output;
    if (out.success) return out;

    auto rendered = render_suite(suite);
    // Offsets of line starts, for attributing diagnostics to members.
    std::vector<std::size_t> line_start{0};
    for (std::size_t i = 0; i < rendered.text.size(); ++i) {
        if (rendered.text[i] == '\n') line_start.push_back(i + 1);
    }
    const std::string file_name = file.filename().string();
    for (auto d : parse_compiler_log(result.output, patterns_)) {
        d.kind = classify(d.message);
        bool ours = fs::path(d.path).filename().string() == file_name;
        if (ours && d.kind != DiagnosticKind::whole_file && d.line >= 1 && d.line <= line_start.size()) {
            std::size_t offset = line_start[d.line - 1];
            while (offset < rendered.text.size() && (rendered.text[offset] == ' ' || rendered.text[offset] == '\t'))
                ++offset;
            if (const MemberLayout* m = rendered.member_at(offset)) d.test_name = m->name;
        }
        out.diagnostics.push_back(std::move(d));
    }
    return out;
}

TestRunResult ProcessAdapter::run_tests(const TestSuite& suite, const ProjectContext& project) {
    if (test_command_.empty()) throw InvalidConfig("toolchain_settings.test_command", "no test_command configured");
    if (!compile(suite, project).success) throw NotCompiled("suite for " + suite.target.id() + " does not compile");
    auto file = write_suite(suite);
    auto result = run_shell(expand(test_command_, &suite, file), workspace_);
    remove_suite(file);
    auto out = parse_result_protocol(result.output);
    auto rendered = render_suite(suite);
    const std::string cls = preamble_class_name(suite.preamble);
    for (auto& o : out.tests) {
        if (o.verdict == Verdict::pass) continue;
        o.observed = parse_failure_log(o.failure_log, cls);
        if (const TestCase* test = suite.find_case(o.name)) locate_failure(rendered, *test, o.observed);
    }
    return out;
}

CoverageReport ProcessAdapter::measure_coverage(const std::vector<TestSuite>& suites, const ProjectContext&) {
    if (coverage_command_.empty())
        throw InvalidConfig("toolchain_settings.coverage_command", "no coverage_command configured");
    std::vector<fs::path> files;
    for (const auto& s : suites) files.push_back(write_suite(s));
    auto result = run_shell(expand(coverage_command_, nullptr, workspace_ / test_dir_), workspace_);
    for (const auto& f : files) remove_suite(f);
    if (result.exit_status != 0)
        throw ToolchainUnavailable("coverage command failed (status " + std::to_string(result.exit_status) + ")");
    try {
        return nlohmann::json::parse(result.output).get<CoverageReport>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseFailure(std::string("coverage output is not a report: ") + e.what());
    }
}

} // namespace testmend
