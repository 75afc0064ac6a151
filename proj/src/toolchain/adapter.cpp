#include "testmend/toolchain/adapter.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "testmend/core/errors.hpp"
#include "testmend/core/lexer.hpp"
#include "testmend/toolchain/mock_adapter.hpp"
#include "testmend/toolchain/process_adapter.hpp"

namespace testmend {

const TestOutcome* TestRunResult::find(const std::string& name) const {
    for (const auto& t : tests) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

std::size_t TestRunResult::count(Verdict verdict) const {
    return static_cast<std::size_t>(
        std::count_if(tests.begin(), tests.end(), [&](const TestOutcome& t) { return t.verdict == verdict; }));
}

std::string to_string(Verdict verdict) {
    switch (verdict) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::error: return "error";
    }
    return "error";
}

Verdict verdict_from_string(const std::string& text) {
    if (text == "pass") return Verdict::pass;
    if (text == "fail") return Verdict::fail;
    if (text == "error") return Verdict::error;
    throw ParseFailure("unknown verdict '" + text + "'");
}

namespace {

bool is_assertion_error(const std::string& type) {
    auto simple = simple_type_name(type);
    return simple == "AssertionFailedError" || simple == "AssertionError" || simple == "ComparisonFailure" ||
           simple == "MultipleFailuresError";
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

ObservedState parse_failure_log(const std::string& log, const std::string& test_class) {
    ObservedState obs;
    if (log.empty()) return obs;
    std::string first = log.substr(0, log.find('\n'));

    static const std::regex header(R"(^([A-Za-z_$][\w$.]*)(:\s?(.*))?$)");
    std::smatch m;
    std::string type;
    if (std::regex_match(first, m, header)) type = m[1].str();

    static const std::regex wrong_type(R"(Unexpected exception type thrown,? expected: <(.*?)> but was: <(.*)>)");
    static const std::regex pair(R"(expected: <(.*?)> but was: <(.*)>)");
    static const std::regex not_null(R"(expected: not <null>)");
    static const std::regex none_thrown(R"(Expected (\S+) to be thrown, but nothing was thrown)");
    static const std::regex unexpected(R"(Unexpected exception thrown: ([A-Za-z_$][\w$.]*))");

    if (std::regex_search(first, m, wrong_type)) {
        obs.expected_text = m[1].str();
        obs.actual_text = m[2].str();
        obs.thrown_exception = m[2].str();
    } else if (std::regex_search(first, m, pair)) {
        obs.expected_text = m[1].str();
        obs.actual_text = m[2].str();
    } else if (std::regex_search(first, m, not_null)) {
        obs.expected_text = "not null";
        obs.actual_text = "null";
    } else if (std::regex_search(first, m, none_thrown)) {
        obs.expected_text = m[1].str();
    } else if (std::regex_search(first, m, unexpected)) {
        obs.thrown_exception = m[1].str();
    } else if (!type.empty() && !is_assertion_error(type) &&
               (type.find('.') != std::string::npos || ends_with(type, "Exception") || ends_with(type, "Error") ||
                ends_with(type, "Throwable"))) {
        obs.thrown_exception = type;
    }

    std::string cls = test_class.empty() ? std::string(R"([\w$]+)") : test_class;
    std::regex frame("at (?:[\\w$]+\\.)*" + cls + "\\.[\\w$]+\\([\\w$]+\\.java:(\\d+)\\)");
    if (std::regex_search(log, m, frame)) obs.failure_line = static_cast<std::size_t>(std::stoul(m[1].str()));
    return obs;
}

void locate_failure(const RenderedSuite& rendered, const TestCase& test, ObservedState& observed) {
    if (!observed.failure_line) return;
    const MemberLayout* layout = rendered.find_test(test.name);
    if (!layout) return;
    auto statements = split_statements(test.body_text);
    for (std::size_t i = 0; i < statements.size(); ++i) {
        const auto& s = statements[i];
        auto first = static_cast<std::size_t>(lex::line_of(rendered.text, layout->body.begin + s.span.begin));
        auto last = static_cast<std::size_t>(lex::line_of(rendered.text, layout->body.begin + s.span.end - 1));
        if (*observed.failure_line < first || *observed.failure_line > last) continue;
        observed.statement_index = i;
        for (std::size_t k = 0; k < test.assertions.size(); ++k) {
            if (test.assertions[k].span == s.span) observed.failing_assertion_index = k;
        }
        return;
    }
}

std::size_t compiling_test_count(const TestSuite& suite, const CompileOutcome& outcome) {
    std::set<std::string> broken;
    for (const auto& d : outcome.diagnostics) {
        if (d.file_level()) return 0;
        broken.insert(*d.test_name);
    }
    if (!outcome.success && outcome.diagnostics.empty()) return 0;
    std::size_t n = 0;
    for (const auto& c : suite.cases) {
        if (!c.removed() && !broken.count(c.name)) ++n;
    }
    return n;
}

std::vector<std::string> registered_toolchains() { return {"mock", "process"}; }

std::unique_ptr<ToolchainAdapter> make_toolchain(const ProjectContext& project) {
    if (project.toolchain_id == "mock") return std::make_unique<MockAdapter>(project);
    if (project.toolchain_id == "process") return std::make_unique<ProcessAdapter>(project);
    throw InvalidConfig("toolchain", "no adapter registered as '" + project.toolchain_id + "'");
}

} // namespace testmend
