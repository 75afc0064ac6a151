#include "testmend/eval/filter.hpp"

#include <set>

namespace testmend {

TestSuite filter_invalid(const TestSuite& suite, const CompileOutcome& outcome) {
    if (outcome.success) return suite;
    TestSuite out = suite;
    bool everything = outcome.diagnostics.empty();
    std::set<std::string> broken;
    for (const auto& d : outcome.diagnostics) {
        if (d.file_level()) everything = true;
        else broken.insert(*d.test_name);
    }
    for (auto& c : out.cases) {
        if (everything || broken.count(c.name)) c.status = TestStatus::removed;
    }
    for (auto& h : out.helper_methods) {
        if (everything || broken.count(h.name)) h.removed = true;
    }
    return out;
}

namespace {

bool has_members(const TestSuite& s) {
    if (s.active_case_count() > 0) return true;
    for (const auto& h : s.helper_methods) {
        if (!h.removed) return true;
    }
    return false;
}

} // namespace

FilteredSuite filter_until_compiles(const TestSuite& suite, ToolchainAdapter& adapter, const ProjectContext& project) {
    FilteredSuite out{suite, adapter.compile(suite, project)};
    while (!out.outcome.success && has_members(out.suite)) {
        TestSuite next = filter_invalid(out.suite, out.outcome);
        if (next == out.suite) break; // nothing attributable left to remove
        out.suite = std::move(next);
        out.outcome = adapter.compile(out.suite, project);
    }
    return out;
}

} // namespace testmend
