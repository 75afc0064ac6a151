#include "testmend/core/model.hpp"

#include <algorithm>

#include "testmend/core/errors.hpp"

namespace testmend {

std::string ImportRef::simple_name() const {
    if (wildcard) return {};
    auto dot = qualified_name.rfind('.');
    return dot == std::string::npos ? qualified_name : qualified_name.substr(dot + 1);
}

std::string ImportRef::render() const {
    std::string out = "import ";
    if (is_static) out += "static ";
    out += qualified_name;
    if (wildcard) out += ".*";
    out += ";";
    return out;
}

std::string SourceUnit::package_name() const {
    auto dot = qualified_name.rfind('.');
    return dot == std::string::npos ? std::string{} : qualified_name.substr(0, dot);
}

std::string SourceUnit::simple_name() const {
    auto dot = qualified_name.rfind('.');
    return dot == std::string::npos ? qualified_name : qualified_name.substr(dot + 1);
}

bool status_transition_allowed(TestStatus from, TestStatus to) {
    if (from == TestStatus::removed) return to == TestStatus::removed;
    if (to == TestStatus::removed || from == to) return true;
    switch (from) {
    case TestStatus::unbuilt: return to == TestStatus::compiling;
    case TestStatus::compiling: return to == TestStatus::passing || to == TestStatus::failing;
    case TestStatus::passing:
    case TestStatus::failing: return to == TestStatus::compiling;
    case TestStatus::removed: return false;
    }
    return false;
}

TestCase TestCase::with_status(TestStatus next) const {
    if (!status_transition_allowed(status, next)) {
        throw InvalidState("test " + name + ": illegal status change " + to_string(status) + " -> " +
                           to_string(next));
    }
    TestCase copy = *this;
    copy.status = next;
    return copy;
}

std::string TargetRef::id() const {
    if (!method_signature) return unit;
    return unit + "#" + *method_signature;
}

std::size_t TestSuite::active_case_count() const {
    return static_cast<std::size_t>(
        std::count_if(cases.begin(), cases.end(), [](const TestCase& c) { return !c.removed(); }));
}

const TestCase* TestSuite::find_case(const std::string& name) const {
    for (const auto& c : cases) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

TestCase* TestSuite::find_case(const std::string& name) {
    for (auto& c : cases) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

std::vector<BranchRef> UnitCoverage::uncovered_branches() const {
    std::vector<BranchRef> out;
    for (const auto& b : branches) {
        if (!covered_branches.count(b)) out.push_back(b);
    }
    return out;
}

std::size_t CoverageReport::lines_covered() const {
    std::size_t n = 0;
    for (const auto& [_, u] : units) n += u.lines_covered();
    return n;
}

std::size_t CoverageReport::lines_total() const {
    std::size_t n = 0;
    for (const auto& [_, u] : units) n += u.lines_total;
    return n;
}

std::size_t CoverageReport::branches_covered() const {
    std::size_t n = 0;
    for (const auto& [_, u] : units) n += u.branches_covered();
    return n;
}

std::size_t CoverageReport::branches_total() const {
    std::size_t n = 0;
    for (const auto& [_, u] : units) n += u.branches_total();
    return n;
}

std::vector<BranchRef> CoverageReport::uncovered_branches() const {
    std::vector<BranchRef> out;
    for (const auto& [_, u] : units) {
        auto part = u.uncovered_branches();
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

CoverageReport CoverageReport::only(const std::string& unit) const {
    CoverageReport out;
    auto it = units.find(unit);
    out.units[unit] = it == units.end() ? UnitCoverage{} : it->second;
    return out;
}

std::string to_string(UnitKind kind) {
    switch (kind) {
    case UnitKind::class_type: return "class";
    case UnitKind::interface_type: return "interface";
    case UnitKind::abstract_type: return "abstract";
    case UnitKind::other: return "other";
    }
    return "other";
}

std::string to_string(Visibility visibility) {
    switch (visibility) {
    case Visibility::public_access: return "public";
    case Visibility::private_access: return "private";
    case Visibility::protected_access: return "protected";
    case Visibility::internal: return "internal";
    }
    return "internal";
}

std::string to_string(AssertionKind kind) {
    switch (kind) {
    case AssertionKind::equality: return "equality";
    case AssertionKind::truth: return "truth";
    case AssertionKind::nullness: return "nullness";
    case AssertionKind::exception_expected: return "exception_expected";
    case AssertionKind::exception_absent: return "exception_absent";
    case AssertionKind::opaque: return "opaque";
    }
    return "opaque";
}

std::string to_string(TestStatus status) {
    switch (status) {
    case TestStatus::unbuilt: return "unbuilt";
    case TestStatus::compiling: return "compiling";
    case TestStatus::passing: return "passing";
    case TestStatus::failing: return "failing";
    case TestStatus::removed: return "removed";
    }
    return "unbuilt";
}

std::string to_string(Granularity granularity) {
    return granularity == Granularity::class_level ? "class" : "method";
}

std::string to_string(DiagnosticKind kind) {
    switch (kind) {
    case DiagnosticKind::missing_import: return "missing_import";
    case DiagnosticKind::unknown_symbol: return "unknown_symbol";
    case DiagnosticKind::unknown_method: return "unknown_method";
    case DiagnosticKind::signature_mismatch: return "signature_mismatch";
    case DiagnosticKind::ambiguous_overload: return "ambiguous_overload";
    case DiagnosticKind::whole_file: return "whole_file";
    case DiagnosticKind::other: return "other";
    }
    return "other";
}

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(const std::string& text, const Enum (&values)[N], const char* what) {
    for (Enum v : values) {
        if (to_string(v) == text) return v;
    }
    throw ParseFailure(std::string("unknown ") + what + " '" + text + "'");
}

} // namespace

UnitKind unit_kind_from_string(const std::string& text) {
    static const UnitKind all[] = {UnitKind::class_type, UnitKind::interface_type, UnitKind::abstract_type,
                                   UnitKind::other};
    return parse_enum(text, all, "unit kind");
}

Visibility visibility_from_string(const std::string& text) {
    static const Visibility all[] = {Visibility::public_access, Visibility::private_access,
                                     Visibility::protected_access, Visibility::internal};
    return parse_enum(text, all, "visibility");
}

AssertionKind assertion_kind_from_string(const std::string& text) {
    static const AssertionKind all[] = {AssertionKind::equality,           AssertionKind::truth,
                                        AssertionKind::nullness,           AssertionKind::exception_expected,
                                        AssertionKind::exception_absent,   AssertionKind::opaque};
    return parse_enum(text, all, "assertion kind");
}

TestStatus test_status_from_string(const std::string& text) {
    static const TestStatus all[] = {TestStatus::unbuilt, TestStatus::compiling, TestStatus::passing,
                                     TestStatus::failing, TestStatus::removed};
    return parse_enum(text, all, "test status");
}

Granularity granularity_from_string(const std::string& text) {
    static const Granularity all[] = {Granularity::class_level, Granularity::method_level};
    return parse_enum(text, all, "granularity");
}

DiagnosticKind diagnostic_kind_from_string(const std::string& text) {
    static const DiagnosticKind all[] = {DiagnosticKind::missing_import,     DiagnosticKind::unknown_symbol,
                                         DiagnosticKind::unknown_method,     DiagnosticKind::signature_mismatch,
                                         DiagnosticKind::ambiguous_overload, DiagnosticKind::whole_file,
                                         DiagnosticKind::other};
    return parse_enum(text, all, "diagnostic kind");
}

} // namespace testmend
