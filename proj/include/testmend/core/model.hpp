#pragma once

// Domain values shared by every stage of the pipeline. All types are plain
// values; stages produce modified copies instead of mutating shared state.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace testmend {

enum class UnitKind { class_type, interface_type, abstract_type, other };
enum class Visibility { public_access, private_access, protected_access, internal };

struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    bool contains(const Span& other) const { return begin <= other.begin && other.end <= end; }
    bool overlaps(const Span& other) const { return begin < other.end && other.begin < end; }
    bool operator==(const Span&) const = default;
};

struct ImportRef {
    std::string qualified_name;
    bool is_static = false;
    bool wildcard = false;

    /// Simple name of the imported type (last segment), empty for wildcards.
    std::string simple_name() const;
    /// `import [static] a.b.C[.*];`
    std::string render() const;
    bool operator==(const ImportRef&) const = default;
};

struct MethodRef {
    std::string owner;     // qualified name of the declaring type
    std::string name;
    std::string signature; // normalized declaration text, e.g. "public int add(int a, int b)"
    Visibility visibility = Visibility::internal;
    std::optional<std::string> body_text; // full declaration + body; absent for abstract methods
    std::vector<std::string> param_types;
    std::string return_type; // empty for constructors
    bool is_static = false;

    std::size_t arity() const { return param_types.size(); }
    /// Identity key `owner#signature`.
    std::string key() const { return owner + "#" + signature; }
    bool operator==(const MethodRef&) const = default;
};

struct FieldRef {
    std::string type;
    std::string name;
    std::string text;
    bool operator==(const FieldRef&) const = default;
};

struct SourceUnit {
    std::string path; // relative to the project root
    std::string qualified_name;
    UnitKind kind = UnitKind::class_type;
    std::vector<MethodRef> methods;
    std::vector<MethodRef> constructors;
    std::vector<ImportRef> imports;
    std::vector<FieldRef> fields;
    std::vector<std::string> supertypes; // names as written after extends/implements
    std::string body_text;

    std::string package_name() const;
    std::string simple_name() const;
    bool operator==(const SourceUnit&) const = default;
};

enum class AssertionKind { equality, truth, nullness, exception_expected, exception_absent, opaque };

struct AssertionModel {
    AssertionKind kind = AssertionKind::opaque;
    // equality: the expected literal; truth: "true"/"false"; exception_expected: the type name
    std::optional<std::string> expected_literal;
    std::string subject_expr;
    Span span; // byte offsets into the owning test body
    // nullness only: true for assertNull, false for assertNotNull
    bool expects_null = false;
    std::string qualifier;               // e.g. "Assertions." when written qualified
    std::vector<std::string> extra_args; // trailing arguments (message, delta)

    bool operator==(const AssertionModel&) const = default;
};

enum class TestStatus { unbuilt, compiling, passing, failing, removed };

/// True when `from -> to` is a legal status move. `removed` is terminal;
/// passing/failing may go back to compiling when the test body is rebuilt.
bool status_transition_allowed(TestStatus from, TestStatus to);

struct TestCase {
    std::string name;
    std::string body_text; // text between the method braces
    std::string throws_clause; // e.g. "throws Exception", usually empty
    std::vector<AssertionModel> assertions;
    TestStatus status = TestStatus::unbuilt;

    /// Returns a copy in state `next`; throws InvalidState on an illegal move.
    TestCase with_status(TestStatus next) const;
    bool removed() const { return status == TestStatus::removed; }
    bool operator==(const TestCase&) const = default;
};

struct HelperMethod {
    std::string name;
    std::string text; // full declaration including body
    bool removed = false;
    bool operator==(const HelperMethod&) const = default;
};

enum class Granularity { class_level, method_level };

/// What a suite tests: a whole unit, or one method of it (identified by signature).
struct TargetRef {
    std::string unit;
    std::optional<std::string> method_signature;

    bool is_method() const { return method_signature.has_value(); }
    std::string id() const;
    bool operator==(const TargetRef&) const = default;
};

struct TestSuite {
    TargetRef target;
    Granularity granularity = Granularity::class_level;
    std::string preamble; // package, imports, class header and field scaffolding
    std::vector<TestCase> cases;
    std::vector<HelperMethod> helper_methods;

    std::size_t active_case_count() const;
    const TestCase* find_case(const std::string& name) const;
    TestCase* find_case(const std::string& name);
    bool operator==(const TestSuite&) const = default;
};

enum class DiagnosticKind {
    missing_import,
    unknown_symbol,
    unknown_method,
    signature_mismatch,
    ambiguous_overload,
    whole_file,
    other,
};

struct Diagnostic {
    DiagnosticKind kind = DiagnosticKind::other;
    std::string message;
    std::string path;
    std::size_t line = 0;
    Span span;
    std::optional<std::string> test_name; // member the diagnostic belongs to; absent = file level
    std::optional<std::string> symbol;    // type or `Type.method` the message is about

    bool file_level() const { return !test_name.has_value(); }
    bool operator==(const Diagnostic&) const = default;
};

struct BranchRef {
    std::string unit;
    std::string file;
    int line = 0;
    int ordinal = 0;
    std::string condition;

    auto operator<=>(const BranchRef&) const = default;
};

struct UnitCoverage {
    std::size_t lines_total = 0;
    std::set<int> covered_lines;
    std::vector<BranchRef> branches; // every branch of the unit, ordered
    std::set<BranchRef> covered_branches;

    std::size_t lines_covered() const { return covered_lines.size(); }
    std::size_t branches_total() const { return branches.size(); }
    std::size_t branches_covered() const { return covered_branches.size(); }
    std::vector<BranchRef> uncovered_branches() const;
    bool operator==(const UnitCoverage&) const = default;
};

struct CoverageReport {
    std::map<std::string, UnitCoverage> units;

    std::size_t lines_covered() const;
    std::size_t lines_total() const;
    std::size_t branches_covered() const;
    std::size_t branches_total() const;
    std::vector<BranchRef> uncovered_branches() const;
    /// Restricts the report to one unit (empty unit entry if unknown).
    CoverageReport only(const std::string& unit) const;
    bool operator==(const CoverageReport&) const = default;
};

std::string to_string(UnitKind kind);
std::string to_string(Visibility visibility);
std::string to_string(AssertionKind kind);
std::string to_string(TestStatus status);
std::string to_string(Granularity granularity);
std::string to_string(DiagnosticKind kind);

UnitKind unit_kind_from_string(const std::string& text);
Visibility visibility_from_string(const std::string& text);
AssertionKind assertion_kind_from_string(const std::string& text);
TestStatus test_status_from_string(const std::string& text);
Granularity granularity_from_string(const std::string& text);
DiagnosticKind diagnostic_kind_from_string(const std::string& text);

} // namespace testmend
