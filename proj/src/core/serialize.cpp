#include "testmend/core/serialize.hpp"

namespace testmend {

using nlohmann::json;

namespace {

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
    j[key] = v ? json(*v) : json(nullptr);
}

template <typename T>
void get_optional(const json& j, const char* key, std::optional<T>& v) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        v.reset();
    } else {
        v = it->get<T>();
    }
}

} // namespace

void to_json(json& j, const Span& v) { j = json::array({v.begin, v.end}); }
void from_json(const json& j, Span& v) {
    v.begin = j.at(0).get<std::size_t>();
    v.end = j.at(1).get<std::size_t>();
}

void to_json(json& j, const ImportRef& v) {
    j = {{"name", v.qualified_name}, {"static", v.is_static}, {"wildcard", v.wildcard}};
}
void from_json(const json& j, ImportRef& v) {
    v.qualified_name = j.at("name").get<std::string>();
    v.is_static = j.value("static", false);
    v.wildcard = j.value("wildcard", false);
}

void to_json(json& j, const MethodRef& v) {
    j = {{"owner", v.owner},
         {"name", v.name},
         {"signature", v.signature},
         {"visibility", to_string(v.visibility)},
         {"param_types", v.param_types},
         {"return_type", v.return_type},
         {"static", v.is_static}};
    put_optional(j, "body_text", v.body_text);
}
void from_json(const json& j, MethodRef& v) {
    v.owner = j.at("owner").get<std::string>();
    v.name = j.at("name").get<std::string>();
    v.signature = j.at("signature").get<std::string>();
    v.visibility = visibility_from_string(j.at("visibility").get<std::string>());
    v.param_types = j.at("param_types").get<std::vector<std::string>>();
    v.return_type = j.value("return_type", std::string{});
    v.is_static = j.value("static", false);
    get_optional(j, "body_text", v.body_text);
}

void to_json(json& j, const FieldRef& v) { j = {{"type", v.type}, {"name", v.name}, {"text", v.text}}; }
void from_json(const json& j, FieldRef& v) {
    v.type = j.at("type").get<std::string>();
    v.name = j.at("name").get<std::string>();
    v.text = j.at("text").get<std::string>();
}

void to_json(json& j, const SourceUnit& v) {
    j = {{"path", v.path},
         {"qualified_name", v.qualified_name},
         {"kind", to_string(v.kind)},
         {"methods", v.methods},
         {"constructors", v.constructors},
         {"imports", v.imports},
         {"fields", v.fields},
         {"supertypes", v.supertypes},
         {"body_text", v.body_text}};
}
void from_json(const json& j, SourceUnit& v) {
    v.path = j.at("path").get<std::string>();
    v.qualified_name = j.at("qualified_name").get<std::string>();
    v.kind = unit_kind_from_string(j.at("kind").get<std::string>());
    v.methods = j.at("methods").get<std::vector<MethodRef>>();
    v.constructors = j.at("constructors").get<std::vector<MethodRef>>();
    v.imports = j.at("imports").get<std::vector<ImportRef>>();
    v.fields = j.at("fields").get<std::vector<FieldRef>>();
    v.supertypes = j.at("supertypes").get<std::vector<std::string>>();
    v.body_text = j.at("body_text").get<std::string>();
}

void to_json(json& j, const AssertionModel& v) {
    j = {{"kind", to_string(v.kind)},
         {"subject", v.subject_expr},
         {"span", v.span},
         {"expects_null", v.expects_null},
         {"qualifier", v.qualifier},
         {"extra_args", v.extra_args}};
    put_optional(j, "expected", v.expected_literal);
}
void from_json(const json& j, AssertionModel& v) {
    v.kind = assertion_kind_from_string(j.at("kind").get<std::string>());
    v.subject_expr = j.at("subject").get<std::string>();
    v.span = j.at("span").get<Span>();
    v.expects_null = j.value("expects_null", false);
    v.qualifier = j.value("qualifier", std::string{});
    v.extra_args = j.value("extra_args", std::vector<std::string>{});
    get_optional(j, "expected", v.expected_literal);
}

void to_json(json& j, const TestCase& v) {
    j = {{"name", v.name},
         {"body", v.body_text},
         {"throws", v.throws_clause},
         {"assertions", v.assertions},
         {"status", to_string(v.status)}};
}
void from_json(const json& j, TestCase& v) {
    v.name = j.at("name").get<std::string>();
    v.body_text = j.at("body").get<std::string>();
    v.throws_clause = j.value("throws", std::string{});
    v.assertions = j.at("assertions").get<std::vector<AssertionModel>>();
    v.status = test_status_from_string(j.at("status").get<std::string>());
}

void to_json(json& j, const HelperMethod& v) {
    j = {{"name", v.name}, {"text", v.text}, {"removed", v.removed}};
}
void from_json(const json& j, HelperMethod& v) {
    v.name = j.at("name").get<std::string>();
    v.text = j.at("text").get<std::string>();
    v.removed = j.value("removed", false);
}

void to_json(json& j, const TargetRef& v) {
    j = {{"unit", v.unit}};
    put_optional(j, "method", v.method_signature);
}
void from_json(const json& j, TargetRef& v) {
    v.unit = j.at("unit").get<std::string>();
    get_optional(j, "method", v.method_signature);
}

void to_json(json& j, const TestSuite& v) {
    j = {{"target", v.target},
         {"granularity", to_string(v.granularity)},
         {"preamble", v.preamble},
         {"cases", v.cases},
         {"helpers", v.helper_methods}};
}
void from_json(const json& j, TestSuite& v) {
    v.target = j.at("target").get<TargetRef>();
    v.granularity = granularity_from_string(j.at("granularity").get<std::string>());
    v.preamble = j.at("preamble").get<std::string>();
    v.cases = j.at("cases").get<std::vector<TestCase>>();
    v.helper_methods = j.at("helpers").get<std::vector<HelperMethod>>();
}

void to_json(json& j, const Diagnostic& v) {
    j = {{"kind", to_string(v.kind)},
         {"message", v.message},
         {"path", v.path},
         {"line", v.line},
         {"span", v.span}};
    put_optional(j, "test", v.test_name);
    put_optional(j, "symbol", v.symbol);
}
void from_json(const json& j, Diagnostic& v) {
    v.kind = diagnostic_kind_from_string(j.at("kind").get<std::string>());
    v.message = j.at("message").get<std::string>();
    v.path = j.at("path").get<std::string>();
    v.line = j.at("line").get<std::size_t>();
    v.span = j.at("span").get<Span>();
    get_optional(j, "test", v.test_name);
    get_optional(j, "symbol", v.symbol);
}

void to_json(json& j, const BranchRef& v) {
    j = {{"unit", v.unit},
         {"file", v.file},
         {"line", v.line},
         {"ordinal", v.ordinal},
         {"condition", v.condition}};
}
void from_json(const json& j, BranchRef& v) {
    v.unit = j.at("unit").get<std::string>();
    v.file = j.at("file").get<std::string>();
    v.line = j.at("line").get<int>();
    v.ordinal = j.at("ordinal").get<int>();
    v.condition = j.at("condition").get<std::string>();
}

void to_json(json& j, const UnitCoverage& v) {
    j = {{"lines_total", v.lines_total},
         {"lines_covered", v.lines_covered()},
         {"covered_lines", v.covered_lines},
         {"branches_total", v.branches_total()},
         {"branches_covered", v.branches_covered()},
         {"branches", v.branches},
         {"covered_branches", v.covered_branches},
         {"uncovered_branches", v.uncovered_branches()}};
}
void from_json(const json& j, UnitCoverage& v) {
    v.lines_total = j.at("lines_total").get<std::size_t>();
    v.covered_lines = j.at("covered_lines").get<std::set<int>>();
    v.branches = j.at("branches").get<std::vector<BranchRef>>();
    v.covered_branches = j.at("covered_branches").get<std::set<BranchRef>>();
}

void to_json(json& j, const CoverageReport& v) {
    j = json::object();
    json units = json::object();
    for (const auto& [name, unit] : v.units) units[name] = unit;
    j["units"] = units;
    j["lines_covered"] = v.lines_covered();
    j["lines_total"] = v.lines_total();
    j["branches_covered"] = v.branches_covered();
    j["branches_total"] = v.branches_total();
}
void from_json(const json& j, CoverageReport& v) {
    v.units.clear();
    for (const auto& [name, unit] : j.at("units").items()) v.units[name] = unit.get<UnitCoverage>();
}

} // namespace testmend
