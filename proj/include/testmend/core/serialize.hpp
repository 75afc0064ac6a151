#pragma once

// JSON mapping of the domain values. This is the on-disk session-record
// schema; every type round-trips to an equal value.

#include <json.hpp>

#include "testmend/core/model.hpp"

namespace testmend {

void to_json(nlohmann::json& j, const Span& v);
void from_json(const nlohmann::json& j, Span& v);
void to_json(nlohmann::json& j, const ImportRef& v);
void from_json(const nlohmann::json& j, ImportRef& v);
void to_json(nlohmann::json& j, const MethodRef& v);
void from_json(const nlohmann::json& j, MethodRef& v);
void to_json(nlohmann::json& j, const FieldRef& v);
void from_json(const nlohmann::json& j, FieldRef& v);
void to_json(nlohmann::json& j, const SourceUnit& v);
void from_json(const nlohmann::json& j, SourceUnit& v);
void to_json(nlohmann::json& j, const AssertionModel& v);
void from_json(const nlohmann::json& j, AssertionModel& v);
void to_json(nlohmann::json& j, const TestCase& v);
void from_json(const nlohmann::json& j, TestCase& v);
void to_json(nlohmann::json& j, const HelperMethod& v);
void from_json(const nlohmann::json& j, HelperMethod& v);
void to_json(nlohmann::json& j, const TargetRef& v);
void from_json(const nlohmann::json& j, TargetRef& v);
void to_json(nlohmann::json& j, const TestSuite& v);
void from_json(const nlohmann::json& j, TestSuite& v);
void to_json(nlohmann::json& j, const Diagnostic& v);
void from_json(const nlohmann::json& j, Diagnostic& v);
void to_json(nlohmann::json& j, const BranchRef& v);
void from_json(const nlohmann::json& j, BranchRef& v);
void to_json(nlohmann::json& j, const UnitCoverage& v);
void from_json(const nlohmann::json& j, UnitCoverage& v);
void to_json(nlohmann::json& j, const CoverageReport& v);
void from_json(const nlohmann::json& j, CoverageReport& v);

} // namespace testmend
