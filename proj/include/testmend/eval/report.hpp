#pragma once

// Run summaries and the aggregated report. The structured report is a JSON
// object with the sections:
//   rates:      {rows: [{label, generated, compiling, passing, compile_rate, pass_rate}],
//                total: {...pooled counts...}, average: {compile_rate, pass_rate}}
//   coverage:   {rows: [{label, line, branch}], total: {...}, average: {...}}
//   statistics: [{metric, baseline, candidate, u, p_value, exact, vda, significant,
//                 mean_difference}]
//   cost:       {rows: [{label, requests, retries_absorbed, per_phase}], total: {...}}
//   notes:      [text]

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "testmend/core/model.hpp"
#include "testmend/eval/metrics.hpp"
#include "testmend/llm/gateway.hpp"

namespace testmend {

struct TargetSummary {
    std::string target; // TargetRef::id()
    std::string unit;
    Granularity granularity = Granularity::class_level;
    std::size_t tests_generated = 0;
    std::size_t tests_compiling = 0;
    std::size_t tests_passing = 0;
    CoverageReport coverage; // of the target's passing tests, restricted to its unit
    LedgerSnapshot ledger;
    std::string error; // empty when the target went through the pipeline

    /// Throws InvalidState unless passing <= compiling <= generated.
    void validate() const;
    bool operator==(const TargetSummary&) const = default;
};

struct RunSummary {
    std::string project;
    std::string mode;  // "full" or "plain"
    std::string label; // e.g. "class", "method", "combined"
    std::vector<TargetSummary> targets;
    CoverageReport coverage; // every passing test of the run together
    LedgerSnapshot ledger;

    std::size_t generated() const;
    std::size_t compiling() const;
    std::size_t passing() const;
    std::string display_label() const;
    bool operator==(const RunSummary&) const = default;
};

void to_json(nlohmann::json& j, const TargetSummary& v);
void from_json(const nlohmann::json& j, TargetSummary& v);
void to_json(nlohmann::json& j, const RunSummary& v);
void from_json(const nlohmann::json& j, RunSummary& v);

/// Line and branch coverage percentages of a report (NaN when it has no lines/branches).
double line_percent(const CoverageReport& report);
double branch_percent(const CoverageReport& report);

struct Comparison {
    std::string metric;
    std::string baseline;
    std::string candidate;
    double u = 0;
    double p_value = 1;
    bool exact = false;
    double vda = 0.5;
    bool significant = false;
    double mean_difference = 0; // candidate - baseline, in the metric's unit
    std::string note;           // set when the test could not be run
};

void to_json(nlohmann::json& j, const Comparison& v);

/// Per-target samples of `metric` ("compile_rate", "pass_rate", "line_coverage",
/// "branch_coverage"), in target order.
std::vector<double> per_target_samples(const RunSummary& run, const std::string& metric);

/// Compares two runs target by target. Throws MismatchedTargets when the
/// target sets differ.
std::vector<Comparison> compare_runs(const RunSummary& baseline, const RunSummary& candidate);

enum class ReportFormat { table, structured };

nlohmann::json build_report(const std::vector<RunSummary>& summaries, const std::vector<Comparison>& comparisons = {});
std::string render_report_table(const nlohmann::json& report);

/// Writes the report in `format` to `path`. Throws InvalidState without
/// summaries and IOFailure when the file cannot be written.
void emit_report(const std::vector<RunSummary>& summaries, ReportFormat format, const std::string& path,
                 const std::vector<Comparison>& comparisons = {});

} // namespace testmend
