#pragma once

// Output tree of a run:
//   <out>/<label>/<target>/<TestClass>.java   persisted suite (absent when nothing survived)
//   <out>/<label>/<target>/actions.jsonl      repair actions in the order they happened
//   <out>/<label>/<target>/transcript.jsonl   exchanges of the target's sessions
//   <out>/<label>/<target>/summary.json
//   <out>/<label>/summary.json                RunSummary
//   <out>/report.json, <out>/report.txt

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "testmend/eval/report.hpp"
#include "testmend/llm/transcript.hpp"

namespace testmend {

struct TargetArtifacts {
    TargetRef target;
    TargetSummary summary;
    std::optional<TestSuite> suite;
    std::vector<nlohmann::json> actions;
    std::vector<TranscriptRecord> transcript;
};

/// Directory name for a target: the unit name, plus method name and a short
/// signature hash for method targets.
std::string target_dir_name(const TargetRef& target);

/// Writes `text` atomically enough for our purposes; throws IOFailure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

void write_target(const std::filesystem::path& run_dir, const TargetArtifacts& artifacts);
void write_run_summary(const std::filesystem::path& run_dir, const RunSummary& summary);

/// Records of `transcript` that belong to `session_id` or its sub-sessions
/// ("<id>/..."), ordered by (session, seq).
std::vector<TranscriptRecord> session_records(const Transcript& transcript, const std::string& session_id);

/// Reads run summaries from a summary file, a run directory, or an output
/// directory holding several runs. Throws IOFailure when none is found.
std::vector<RunSummary> load_run_summaries(const std::filesystem::path& path);

} // namespace testmend
