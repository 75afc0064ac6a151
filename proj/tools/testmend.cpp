// testmend command line: generate, plain, evaluate.
// Exit codes: 0 success, 1 some targets failed, 2 configuration or toolchain error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "testmend/app/persistence.hpp"
#include "testmend/app/pipeline.hpp"
#include "testmend/app/project_loader.hpp"
#include "testmend/core/errors.hpp"

using namespace testmend;

namespace {

struct RunFlags {
    std::string project;
    std::string config_file;
    std::string granularity;
    std::string adapter;
    std::string backend;
    std::string out = "testmend-out";
    std::string record;
    std::string replay;
    std::string responses;
    std::string template_dir;
    std::string format = "table";
    std::optional<int> depth;
    std::optional<int> max_oracle_iters;
    std::optional<int> jobs;
    bool quiet = false;
    bool no_index_cache = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
    cmd->add_option("project", f.project, "Project directory holding testmend.json")->required();
    cmd->add_option("--config", f.config_file, "Pipeline configuration file (JSON)");
    cmd->add_option("--granularity", f.granularity, "class, method or both")
        ->check(CLI::IsMember({"class", "method", "both"}));
    cmd->add_option("--adapter", f.adapter, "Toolchain adapter (overrides the manifest)");
    cmd->add_option("--backend", f.backend, "LLM backend: http, replay or scripted")
        ->check(CLI::IsMember({"http", "replay", "scripted"}));
    cmd->add_option("--depth", f.depth, "Call-graph depth for compile repair");
    cmd->add_option("--max-oracle-iters", f.max_oracle_iters, "LLM oracle-fix rounds");
    cmd->add_option("--jobs", f.jobs, "Targets processed concurrently");
    cmd->add_option("--out", f.out, "Output directory");
    cmd->add_option("--record", f.record, "Directory receiving the run's transcript");
    cmd->add_option("--replay", f.replay, "Transcript (or directory) to replay; no network");
    cmd->add_option("--responses", f.responses, "Scripted backend answers (JSON keyed by session)");
    cmd->add_option("--template-dir", f.template_dir, "Prompt template directory");
    cmd->add_option("--format", f.format, "Report printed to stdout: table or structured")
        ->check(CLI::IsMember({"table", "structured"}));
    cmd->add_flag("--quiet", f.quiet, "No progress lines");
    cmd->add_flag("--no-index-cache", f.no_index_cache, "Rebuild the symbol index instead of using <project>/.testmend");
}

PipelineConfig config_from(const RunFlags& f) {
    nlohmann::json file = nlohmann::json::object();
    if (!f.config_file.empty()) file = read_json_file(f.config_file);
    nlohmann::json flags = nlohmann::json::object();
    if (!f.granularity.empty()) flags["granularity"] = f.granularity;
    if (!f.backend.empty()) flags["llm_backend"] = f.backend;
    if (!f.replay.empty()) flags["llm_backend"] = "replay";
    if (!f.record.empty()) flags["record_transcripts"] = true;
    if (f.depth) flags["call_graph_depth"] = *f.depth;
    if (f.max_oracle_iters) flags["max_oracle_llm_iterations"] = *f.max_oracle_iters;
    if (f.jobs) flags["jobs"] = *f.jobs;
    if (!f.template_dir.empty()) flags["template_dir"] = f.template_dir;
    return validate_config(merge_config_json(file, flags));
}

void print_report(const std::vector<RunSummary>& summaries, const std::vector<Comparison>& comparisons,
                  const std::string& format) {
    auto report = build_report(summaries, comparisons);
    if (format == "structured") std::cout << report.dump(2) << "\n";
    else std::cout << render_report_table(report);
}

int run_pipeline(const RunFlags& f, bool plain) {
    PipelineConfig config = config_from(f);
    ProjectContext project = load_project(f.project, config);
    if (!f.adapter.empty()) project.toolchain_id = f.adapter;
    validate_project(project, registered_toolchains());
    for (const auto& failure : project.parse_failures) std::cerr << "skipped " << failure << "\n";

    RunOptions options;
    options.out_dir = f.out;
    if (!f.record.empty()) options.record_dir = f.record;
    if (!f.replay.empty()) options.replay_path = f.replay;
    if (!f.responses.empty()) options.responses_path = f.responses;
    options.use_index_cache = !f.no_index_cache;
    if (!f.quiet) options.log = [](const std::string& line) { std::cerr << line << "\n"; };

    RunOutput out = plain ? cmd_plain(project, options) : cmd_generate(project, options);
    print_report(out.summaries, {}, f.format);
    return out.failed_targets > 0 ? 1 : 0;
}

int run_evaluate(const std::vector<std::string>& runs, const std::string& out, const std::string& format) {
    std::vector<RunSummary> summaries;
    for (const auto& r : runs) {
        auto loaded = load_run_summaries(r);
        summaries.insert(summaries.end(), loaded.begin(), loaded.end());
    }
    auto comparisons = cmd_evaluate(summaries, out);
    print_report(summaries, comparisons, format);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"testmend: unit test generation with compile and oracle repair"};
    app.require_subcommand(1);

    RunFlags gen_flags;
    auto* gen = app.add_subcommand("generate", "Full pipeline");
    add_run_flags(gen, gen_flags);

    RunFlags plain_flags;
    auto* plain = app.add_subcommand("plain", "Baseline: one prompt, error-log rounds, import rules");
    add_run_flags(plain, plain_flags);

    std::vector<std::string> runs;
    std::string eval_out = "testmend-eval";
    std::string eval_format = "table";
    auto* evaluate = app.add_subcommand("evaluate", "Compare run summaries target by target");
    evaluate->add_option("runs", runs, "Run directories or summary files (first one is the baseline)")->required();
    evaluate->add_option("--out", eval_out, "Output directory for the comparison report");
    evaluate->add_option("--format", eval_format, "Report printed to stdout: table or structured")
        ->check(CLI::IsMember({"table", "structured"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*gen) return run_pipeline(gen_flags, false);
        if (*plain) return run_pipeline(plain_flags, true);
        return run_evaluate(runs, eval_out, eval_format);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
