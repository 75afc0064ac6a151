#include "testmend/app/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "testmend/app/project_loader.hpp"
#include "testmend/augment/coverage_augment.hpp"
#include "testmend/core/errors.hpp"
#include "testmend/eval/filter.hpp"
#include "testmend/llm/http_backend.hpp"
#include "testmend/llm/transcript.hpp"
#include "testmend/repair/compile_repair.hpp"
#include "testmend/repair/oracle_repair.hpp"

namespace fs = std::filesystem;

namespace testmend {

std::vector<const SourceUnit*> select_units(const ProjectContext& project) {
    std::vector<const SourceUnit*> out;
    if (!project.targets.empty()) {
        for (const auto& name : project.targets) {
            const SourceUnit* unit = project.find_unit(name);
            if (!unit) throw InvalidConfig("targets", "no source unit named " + name);
            out.push_back(unit);
        }
    } else {
        for (const auto& unit : project.source_units) {
            if (unit.kind == UnitKind::class_type) out.push_back(&unit);
        }
    }
    std::sort(out.begin(), out.end(),
              [](const SourceUnit* a, const SourceUnit* b) { return a->qualified_name < b->qualified_name; });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<GenerationTarget> select_targets(const ProjectContext& project, Granularity granularity) {
    std::vector<GenerationTarget> out;
    for (const SourceUnit* unit : select_units(project)) {
        GenerationTarget whole{unit, std::nullopt};
        if (granularity == Granularity::class_level) {
            out.push_back(whole);
            continue;
        }
        for (const auto& m : whole.plan_methods()) {
            if (m.body_text) out.push_back(GenerationTarget{unit, m});
        }
    }
    return out;
}

std::string session_id_for(const std::string& mode, const GenerationTarget& target) {
    return mode + "/" + to_string(target.granularity()) + "/" + target.ref().id();
}

namespace {

TargetRun start_run(const std::string& mode, const GenerationTarget& target) {
    TargetRun run;
    run.session_id = session_id_for(mode, target);
    run.artifacts.target = target.ref();
    auto& s = run.artifacts.summary;
    s.target = target.ref().id();
    s.unit = target.unit->qualified_name;
    s.granularity = target.granularity();
    return run;
}

// Marks every test that did not pass as removed.
TestSuite passing_only(TestSuite suite, const TestRunResult& run) {
    apply_run_status(suite, run);
    for (auto& c : suite.cases) {
        if (!c.removed() && c.status != TestStatus::passing) c = c.with_status(TestStatus::removed);
    }
    return suite;
}

CoverageReport unit_coverage(ToolchainAdapter& adapter, const ProjectContext& project,
                             const std::optional<TestSuite>& suite, const std::string& unit) {
    std::vector<TestSuite> suites;
    if (suite) suites.push_back(*suite);
    return adapter.measure_coverage(suites, project).only(unit);
}

void finish(TargetRun& run, ToolchainAdapter& adapter, const PipelineEnv& env, const CostLedger& ledger) {
    auto& s = run.artifacts.summary;
    s.ledger = ledger.snapshot();
    s.tests_generated = std::max({s.tests_generated, s.tests_compiling, s.tests_passing});
    s.tests_compiling = std::max(s.tests_compiling, s.tests_passing);
    if (run.artifacts.suite && run.artifacts.suite->active_case_count() == 0) run.artifacts.suite.reset();
    s.coverage = unit_coverage(adapter, env.project, run.artifacts.suite, s.unit);
    s.validate();
}

ActionSink collect(std::vector<nlohmann::json>& into, const std::string& cycle) {
    return [&into, cycle](const nlohmann::json& j) {
        nlohmann::json copy = j;
        copy["cycle"] = cycle;
        into.push_back(std::move(copy));
    };
}

} // namespace

TargetRun run_full_target(Gateway& gateway, const TemplateSet& templates, const PipelineEnv& env,
                          const GenerationTarget& target) {
    TargetRun run = start_run("full", target);
    auto& s = run.artifacts.summary;
    auto adapter = env.adapter.for_session(run.session_id);
    CostLedger ledger;
    LlmContext ctx{gateway, ledger, templates};
    ChatSession session(run.session_id, gateway.backend_name());
    try {
        TestSuite suite = run_generation(ctx, session, target);
        s.tests_generated = suite.active_case_count();

        CompileRepairInput cin{env.project, *adapter, env.index, env.graph, target, env.config, RepairMode::full,
                               collect(run.artifacts.actions, "main")};
        auto compiled = run_compile_repair(ctx, session, suite, cin);
        s.tests_generated = std::max(s.tests_generated, compiled.suite.active_case_count());
        auto filtered = filter_until_compiles(compiled.suite, *adapter, env.project);
        s.tests_compiling = filtered.outcome.success ? filtered.suite.active_case_count() : 0;

        TestSuite main = filtered.suite;
        if (s.tests_compiling > 0) {
            OracleRepairInput oin{env.project, *adapter, env.config, collect(run.artifacts.actions, "main")};
            auto repaired = run_oracle_repair(&ctx, &session, filtered.suite, oin);
            main = passing_only(repaired.suite, repaired.run);
            s.tests_passing = main.active_case_count();
        }

        // Second cycle on the branches the first suite left uncovered.
        auto coverage = unit_coverage(*adapter, env.project, main, s.unit);
        std::string digest = uncovered_branch_digest(coverage, s.unit);
        if (!digest.empty()) {
            ChatSession aug_session(run.session_id + "/augment", gateway.backend_name());
            AugmentInput ain{env.project, *adapter, env.index, env.graph, target, env.config,
                             collect(run.artifacts.actions, "augment")};
            AugmentResult aug = augment(ctx, aug_session, main, digest, ain);
            s.tests_generated += std::max({aug.generated, aug.compiling, aug.passing});
            s.tests_compiling += std::max(aug.compiling, aug.passing);
            s.tests_passing += aug.passing;
            if (aug.suite) {
                TestSuite merged = merge_suites(main, *aug.suite);
                if (adapter->compile(merged, env.project).success) main = merged;
            }
        }
        run.artifacts.suite = filter_invalid(main, adapter->compile(main, env.project));
    } catch (const ReplayMismatch&) {
        throw;
    } catch (const Error& e) {
        s.error = e.what();
    }
    finish(run, *adapter, env, ledger);
    return run;
}

TargetRun run_plain_target(Gateway& gateway, const TemplateSet& templates, const PipelineEnv& env,
                           const GenerationTarget& target) {
    TargetRun run = start_run("plain", target);
    auto& s = run.artifacts.summary;
    auto adapter = env.adapter.for_session(run.session_id);
    CostLedger ledger;
    LlmContext ctx{gateway, ledger, templates};
    ChatSession session(run.session_id, gateway.backend_name());
    try {
        TemplateValues values = {
            {"kind", target.method ? "method" : "class"},
            {"name", target.method ? target.unit->simple_name() + "." + target.method->name
                                   : target.unit->simple_name()},
            {"source", target_source(target)},
            {"package", target.unit->package_name()},
            {"test_class", target.test_class_name()},
        };
        std::string response = gateway.send(session, templates.render("plain", values), phase::generate, ledger);
        TestSuite suite = suite_from_response(response, target.ref(), target.granularity());
        s.tests_generated = suite.active_case_count();

        CompileRepairInput cin{env.project, *adapter, env.index, env.graph, target, env.config, RepairMode::plain,
                               collect(run.artifacts.actions, "main")};
        auto compiled = run_compile_repair(ctx, session, suite, cin);
        s.tests_generated = std::max(s.tests_generated, compiled.suite.active_case_count());
        auto filtered = filter_until_compiles(compiled.suite, *adapter, env.project);
        s.tests_compiling = filtered.outcome.success ? filtered.suite.active_case_count() : 0;
        TestSuite main = filtered.suite;
        if (s.tests_compiling > 0) {
            main = passing_only(main, adapter->run_tests(main, env.project));
            s.tests_passing = main.active_case_count();
        }
        run.artifacts.suite = main;
    } catch (const ReplayMismatch&) {
        throw;
    } catch (const Error& e) {
        s.error = e.what();
    }
    finish(run, *adapter, env, ledger);
    return run;
}

TargetRun combine_unit(const PipelineEnv& env, const SourceUnit& unit, const std::vector<const TargetRun*>& parts) {
    GenerationTarget whole{&unit, std::nullopt};
    TargetRun run = start_run("combined", whole);
    auto& s = run.artifacts.summary;
    auto adapter = env.adapter.for_session(run.session_id);
    CostLedger ledger;
    std::optional<TestSuite> merged;
    std::vector<std::string> errors;
    for (const TargetRun* part : parts) {
        const auto& ps = part->artifacts.summary;
        s.tests_generated += ps.tests_generated;
        s.tests_compiling += ps.tests_compiling;
        s.tests_passing += ps.tests_passing;
        if (!ps.error.empty()) errors.push_back(ps.target + ": " + ps.error);
        if (!part->artifacts.suite) continue;
        TestSuite copy = *part->artifacts.suite;
        copy.target = whole.ref();
        copy.granularity = Granularity::class_level;
        merged = merged ? merge_suites(*merged, copy) : copy;
    }
    if (merged) {
        auto filtered = filter_until_compiles(*merged, *adapter, env.project);
        if (filtered.outcome.success && filtered.suite.active_case_count() > 0)
            merged = passing_only(filtered.suite, adapter->run_tests(filtered.suite, env.project));
        else merged.reset();
    }
    run.artifacts.suite = merged;
    // The ledger stays empty: merging costs no requests and the parts already count theirs.
    // Every target of a unit failing leaves the combined row failed too.
    if (!errors.empty() && errors.size() == parts.size()) {
        for (const auto& e : errors) s.error += (s.error.empty() ? "" : "; ") + e;
    }
    finish(run, *adapter, env, ledger);
    return run;
}

namespace {

std::string scripted_text(const nlohmann::json& v, const std::string& where, const std::string& base_dir) {
    if (!v.is_string()) throw InvalidConfig(where, "expected a string");
    std::string text = v.get<std::string>();
    if (text.empty() || text[0] != '@') return text;
    fs::path file = fs::path(base_dir) / text.substr(1);
    std::ifstream in(file, std::ios::binary);
    if (!in) throw InvalidConfig(where, "cannot read " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

ScriptedBackend::Responder scripted_responder(const nlohmann::json& responses, const std::string& base_dir) {
    if (!responses.is_object()) throw InvalidConfig("responses", "expected an object keyed by session id");
    // (session, phase) -> answers; phase "" holds answers for any phase in call order.
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> table;
    for (const auto& [session, entry] : responses.items()) {
        const std::string where = "responses." + session;
        if (entry.is_array()) {
            for (const auto& r : entry) table[{session, ""}].push_back(scripted_text(r, where, base_dir));
        } else if (entry.is_object()) {
            for (const auto& [phase, list] : entry.items()) {
                if (!list.is_array()) throw InvalidConfig(where + "." + phase, "expected a list");
                for (const auto& r : list) table[{session, phase}].push_back(scripted_text(r, where + "." + phase, base_dir));
            }
        } else {
            throw InvalidConfig(where, "expected a list or an object keyed by phase");
        }
    }
    auto cursor = std::make_shared<std::map<std::pair<std::string, std::string>, std::size_t>>();
    auto mutex = std::make_shared<std::mutex>();
    return [table = std::move(table), cursor, mutex](const ChatRequest& request) {
        std::lock_guard lock(*mutex);
        std::pair<std::string, std::string> key{request.session_id, request.phase};
        if (!table.count(key)) key.second.clear();
        std::size_t& next = (*cursor)[key];
        auto it = table.find(key);
        if (it == table.end() || next >= it->second.size())
            throw BackendRejected("no scripted response for session " + request.session_id + ", phase " +
                                  request.phase);
        return it->second[next++];
    };
}

std::shared_ptr<Backend> make_backend(const PipelineConfig& config, const RunOptions& options) {
    if (options.backend) return options.backend;
    if (options.replay_path || config.llm_backend == LlmBackendKind::replay) {
        if (!options.replay_path) throw InvalidConfig("replay", "replay backend needs a transcript (--replay)");
        fs::path p = *options.replay_path;
        if (fs::is_directory(p)) p /= "transcript.jsonl";
        if (!fs::exists(p)) throw InvalidConfig("replay", "no transcript at " + p.string());
        return std::make_shared<ReplayBackend>(Transcript::load(p.string()));
    }
    if (config.llm_backend == LlmBackendKind::scripted) {
        if (!options.responses_path) throw InvalidConfig("responses", "scripted backend needs --responses");
        const std::string base = fs::path(*options.responses_path).parent_path().string();
        return std::make_shared<ScriptedBackend>(scripted_responder(read_json_file(*options.responses_path), base));
    }
    const char* key = std::getenv(config.llm.api_key_env.c_str());
    if (!key || !*key) throw InvalidConfig("llm.api_key_env", "environment variable " + config.llm.api_key_env + " is not set");
    return std::make_shared<HttpBackend>(config.llm);
}

namespace {

using TargetFn = std::function<TargetRun(const GenerationTarget&)>;

// Runs targets on `jobs` workers; results keep target order.
std::vector<TargetRun> run_targets(const std::vector<GenerationTarget>& targets, int jobs, const TargetFn& fn,
                                   const std::function<void(const std::string&)>& log) {
    std::vector<std::optional<TargetRun>> results(targets.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        while (true) {
            std::size_t i = next++;
            if (i >= targets.size()) return;
            try {
                results[i] = fn(targets[i]);
                if (log) {
                    const auto& s = results[i]->artifacts.summary;
                    log(s.target + ": generated " + std::to_string(s.tests_generated) + ", compiling " +
                        std::to_string(s.tests_compiling) + ", passing " + std::to_string(s.tests_passing) +
                        (s.error.empty() ? "" : " (" + s.error + ")"));
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = targets.size();
            }
        }
    };
    std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), std::max<std::size_t>(targets.size(), 1));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    std::vector<TargetRun> out;
    for (auto& r : results) out.push_back(std::move(*r));
    return out;
}

RunSummary summarize(const ProjectContext& project, const std::string& mode, const std::string& label,
                     const std::vector<TargetRun>& runs, ToolchainAdapter& adapter) {
    RunSummary summary;
    std::error_code ec;
    fs::path root = fs::weakly_canonical(fs::absolute(project.root_path), ec);
    if (ec) root = project.root_path;
    summary.project = root.filename().string();
    if (summary.project.empty()) summary.project = root.parent_path().filename().string();
    summary.mode = mode;
    summary.label = label;
    CostLedger ledger;
    std::vector<TestSuite> suites;
    for (const auto& r : runs) {
        summary.targets.push_back(r.artifacts.summary);
        ledger.absorb(r.artifacts.summary.ledger);
        if (r.artifacts.suite) suites.push_back(*r.artifacts.suite);
    }
    summary.coverage = adapter.measure_coverage(suites, project);
    summary.ledger = ledger.snapshot();
    return summary;
}

struct Driver {
    const ProjectContext& project;
    const RunOptions& options;
    PipelineConfig config;
    std::unique_ptr<ToolchainAdapter> adapter;
    SymbolIndex index;
    CallGraph graph;
    std::shared_ptr<Backend> backend;
    std::unique_ptr<Gateway> gateway;
    std::shared_ptr<Transcript> transcript = std::make_shared<Transcript>();
    TemplateSet templates;

    Driver(const ProjectContext& p, const RunOptions& o)
        : project(p), options(o), config(validate_config(p.config)), templates(config.template_dir) {
        adapter = make_toolchain(project);
        index = load_or_build_index(project, options.use_index_cache);
        graph = build_call_graph(index);
        backend = make_backend(config, options);
        gateway = std::make_unique<Gateway>(backend, config.llm.max_attempts, config.llm.initial_backoff_ms);
        gateway->record_to(transcript);
        if (backend->name() != "http") gateway->set_clock([] { return std::string(offline_timestamp); });
    }

    PipelineEnv env() const { return PipelineEnv{project, *adapter, index, graph, config}; }

    std::vector<TargetRun> run(const std::string& mode, Granularity granularity) {
        auto targets = select_targets(project, granularity);
        PipelineEnv e = env();
        TargetFn fn = [&](const GenerationTarget& t) {
            return mode == "plain" ? run_plain_target(*gateway, templates, e, t)
                                   : run_full_target(*gateway, templates, e, t);
        };
        return run_targets(targets, config.jobs, fn, options.log);
    }

    void add(RunOutput& out, const std::string& mode, const std::string& label, std::vector<TargetRun> runs) {
        auto summary = summarize(project, mode, label, runs, *adapter);
        for (const auto& r : runs) {
            if (!r.artifacts.summary.error.empty()) ++out.failed_targets;
        }
        if (!options.out_dir.empty()) {
            fs::path dir = fs::path(options.out_dir) / label;
            for (auto& r : runs) {
                r.artifacts.transcript = session_records(*transcript, r.session_id);
                write_target(dir, r.artifacts);
            }
            write_run_summary(dir, summary);
        }
        out.summaries.push_back(std::move(summary));
        for (auto& r : runs) out.targets.push_back(std::move(r));
    }

    void finish(RunOutput& out) {
        if (!options.out_dir.empty() && !out.summaries.empty()) {
            fs::path dir = options.out_dir;
            emit_report(out.summaries, ReportFormat::structured, (dir / "report.json").string());
            emit_report(out.summaries, ReportFormat::table, (dir / "report.txt").string());
        }
        if (options.record_dir) {
            Transcript sorted;
            auto records = transcript->records();
            std::stable_sort(records.begin(), records.end(), [](const TranscriptRecord& a, const TranscriptRecord& b) {
                return a.session_id != b.session_id ? a.session_id < b.session_id : a.seq < b.seq;
            });
            for (auto& r : records) sorted.append(r);
            write_text_file(fs::path(*options.record_dir) / "transcript.jsonl", sorted.to_jsonl());
        }
        if (auto* replay = dynamic_cast<ReplayBackend*>(backend.get()); replay && options.log && replay->remaining())
            options.log("warning: " + std::to_string(replay->remaining()) + " recorded exchanges were not replayed");
    }
};

std::string granularity_label(Granularity g) { return g == Granularity::class_level ? "class" : "method"; }

} // namespace

RunOutput cmd_generate(const ProjectContext& project, const RunOptions& options) {
    Driver driver(project, options);
    RunOutput out;
    GranularityMode mode = driver.config.granularity;
    std::vector<TargetRun> class_runs;
    std::vector<TargetRun> method_runs;
    if (mode != GranularityMode::method_level) class_runs = driver.run("full", Granularity::class_level);
    if (mode != GranularityMode::class_level) method_runs = driver.run("full", Granularity::method_level);

    std::vector<TargetRun> combined;
    if (mode == GranularityMode::both) {
        PipelineEnv env = driver.env();
        for (const SourceUnit* unit : select_units(project)) {
            std::vector<const TargetRun*> parts;
            for (const auto& r : class_runs) {
                if (r.artifacts.summary.unit == unit->qualified_name) parts.push_back(&r);
            }
            for (const auto& r : method_runs) {
                if (r.artifacts.summary.unit == unit->qualified_name) parts.push_back(&r);
            }
            combined.push_back(combine_unit(env, *unit, parts));
        }
    }
    if (mode != GranularityMode::method_level) driver.add(out, "full", granularity_label(Granularity::class_level), std::move(class_runs));
    if (mode != GranularityMode::class_level) driver.add(out, "full", granularity_label(Granularity::method_level), std::move(method_runs));
    if (mode == GranularityMode::both) {
        // The combined rows only merge work already counted above.
        std::size_t before = out.failed_targets;
        driver.add(out, "full", "combined", std::move(combined));
        out.failed_targets = before;
    }
    driver.finish(out);
    return out;
}

RunOutput cmd_plain(const ProjectContext& project, const RunOptions& options) {
    Driver driver(project, options);
    RunOutput out;
    GranularityMode mode = driver.config.granularity;
    if (mode != GranularityMode::method_level)
        driver.add(out, "plain", granularity_label(Granularity::class_level), driver.run("plain", Granularity::class_level));
    if (mode != GranularityMode::class_level)
        driver.add(out, "plain", granularity_label(Granularity::method_level), driver.run("plain", Granularity::method_level));
    driver.finish(out);
    return out;
}

std::vector<Comparison> cmd_evaluate(const std::vector<RunSummary>& summaries, const std::string& out_dir) {
    if (summaries.size() < 2) throw InvalidConfig("runs", "evaluation needs at least two run summaries");
    std::vector<Comparison> comparisons;
    for (std::size_t i = 1; i < summaries.size(); ++i) {
        auto c = compare_runs(summaries.front(), summaries[i]);
        comparisons.insert(comparisons.end(), c.begin(), c.end());
    }
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        emit_report(summaries, ReportFormat::structured, (fs::path(out_dir) / "report.json").string(), comparisons);
        emit_report(summaries, ReportFormat::table, (fs::path(out_dir) / "report.txt").string(), comparisons);
    }
    return comparisons;
}

} // namespace testmend
