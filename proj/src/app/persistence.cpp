#include "testmend/app/persistence.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "testmend/app/project_loader.hpp"
#include "testmend/core/errors.hpp"
#include "testmend/core/hash.hpp"
#include "testmend/toolchain/test_syntax.hpp"

namespace fs = std::filesystem;

namespace testmend {

std::string target_dir_name(const TargetRef& target) {
    if (!target.method_signature) return target.unit;
    const std::string& sig = *target.method_signature;
    auto paren = sig.find('(');
    std::string head = sig.substr(0, paren);
    auto space = head.find_last_of(' ');
    std::string name = space == std::string::npos ? head : head.substr(space + 1);
    return target.unit + "." + name + "-" + fingerprint(sig).substr(0, 8);
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    if (ec) throw IOFailure("cannot create " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IOFailure("cannot write " + path.string());
    out << text;
    if (!out) throw IOFailure("cannot write " + path.string());
}

namespace {

std::string jsonl(const std::vector<nlohmann::json>& lines) {
    std::string out;
    for (const auto& j : lines) out += j.dump() + "\n";
    return out;
}

} // namespace

void write_target(const fs::path& run_dir, const TargetArtifacts& artifacts) {
    fs::path dir = run_dir / target_dir_name(artifacts.target);
    fs::create_directories(dir);
    // Stale suite files from an earlier run in the same directory would confuse readers.
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".java") fs::remove(entry.path());
    }
    if (artifacts.suite) {
        std::string cls = preamble_class_name(artifacts.suite->preamble);
        if (cls.empty()) cls = "GeneratedTest";
        write_text_file(dir / (cls + ".java"), render_text(*artifacts.suite));
    }
    write_text_file(dir / "actions.jsonl", jsonl(artifacts.actions));
    Transcript t;
    for (const auto& r : artifacts.transcript) t.append(r);
    write_text_file(dir / "transcript.jsonl", t.to_jsonl());
    write_text_file(dir / "summary.json", nlohmann::json(artifacts.summary).dump(2) + "\n");
}

void write_run_summary(const fs::path& run_dir, const RunSummary& summary) {
    write_text_file(run_dir / "summary.json", nlohmann::json(summary).dump(2) + "\n");
}

std::vector<TranscriptRecord> session_records(const Transcript& transcript, const std::string& session_id) {
    std::vector<TranscriptRecord> out;
    for (auto& r : transcript.records()) {
        if (r.session_id == session_id || r.session_id.rfind(session_id + "/", 0) == 0) out.push_back(r);
    }
    std::stable_sort(out.begin(), out.end(), [](const TranscriptRecord& a, const TranscriptRecord& b) {
        return a.session_id != b.session_id ? a.session_id < b.session_id : a.seq < b.seq;
    });
    return out;
}

std::vector<RunSummary> load_run_summaries(const fs::path& path) {
    auto load_one = [](const fs::path& file) {
        try {
            return read_json_file(file.string()).get<RunSummary>();
        } catch (const nlohmann::json::exception& e) {
            throw InvalidConfig(file.string(), std::string("not a run summary: ") + e.what());
        }
    };
    if (fs::is_regular_file(path)) return {load_one(path)};
    if (fs::is_regular_file(path / "summary.json")) return {load_one(path / "summary.json")};
    std::vector<RunSummary> out;
    if (fs::is_directory(path)) {
        std::vector<fs::path> runs;
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.is_directory() && fs::is_regular_file(entry.path() / "summary.json")) runs.push_back(entry.path());
        }
        std::sort(runs.begin(), runs.end());
        for (const auto& r : runs) out.push_back(load_one(r / "summary.json"));
    }
    if (out.empty()) throw IOFailure("no run summary under " + path.string());
    return out;
}

} // namespace testmend
