#include "testmend/llm/transcript.hpp"

#include <fstream>
#include <sstream>

#include "testmend/core/errors.hpp"

namespace testmend {

Transcript::Transcript(const Transcript& other) {
    std::lock_guard lock(other.mutex_);
    records_ = other.records_;
    next_seq_ = other.next_seq_;
}

Transcript& Transcript::operator=(const Transcript& other) {
    if (this == &other) return *this;
    std::scoped_lock lock(mutex_, other.mutex_);
    records_ = other.records_;
    next_seq_ = other.next_seq_;
    return *this;
}

void Transcript::append(TranscriptRecord record) {
    std::lock_guard lock(mutex_);
    record.seq = next_seq_[record.session_id]++;
    records_.push_back(std::move(record));
}

std::vector<TranscriptRecord> Transcript::records() const {
    std::lock_guard lock(mutex_);
    return records_;
}

std::size_t Transcript::size() const {
    std::lock_guard lock(mutex_);
    return records_.size();
}

std::string Transcript::to_jsonl() const {
    std::string out;
    for (const auto& r : records()) {
        nlohmann::json j = {{"session", r.session_id}, {"seq", r.seq},         {"phase", r.phase},
                            {"fingerprint", r.prompt_fingerprint},             {"prompt", r.full_prompt},
                            {"response", r.response}, {"timestamp", r.timestamp}};
        out += j.dump() + "\n";
    }
    return out;
}

void Transcript::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOFailure("cannot write transcript " + path);
    out << to_jsonl();
}

Transcript Transcript::parse(const std::string& jsonl) {
    Transcript t;
    std::istringstream in(jsonl);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            auto j = nlohmann::json::parse(line);
            TranscriptRecord r;
            r.session_id = j.value("session", std::string{});
            r.phase = j.at("phase").get<std::string>();
            r.prompt_fingerprint = j.at("fingerprint").get<std::string>();
            r.full_prompt = j.value("prompt", std::string{});
            r.response = j.at("response").get<std::string>();
            r.timestamp = j.value("timestamp", std::string{});
            std::size_t expected = t.next_seq_[r.session_id];
            if (j.contains("seq") && j["seq"].get<std::size_t>() != expected)
                throw TranscriptError("line " + std::to_string(number) + ": sequence " +
                                      std::to_string(j["seq"].get<std::size_t>()) + " out of order, expected " +
                                      std::to_string(expected));
            t.append(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw TranscriptError("line " + std::to_string(number) + ": " + e.what());
        }
    }
    return t;
}

Transcript Transcript::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TranscriptError("cannot read transcript " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

ReplayBackend::ReplayBackend(Transcript transcript) {
    for (auto& r : transcript.records()) by_session_[r.session_id].push_back(std::move(r));
}

std::string ReplayBackend::complete(const ChatRequest& request) {
    std::lock_guard lock(mutex_);
    auto it = by_session_.find(request.session_id);
    std::size_t& cursor = cursor_[request.session_id];
    if (it == by_session_.end() || cursor >= it->second.size())
        throw ReplayMismatch("<end of transcript for session " + request.session_id + ">", request.fingerprint);
    const TranscriptRecord& next = it->second[cursor];
    if (next.prompt_fingerprint != request.fingerprint) throw ReplayMismatch(next.prompt_fingerprint, request.fingerprint);
    ++cursor;
    return next.response;
}

std::size_t ReplayBackend::remaining() const {
    std::lock_guard lock(mutex_);
    std::size_t n = 0;
    for (const auto& [session, records] : by_session_) {
        auto it = cursor_.find(session);
        n += records.size() - (it == cursor_.end() ? 0 : it->second);
    }
    return n;
}

} // namespace testmend
