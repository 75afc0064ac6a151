#pragma once

// Line-delimited exchange log. Each line is one JSON object:
//   {"session": str, "seq": int, "phase": str, "fingerprint": str,
//    "prompt": str, "response": str, "timestamp": str}
// `seq` numbers exchanges within a session starting at 0.

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "testmend/llm/gateway.hpp"

namespace testmend {

struct TranscriptRecord {
    std::string session_id;
    std::size_t seq = 0;
    std::string phase;
    std::string prompt_fingerprint;
    std::string full_prompt;
    std::string response;
    std::string timestamp;

    bool operator==(const TranscriptRecord&) const = default;
};

class Transcript {
public:
    Transcript() = default;
    Transcript(const Transcript& other);
    Transcript& operator=(const Transcript& other);

    /// Thread-safe; assigns the per-session sequence number.
    void append(TranscriptRecord record);
    std::vector<TranscriptRecord> records() const;
    std::size_t size() const;

    void save(const std::string& path) const;
    std::string to_jsonl() const;
    /// Throws TranscriptError on unreadable files or malformed lines.
    static Transcript load(const std::string& path);
    static Transcript parse(const std::string& jsonl);

private:
    mutable std::mutex mutex_;
    std::vector<TranscriptRecord> records_;
    std::map<std::string, std::size_t> next_seq_;
};

/// Answers from a transcript, strictly in recorded order within each session.
/// Never touches the network.
class ReplayBackend : public Backend {
public:
    explicit ReplayBackend(Transcript transcript);

    std::string name() const override { return "replay"; }
    /// Throws ReplayMismatch naming the expected and the actual fingerprint.
    std::string complete(const ChatRequest& request) override;
    /// Records not consumed yet.
    std::size_t remaining() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::vector<TranscriptRecord>> by_session_;
    std::map<std::string, std::size_t> cursor_;
};

} // namespace testmend
