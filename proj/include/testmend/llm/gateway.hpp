#pragma once

// Chat sessions over a completion backend. Every logical prompt costs one
// request in the ledger no matter how many transport attempts it took.

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "testmend/core/config.hpp"

namespace testmend {

enum class Role { system, user, assistant };

std::string to_string(Role role);
Role role_from_string(const std::string& text);

struct ChatMessage {
    Role role = Role::user;
    std::string content;
    bool operator==(const ChatMessage&) const = default;
};

class ChatSession {
public:
    ChatSession(std::string session_id, std::string backend_name, std::string system_prompt = {});

    const std::string& id() const { return session_id_; }
    const std::string& backend_name() const { return backend_; }
    const std::vector<ChatMessage>& messages() const { return messages_; }

    /// Throws InvalidState on two consecutive assistant messages.
    void append(Role role, std::string content);
    /// Drops everything after the system prompt; used when a phase starts over.
    void reset();

private:
    std::string session_id_;
    std::string backend_;
    std::vector<ChatMessage> messages_;
};

/// Pure hash over the role sequence and contents.
std::string prompt_fingerprint(const std::vector<ChatMessage>& messages);

struct LedgerSnapshot {
    std::size_t requests = 0;
    std::size_t retries_absorbed = 0;
    std::map<std::string, std::size_t> per_phase;

    bool operator==(const LedgerSnapshot&) const = default;
};

void to_json(nlohmann::json& j, const LedgerSnapshot& v);
void from_json(const nlohmann::json& j, LedgerSnapshot& v);

class CostLedger {
public:
    void record(const std::string& phase, std::size_t retries);
    /// Adds another ledger's counts (used to fold per-target ledgers together).
    void absorb(const LedgerSnapshot& other);
    LedgerSnapshot snapshot() const;
    std::size_t requests() const;
    std::size_t phase_count(const std::string& phase) const;

private:
    mutable std::mutex mutex_;
    LedgerSnapshot data_;
};

struct ChatRequest {
    std::string session_id;
    std::vector<ChatMessage> messages; // full conversation including the new prompt
    std::string fingerprint;
    std::string phase;
};

/// A completion backend. Throws TransportError for retryable failures and
/// BackendRejected for permanent ones.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string name() const = 0;
    virtual std::string complete(const ChatRequest& request) = 0;
};

struct TranscriptRecord;
class Transcript;

class Gateway {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;
    using Clock = std::function<std::string()>; // timestamp text for transcript records

    Gateway(std::shared_ptr<Backend> backend, int max_attempts = 5, int initial_backoff_ms = 500,
            Sleeper sleeper = {});

    /// Appends user and assistant messages to the session and counts one request.
    /// Throws BackendExhausted once the attempt budget is spent.
    std::string send(ChatSession& session, const std::string& prompt, const std::string& phase, CostLedger& ledger);

    /// Every successful exchange is appended to `transcript` from now on.
    void record_to(std::shared_ptr<Transcript> transcript);
    std::shared_ptr<Transcript> recording() const { return transcript_; }
    /// Replaces the UTC wall clock used for transcript timestamps.
    void set_clock(Clock clock) { clock_ = std::move(clock); }

    Backend& backend() { return *backend_; }
    std::string backend_name() const { return backend_->name(); }

private:
    std::shared_ptr<Backend> backend_;
    int max_attempts_;
    int initial_backoff_ms_;
    Sleeper sleeper_;
    std::shared_ptr<Transcript> transcript_;
    Clock clock_;
};

} // namespace testmend
