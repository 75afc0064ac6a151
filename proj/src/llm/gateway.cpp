#include "testmend/llm/gateway.hpp"

#include <ctime>
#include <thread>

#include "testmend/core/errors.hpp"
#include "testmend/core/hash.hpp"
#include "testmend/llm/transcript.hpp"

namespace testmend {

std::string to_string(Role role) {
    switch (role) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
    }
    return "user";
}

Role role_from_string(const std::string& text) {
    if (text == "system") return Role::system;
    if (text == "user") return Role::user;
    if (text == "assistant") return Role::assistant;
    throw ParseFailure("unknown chat role: " + text);
}

ChatSession::ChatSession(std::string session_id, std::string backend_name, std::string system_prompt)
    : session_id_(std::move(session_id)), backend_(std::move(backend_name)) {
    if (!system_prompt.empty()) messages_.push_back({Role::system, std::move(system_prompt)});
}

void ChatSession::append(Role role, std::string content) {
    if (role == Role::assistant && !messages_.empty() && messages_.back().role == Role::assistant)
        throw InvalidState("two consecutive assistant messages in session " + session_id_);
    if (role == Role::system && !messages_.empty())
        throw InvalidState("system message must open session " + session_id_);
    messages_.push_back({role, std::move(content)});
}

void ChatSession::reset() {
    if (!messages_.empty() && messages_.front().role == Role::system) {
        messages_.resize(1);
    } else {
        messages_.clear();
    }
}

std::string prompt_fingerprint(const std::vector<ChatMessage>& messages) {
    std::string data;
    for (const auto& m : messages) {
        data += to_string(m.role);
        data += '\0';
        data += std::to_string(m.content.size());
        data += '\0';
        data += m.content;
    }
    return fingerprint(data);
}

void to_json(nlohmann::json& j, const LedgerSnapshot& v) {
    j = {{"requests", v.requests}, {"retries_absorbed", v.retries_absorbed}, {"per_phase", v.per_phase}};
}

void from_json(const nlohmann::json& j, LedgerSnapshot& v) {
    v.requests = j.value("requests", std::size_t{0});
    v.retries_absorbed = j.value("retries_absorbed", std::size_t{0});
    v.per_phase = j.value("per_phase", std::map<std::string, std::size_t>{});
}

void CostLedger::record(const std::string& phase, std::size_t retries) {
    std::lock_guard lock(mutex_);
    data_.requests += 1;
    data_.retries_absorbed += retries;
    data_.per_phase[phase] += 1;
}

void CostLedger::absorb(const LedgerSnapshot& other) {
    std::lock_guard lock(mutex_);
    data_.requests += other.requests;
    data_.retries_absorbed += other.retries_absorbed;
    for (const auto& [phase, n] : other.per_phase) data_.per_phase[phase] += n;
}

LedgerSnapshot CostLedger::snapshot() const {
    std::lock_guard lock(mutex_);
    return data_;
}

std::size_t CostLedger::requests() const {
    std::lock_guard lock(mutex_);
    return data_.requests;
}

std::size_t CostLedger::phase_count(const std::string& phase) const {
    std::lock_guard lock(mutex_);
    auto it = data_.per_phase.find(phase);
    return it == data_.per_phase.end() ? 0 : it->second;
}

Gateway::Gateway(std::shared_ptr<Backend> backend, int max_attempts, int initial_backoff_ms, Sleeper sleeper)
    : backend_(std::move(backend)), max_attempts_(max_attempts), initial_backoff_ms_(initial_backoff_ms),
      sleeper_(std::move(sleeper)) {
    if (!backend_) throw InvalidConfig("llm_backend", "gateway needs a backend");
    if (max_attempts_ < 1) throw InvalidConfig("llm.max_attempts", "must be at least 1");
    if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

void Gateway::record_to(std::shared_ptr<Transcript> transcript) { transcript_ = std::move(transcript); }

namespace {

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

std::string Gateway::send(ChatSession& session, const std::string& prompt, const std::string& phase,
                          CostLedger& ledger) {
    if (prompt.empty()) throw InvalidState("empty prompt for phase " + phase);
    ChatRequest request;
    request.session_id = session.id();
    request.messages = session.messages();
    request.messages.push_back({Role::user, prompt});
    request.fingerprint = prompt_fingerprint(request.messages);
    request.phase = phase;

    std::size_t retries = 0;
    std::string response;
    std::string last_error;
    for (int attempt = 0;; ++attempt) {
        try {
            response = backend_->complete(request);
            break;
        } catch (const TransportError& e) {
            last_error = e.what();
            if (attempt + 1 >= max_attempts_)
                throw BackendExhausted(std::to_string(max_attempts_) + " attempts failed for phase " + phase +
                                       ": " + last_error);
            ++retries;
            sleeper_(std::chrono::milliseconds(static_cast<long long>(initial_backoff_ms_) << attempt));
        }
    }

    session.append(Role::user, prompt);
    session.append(Role::assistant, response);
    ledger.record(phase, retries);
    if (transcript_) {
        TranscriptRecord record;
        record.session_id = session.id();
        record.phase = phase;
        record.prompt_fingerprint = request.fingerprint;
        record.full_prompt = prompt;
        record.response = response;
        record.timestamp = clock_ ? clock_() : utc_timestamp();
        transcript_->append(std::move(record));
    }
    return response;
}

} // namespace testmend
