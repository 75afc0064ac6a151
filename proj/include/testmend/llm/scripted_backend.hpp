#pragma once

#include <deque>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "testmend/llm/gateway.hpp"

namespace testmend {

/// Offline backend answering from a callback or a fixed queue of responses.
/// Transport failures can be injected ahead of any answer.
class ScriptedBackend : public Backend {
public:
    using Responder = std::function<std::string(const ChatRequest&)>;

    explicit ScriptedBackend(Responder responder);
    explicit ScriptedBackend(std::vector<std::string> responses);

    std::string name() const override { return "scripted"; }
    std::string complete(const ChatRequest& request) override;

    /// The next `n` calls throw TransportError.
    void fail_next(std::size_t n);
    std::size_t calls() const;
    std::vector<ChatRequest> requests() const;

private:
    mutable std::mutex mutex_;
    Responder responder_;
    std::deque<std::string> queue_;
    std::size_t pending_failures_ = 0;
    std::size_t calls_ = 0;
    std::vector<ChatRequest> requests_;
};

} // namespace testmend
