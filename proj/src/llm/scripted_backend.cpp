#include "testmend/llm/scripted_backend.hpp"

#include "testmend/core/errors.hpp"

namespace testmend {

ScriptedBackend::ScriptedBackend(Responder responder) : responder_(std::move(responder)) {}

ScriptedBackend::ScriptedBackend(std::vector<std::string> responses)
    : queue_(responses.begin(), responses.end()) {}

std::string ScriptedBackend::complete(const ChatRequest& request) {
    Responder responder;
    {
        std::lock_guard lock(mutex_);
        ++calls_;
        if (pending_failures_ > 0) {
            --pending_failures_;
            throw TransportError("injected transport failure");
        }
        requests_.push_back(request);
        if (!responder_) {
            if (queue_.empty()) throw BackendRejected("scripted backend has no response left");
            std::string r = std::move(queue_.front());
            queue_.pop_front();
            return r;
        }
        responder = responder_;
    }
    return responder(request);
}

void ScriptedBackend::fail_next(std::size_t n) {
    std::lock_guard lock(mutex_);
    pending_failures_ += n;
}

std::size_t ScriptedBackend::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

std::vector<ChatRequest> ScriptedBackend::requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
}

} // namespace testmend
