#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <string>

#include "testmend/llm/gateway.hpp"

namespace testmend {

struct HttpReply {
    int status = 0;
    std::string body;
};

/// One POST of a JSON body. Throws TransportError when no reply arrives.
class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpReply post(const std::string& url, const std::map<std::string, std::string>& headers,
                           const std::string& body, int timeout_s) = 0;
};

/// cpp-httplib transport. Every call bumps a process-wide counter so tests can
/// assert that a pipeline never reached the network.
class HttplibTransport : public Transport {
public:
    HttpReply post(const std::string& url, const std::map<std::string, std::string>& headers,
                   const std::string& body, int timeout_s) override;

    static std::size_t network_operations();

private:
    static std::atomic<std::size_t> operations_;
};

/// Chat-completion client: POST {endpoint}/chat/completions with
/// {model, temperature, messages}; reads choices[0].message.content.
class HttpBackend : public Backend {
public:
    HttpBackend(LlmSettings settings, std::shared_ptr<Transport> transport = nullptr);

    std::string name() const override { return "http"; }
    std::string complete(const ChatRequest& request) override;

    /// Request body for `request`; exposed for tests.
    std::string request_body(const ChatRequest& request) const;

private:
    LlmSettings settings_;
    std::shared_ptr<Transport> transport_;
};

} // namespace testmend
