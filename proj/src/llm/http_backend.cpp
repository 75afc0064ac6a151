#include "testmend/llm/http_backend.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "testmend/core/errors.hpp"

namespace testmend {

std::atomic<std::size_t> HttplibTransport::operations_{0};

std::size_t HttplibTransport::network_operations() { return operations_.load(); }

HttpReply HttplibTransport::post(const std::string& url, const std::map<std::string, std::string>& headers,
                                 const std::string& body, int timeout_s) {
    ++operations_;
    // Split "scheme://host[:port]/path" into the client base and the request path.
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw TransportError("malformed endpoint URL: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    std::string base = path_start == std::string::npos ? url : url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(base);
    client.set_connection_timeout(timeout_s, 0);
    client.set_read_timeout(timeout_s, 0);
    client.set_write_timeout(timeout_s, 0);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = client.Post(path, h, body, "application/json");
    if (!res) throw TransportError("request to " + base + " failed: " + httplib::to_string(res.error()));
    return HttpReply{res->status, res->body};
}

HttpBackend::HttpBackend(LlmSettings settings, std::shared_ptr<Transport> transport)
    : settings_(std::move(settings)), transport_(std::move(transport)) {
    if (!transport_) transport_ = std::make_shared<HttplibTransport>();
}

std::string HttpBackend::request_body(const ChatRequest& request) const {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : request.messages) messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
    nlohmann::json body = {{"model", settings_.model}, {"temperature", settings_.temperature}, {"messages", messages}};
    return body.dump();
}

std::string HttpBackend::complete(const ChatRequest& request) {
    const char* key = std::getenv(settings_.api_key_env.c_str());
    if (!key || !*key) throw BackendRejected("environment variable " + settings_.api_key_env + " is not set");
    std::string url = settings_.endpoint;
    while (!url.empty() && url.back() == '/') url.pop_back();
    url += "/chat/completions";
    std::map<std::string, std::string> headers = {{"Authorization", std::string("Bearer ") + key}};
    HttpReply reply = transport_->post(url, headers, request_body(request), settings_.request_timeout_s);
    if (reply.status == 429 || reply.status >= 500)
        throw TransportError("endpoint answered HTTP " + std::to_string(reply.status));
    if (reply.status < 200 || reply.status >= 300)
        throw BackendRejected("endpoint answered HTTP " + std::to_string(reply.status) + ": " + reply.body.substr(0, 200));
    try {
        auto j = nlohmann::json::parse(reply.body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw TransportError(std::string("unreadable completion body: ") + e.what());
    }
}

} // namespace testmend
