#include "support/mock_backend.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <array>
#include <chrono>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace revsplit::testsupport {

namespace {

std::string field_after_last(const std::string& text, const std::string& label,
                             const std::string& terminator) {
    const std::size_t pos = text.rfind(label);
    if (pos == std::string::npos)
        return {};
    const std::size_t begin = pos + label.size();
    const std::size_t end = terminator.empty() ? std::string::npos
                                               : text.find(terminator, begin);
    return end == std::string::npos ? text.substr(begin) : text.substr(begin, end - begin);
}

} // namespace

ParsedPrompt parse_prompt(const std::string& rendered) {
    ParsedPrompt parsed;
    parsed.latex_content = field_after_last(rendered, "\nLaTeX content:\n", "");
    const std::string head = rendered.substr(0, rendered.rfind("\nLaTeX content:\n"));
    parsed.title = field_after_last(head, "\nTitle: ", "\n");
    parsed.next_title = field_after_last(head, "\nNext title: ", "\n");
    return parsed;
}

struct MockServer::Impl {
    httplib::Server server;
    std::thread thread;
    Responder responder;
    std::array<std::atomic<int>, 16> counts{};
    std::array<std::string, 16> last_bodies;
    std::array<std::string, 16> last_auth;
    std::mutex body_mutex;
};

MockServer::MockServer(Responder responder, int backend_count) : impl_(new Impl) {
    impl_->responder = std::move(responder);
    if (backend_count < 1 || backend_count > 16)
        throw std::invalid_argument("backend_count out of range");

    for (int b = 0; b < backend_count; ++b) {
        const std::string route = "/b" + std::to_string(b) + "/chat/completions";
        impl_->server.Post(route, [this, b](const httplib::Request& req,
                                            httplib::Response& res) {
            impl_->counts[static_cast<std::size_t>(b)].fetch_add(1);
            {
                std::lock_guard<std::mutex> lock(impl_->body_mutex);
                impl_->last_bodies[static_cast<std::size_t>(b)] = req.body;
                impl_->last_auth[static_cast<std::size_t>(b)] =
                    req.get_header_value("Authorization");
            }

            const nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
            std::string rendered;
            if (!body.is_discarded() && body.contains("messages") && body["messages"].is_array() &&
                !body["messages"].empty())
                rendered = body["messages"][0].value("content", "");

            const MockReply reply = impl_->responder(b, parse_prompt(rendered));
            if (reply.status != 200) {
                res.status = reply.status;
                res.set_content("simulated failure", "text/plain");
                return;
            }
            if (reply.garbage_body) {
                res.set_content("this is not a completion", "text/plain");
                return;
            }
            nlohmann::json out;
            nlohmann::json message;
            message["role"] = "assistant";
            message["content"] = reply.content;
            nlohmann::json choice;
            choice["message"] = message;
            if (reply.logprobs) {
                nlohmann::json tokens = nlohmann::json::array();
                for (const double lp : *reply.logprobs)
                    tokens.push_back({{"logprob", lp}});
                choice["logprobs"] = {{"content", tokens}};
            }
            out["choices"] = nlohmann::json::array({choice});
            res.set_content(out.dump(), "application/json");
        });
    }

    port_ = impl_->server.bind_to_any_port("127.0.0.1");
    if (port_ <= 0)
        throw std::runtime_error("mock server could not bind a port");
    impl_->thread = std::thread([this]() { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

MockServer::~MockServer() {
    impl_->server.stop();
    if (impl_->thread.joinable())
        impl_->thread.join();
}

std::string MockServer::endpoint(int backend_index) const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/b" + std::to_string(backend_index);
}

int MockServer::request_count(int backend_index) const {
    return impl_->counts[static_cast<std::size_t>(backend_index)].load();
}

std::string MockServer::last_request_body(int backend_index) const {
    std::lock_guard<std::mutex> lock(impl_->body_mutex);
    return impl_->last_bodies[static_cast<std::size_t>(backend_index)];
}

std::string MockServer::last_authorization(int backend_index) const {
    std::lock_guard<std::mutex> lock(impl_->body_mutex);
    return impl_->last_auth[static_cast<std::size_t>(backend_index)];
}

std::string MockServer::backends_config(int backend_count, int best_index,
                                        int max_retries) const {
    std::string config;
    for (int b = 0; b < backend_count; ++b) {
        config += "[backend" + std::to_string(b) + "]\n";
        config += "endpoint = " + endpoint(b) + "\n";
        config += "model = mock-model-" + std::to_string(b) + "\n";
        config += "timeout = 10\n";
        config += "max_retries = " + std::to_string(max_retries) + "\n";
        if (b == best_index)
            config += "best = true\n";
        config += "\n";
    }
    return config;
}

} // namespace revsplit::testsupport
