#include "http_backend.hpp"

#include "stm/error.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <thread>

namespace stm::detail {

namespace {

bool retryable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

ParsedUrl parse_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error(ErrorKind::config, "endpoint URL lacks a scheme: " + url);
    const std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http") {
        throw Error(ErrorKind::config, "unsupported endpoint scheme '" + scheme + "' (only http is built in)");
    }
    const auto path_begin = url.find('/', scheme_end + 3);
    ParsedUrl out;
    out.scheme_host_port = url.substr(0, path_begin);
    out.path = path_begin == std::string::npos ? "/" : url.substr(path_begin);
    if (out.scheme_host_port.size() <= scheme_end + 3) throw Error(ErrorKind::config, "endpoint URL lacks a host: " + url);
    return out;
}

class HttpBackend::Slot {
public:
    explicit Slot(HttpBackend& owner) : owner_(owner) {
        std::unique_lock lock(owner_.mutex_);
        owner_.slot_freed_.wait(lock, [&] { return owner_.in_flight_ < owner_.spec_.max_concurrent_requests; });
        ++owner_.in_flight_;
    }
    ~Slot() {
        {
            std::lock_guard lock(owner_.mutex_);
            --owner_.in_flight_;
        }
        owner_.slot_freed_.notify_one();
    }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

private:
    HttpBackend& owner_;
};

HttpBackend::HttpBackend(BackendSpec spec) : spec_(std::move(spec)), url_(parse_url(spec_.resolved_endpoint())) {}

Completion HttpBackend::complete(const CompletionRequest& request, const GenerationParams& params) {
    params.validate();
    if (request.prompt.empty()) throw Error(ErrorKind::config, "prompt must not be empty");

    const nlohmann::json body = {
        {"prompt", std::string(request.prompt)},
        {"temperature", params.temperature},
        {"top_p", params.top_p},
        {"do_sample", params.do_sample},
        {"n", params.num_return_sequences},
        {"max_new_tokens", params.max_new_tokens},
    };
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (!spec_.auth_token_env_var.empty()) {
        if (const char* token = std::getenv(spec_.auth_token_env_var.c_str()); token && *token) {
            headers.emplace("Authorization", std::string("Bearer ") + token);
        }
    }

    const auto timeout = std::chrono::milliseconds(spec_.timeout_ms);
    const auto start = std::chrono::steady_clock::now();
    std::string last_failure = "no attempt made";
    bool last_was_timeout = false;
    int last_status = 0;

    for (int attempt = 0; attempt <= spec_.retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(static_cast<long long>(spec_.backoff_ms) << (attempt - 1)));
        }
        httplib::Result res;
        const auto attempt_start = std::chrono::steady_clock::now();
        {
            Slot slot(*this);
            httplib::Client client(url_.scheme_host_port);
            client.set_connection_timeout(timeout);
            client.set_read_timeout(timeout);
            client.set_write_timeout(timeout);
            res = client.Post(url_.path, headers, payload, "application/json");
        }

        if (!res) {
            const auto err = res.error();
            const auto waited = std::chrono::steady_clock::now() - attempt_start;
            last_was_timeout = err == httplib::Error::ConnectionTimeout ||
                               (err == httplib::Error::Read && waited >= timeout * 9 / 10);
            last_status = 0;
            last_failure = "request to " + spec_.resolved_endpoint() + " failed: " + httplib::to_string(err);
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            last_was_timeout = false;
            last_status = res->status;
            last_failure = "endpoint returned HTTP " + std::to_string(res->status);
            if (retryable_status(res->status)) continue;
            throw Error(ErrorKind::backend, last_failure, res->status);
        }

        std::string text;
        try {
            text = nlohmann::json::parse(res->body).at("text").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::backend, std::string("malformed completion response: ") + e.what(), res->status);
        }
        Completion c;
        c.raw_text = strip_prompt_echo(text, request.prompt);
        c.parsed_value = parse_numeric(c.raw_text, spec_.parse_mode);
        c.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        return c;
    }

    const std::string msg = last_failure + " (after " + std::to_string(spec_.retries + 1) + " attempts)";
    if (last_was_timeout) throw Error(ErrorKind::timeout, msg);
    throw Error(ErrorKind::backend, msg, last_status);
}

}  // namespace stm::detail
