#pragma once

#include "stm/backend.hpp"

#include <condition_variable>
#include <mutex>
#include <string>

namespace stm::detail {

struct ParsedUrl {
    std::string scheme_host_port;  // "http://host:port"
    std::string path;              // "/..." (at least "/")
};

ParsedUrl parse_url(const std::string& url);

/// POSTs {prompt, temperature, top_p, do_sample, n, max_new_tokens} and reads
/// {text}. At most spec.max_concurrent_requests calls are on the wire at once.
class HttpBackend final : public Backend {
public:
    explicit HttpBackend(BackendSpec spec);

    Completion complete(const CompletionRequest& request, const GenerationParams& params) override;
    BackendKind kind() const noexcept override { return BackendKind::http; }
    int max_concurrency() const noexcept override { return spec_.max_concurrent_requests; }

private:
    class Slot;

    BackendSpec spec_;
    ParsedUrl url_;
    std::mutex mutex_;
    std::condition_variable slot_freed_;
    int in_flight_ = 0;
};

}  // namespace stm::detail
