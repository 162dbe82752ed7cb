#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stm {

/// Decoding parameters sent with every request. Defaults are greedy
/// decoding with temperature 0.12 and top_p 0.9, one returned sequence.
struct GenerationParams {
    int num_return_sequences = 1;
    double temperature = 0.12;
    double top_p = 0.9;
    bool do_sample = false;
    int max_new_tokens = 16;

    void validate() const;
};

enum class BackendKind { mock, persistence, http };
enum class ParseMode { first, last };

std::string to_string(BackendKind kind);
BackendKind parse_backend_kind(const std::string& s);
std::string to_string(ParseMode mode);
ParseMode parse_parse_mode(const std::string& s);

struct BackendSpec {
    BackendKind kind = BackendKind::mock;
    std::string endpoint_url;  // falls back to the endpoint env var when empty
    std::string endpoint_env_var = "STM_ENDPOINT_URL";
    std::string auth_token_env_var = "STM_API_TOKEN";
    int timeout_ms = 30000;
    int max_concurrent_requests = 4;
    int retries = 2;
    int backoff_ms = 100;  // first retry delay; doubles each attempt
    ParseMode parse_mode = ParseMode::first;

    std::string resolved_endpoint() const;
    void validate() const;
};

struct Completion {
    std::string raw_text;
    std::optional<double> parsed_value;
    double latency_ms = 0.0;
};

/// Prompt plus the structured window behind it. Text backends read only the
/// prompt; the persistence baseline reads only the history.
struct CompletionRequest {
    std::string_view prompt;
    std::span<const double> history;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual Completion complete(const CompletionRequest& request, const GenerationParams& params) = 0;
    virtual BackendKind kind() const noexcept = 0;
    /// Upper bound on simultaneous complete() calls that make progress.
    virtual int max_concurrency() const noexcept { return 1; }
};

std::unique_ptr<Backend> make_backend(const BackendSpec& spec);

/// One-shot helper over make_backend.
Completion complete(const BackendSpec& spec, std::string_view prompt, const GenerationParams& params,
                    std::span<const double> history = {});

struct NumberMatch {
    std::size_t offset = 0;
    std::string text;  // as it appeared, separators included
    double value = 0.0;
};

/// Every maximal sign? digits (. digits)? ([eE] sign? digits)? match, left to right.
/// Commas between three-digit groups are read as thousands separators.
std::vector<NumberMatch> find_numbers(std::string_view text);

std::optional<double> parse_numeric(std::string_view text, ParseMode mode = ParseMode::first);

/// Generated text with a leading echo of the prompt removed.
std::string strip_prompt_echo(std::string_view generated, std::string_view prompt);

}  // namespace stm
