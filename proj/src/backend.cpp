#include "stm/backend.hpp"

#include "stm/error.hpp"
#include "http_backend.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>

namespace stm {

namespace {

constexpr std::string_view kUnicodeMinus = "\xE2\x88\x92";

bool is_digit(std::string_view s, std::size_t i) {
    return i < s.size() && s[i] >= '0' && s[i] <= '9';
}

std::size_t skip_digits(std::string_view s, std::size_t i) {
    while (is_digit(s, i)) ++i;
    return i;
}

std::string shortest(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

/// Echoes the last number of the prompt's first line. The STM context is
/// appended after a newline, so both prompt variants get the same answer.
class MockBackend final : public Backend {
public:
    explicit MockBackend(ParseMode mode) : mode_(mode) {}

    Completion complete(const CompletionRequest& request, const GenerationParams& params) override {
        params.validate();
        const auto start = std::chrono::steady_clock::now();
        const auto first_line = request.prompt.substr(0, request.prompt.find('\n'));
        const auto numbers = find_numbers(first_line);
        Completion c;
        if (!numbers.empty()) c.raw_text = numbers.back().text;
        c.parsed_value = parse_numeric(c.raw_text, mode_);
        c.latency_ms = elapsed_ms(start);
        return c;
    }

    BackendKind kind() const noexcept override { return BackendKind::mock; }

private:
    ParseMode mode_;
};

class PersistenceBackend final : public Backend {
public:
    Completion complete(const CompletionRequest& request, const GenerationParams& params) override {
        params.validate();
        const auto start = std::chrono::steady_clock::now();
        Completion c;
        if (!request.history.empty()) {
            c.raw_text = shortest(request.history.back());
            c.parsed_value = request.history.back();
        }
        c.latency_ms = elapsed_ms(start);
        return c;
    }

    BackendKind kind() const noexcept override { return BackendKind::persistence; }
};

}  // namespace

void GenerationParams::validate() const {
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw Error(ErrorKind::config, "temperature must be > 0");
    }
    if (!(top_p > 0.0 && top_p <= 1.0)) throw Error(ErrorKind::config, "top_p must lie in (0, 1]");
    if (num_return_sequences < 1) throw Error(ErrorKind::config, "num_return_sequences must be >= 1");
    if (max_new_tokens < 1) throw Error(ErrorKind::config, "max_new_tokens must be >= 1");
}

std::string to_string(BackendKind kind) {
    switch (kind) {
        case BackendKind::mock: return "mock";
        case BackendKind::persistence: return "persistence";
        case BackendKind::http: return "http";
    }
    return "mock";
}

BackendKind parse_backend_kind(const std::string& s) {
    if (s == "mock") return BackendKind::mock;
    if (s == "persistence") return BackendKind::persistence;
    if (s == "http") return BackendKind::http;
    throw Error(ErrorKind::config, "unknown backend '" + s + "' (mock|persistence|http)");
}

std::string to_string(ParseMode mode) { return mode == ParseMode::first ? "first" : "last"; }

ParseMode parse_parse_mode(const std::string& s) {
    if (s == "first") return ParseMode::first;
    if (s == "last") return ParseMode::last;
    throw Error(ErrorKind::config, "unknown parse mode '" + s + "' (first|last)");
}

std::string BackendSpec::resolved_endpoint() const {
    if (!endpoint_url.empty()) return endpoint_url;
    if (!endpoint_env_var.empty()) {
        if (const char* env = std::getenv(endpoint_env_var.c_str())) return env;
    }
    return {};
}

void BackendSpec::validate() const {
    if (kind == BackendKind::http && resolved_endpoint().empty()) {
        throw Error(ErrorKind::config, "http backend needs an endpoint URL (flag, config or " + endpoint_env_var + ")");
    }
    if (retries < 0) throw Error(ErrorKind::config, "retries must be >= 0");
    if (timeout_ms <= 0) throw Error(ErrorKind::config, "timeout_ms must be positive");
    if (max_concurrent_requests < 1) throw Error(ErrorKind::config, "max_concurrent_requests must be >= 1");
    if (backoff_ms < 0) throw Error(ErrorKind::config, "backoff_ms must be >= 0");
}

std::unique_ptr<Backend> make_backend(const BackendSpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case BackendKind::mock: return std::make_unique<MockBackend>(spec.parse_mode);
        case BackendKind::persistence: return std::make_unique<PersistenceBackend>();
        case BackendKind::http: return std::make_unique<detail::HttpBackend>(spec);
    }
    throw Error(ErrorKind::config, "unsupported backend kind");
}

Completion complete(const BackendSpec& spec, std::string_view prompt, const GenerationParams& params,
                    std::span<const double> history) {
    if (prompt.empty()) throw Error(ErrorKind::config, "prompt must not be empty");
    return make_backend(spec)->complete({prompt, history}, params);
}

std::vector<NumberMatch> find_numbers(std::string_view s) {
    std::vector<NumberMatch> out;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t start = i;
        std::size_t j = i;
        bool negative = false;
        if ((s[i] == '-' || s[i] == '+') && is_digit(s, i + 1)) {
            negative = s[i] == '-';
            j = i + 1;
        } else if (s.substr(i, kUnicodeMinus.size()) == kUnicodeMinus && is_digit(s, i + kUnicodeMinus.size())) {
            negative = true;
            j = i + kUnicodeMinus.size();
        } else if (!is_digit(s, i)) {
            ++i;
            continue;
        }

        std::string normalized = negative ? "-" : "";
        const std::size_t int_begin = j;
        j = skip_digits(s, j);
        normalized.append(s.substr(int_begin, j - int_begin));
        if (j - int_begin <= 3) {
            while (j < s.size() && s[j] == ',' && is_digit(s, j + 1) && is_digit(s, j + 2) && is_digit(s, j + 3) &&
                   !is_digit(s, j + 4)) {
                normalized.append(s.substr(j + 1, 3));
                j += 4;
            }
        }
        if (j < s.size() && s[j] == '.' && is_digit(s, j + 1)) {
            const std::size_t frac_end = skip_digits(s, j + 1);
            normalized.append(s.substr(j, frac_end - j));
            j = frac_end;
        }
        if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
            std::size_t k = j + 1;
            if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
            if (is_digit(s, k)) {
                const std::size_t exp_end = skip_digits(s, k);
                normalized.push_back('e');
                normalized.append(s.substr(j + 1, exp_end - j - 1));
                j = exp_end;
            }
        }

        double value = 0.0;
        const auto res = std::from_chars(normalized.data(), normalized.data() + normalized.size(), value);
        if (res.ec == std::errc() && std::isfinite(value)) {
            out.push_back({start, std::string(s.substr(start, j - start)), value});
        }
        i = j;
    }
    return out;
}

std::optional<double> parse_numeric(std::string_view text, ParseMode mode) {
    const auto numbers = find_numbers(text);
    if (numbers.empty()) return std::nullopt;
    return mode == ParseMode::first ? numbers.front().value : numbers.back().value;
}

std::string strip_prompt_echo(std::string_view generated, std::string_view prompt) {
    if (!prompt.empty() && generated.substr(0, prompt.size()) == prompt) {
        generated.remove_prefix(prompt.size());
        const auto first = generated.find_first_not_of(" \t\r\n");
        generated.remove_prefix(first == std::string_view::npos ? generated.size() : first);
    }
    return std::string(generated);
}

}  // namespace stm
