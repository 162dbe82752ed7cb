#pragma once

#include <stdexcept>
#include <string>

namespace stm {

enum class ErrorKind {
    config,         // invalid configuration, templates, parameters
    domain,         // argument outside its mathematical domain
    fit,            // quantizer / normalizer fitting
    encode,
    insufficient_data,
    consistency,    // mismatched lengths between related inputs
    load,           // missing file or column
    empty_data,
    split,
    template_error,
    metric,
    undefined_improvement,
    backend,
    timeout,
    eval,
    profiling,
};

const char* to_string(ErrorKind kind) noexcept;

/// Single exception type for the library. The kind drives CLI exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, int http_status = 0)
        : std::runtime_error(message), kind_(kind), http_status_(http_status) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// HTTP status for backend errors raised on a non-2xx response, else 0.
    int http_status() const noexcept { return http_status_; }

private:
    ErrorKind kind_;
    int http_status_;
};

/// Exit code class: 2 config, 3 data, 4 backend.
int exit_code_for(ErrorKind kind) noexcept;

}  // namespace stm
