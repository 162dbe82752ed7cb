#include "stm/error.hpp"

namespace stm {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::config: return "config";
        case ErrorKind::domain: return "domain";
        case ErrorKind::fit: return "fit";
        case ErrorKind::encode: return "encode";
        case ErrorKind::insufficient_data: return "insufficient-data";
        case ErrorKind::consistency: return "consistency";
        case ErrorKind::load: return "load";
        case ErrorKind::empty_data: return "empty-data";
        case ErrorKind::split: return "split";
        case ErrorKind::template_error: return "template";
        case ErrorKind::metric: return "metric";
        case ErrorKind::undefined_improvement: return "undefined-improvement";
        case ErrorKind::backend: return "backend";
        case ErrorKind::timeout: return "timeout";
        case ErrorKind::eval: return "eval";
        case ErrorKind::profiling: return "profiling";
    }
    return "unknown";
}

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::config:
        case ErrorKind::domain:
        case ErrorKind::template_error:
            return 2;
        case ErrorKind::backend:
        case ErrorKind::timeout:
        case ErrorKind::eval:
            return 4;
        default:
            return 3;
    }
}

}  // namespace stm
