#pragma once

#include "stm/dataset.hpp"

#include <cstdint>
#include <string>

namespace stm {

enum class SynthKind { sine, sawtooth, step, noise, mix };

SynthKind parse_synth_kind(const std::string& s);
std::string to_string(SynthKind kind);

struct SynthOptions {
    SynthKind kind = SynthKind::mix;
    std::size_t n = 2000;
    std::uint64_t seed = 42;
    double period = 24.0;  // samples per cycle
    double amplitude = 10.0;
    double offset = 15.0;
    double noise = 0.5;  // Gaussian sigma
    double interval_s = 3600.0;
    double start_epoch = 1577836800.0;  // 2020-01-01T00:00:00Z
};

/// Seeded synthetic series; identical options give identical output.
TimeSeries synthesize(const SynthOptions& options);

}  // namespace stm
