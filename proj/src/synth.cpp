#include "stm/synth.hpp"

#include "stm/error.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace stm {

SynthKind parse_synth_kind(const std::string& s) {
    if (s == "sine") return SynthKind::sine;
    if (s == "sawtooth") return SynthKind::sawtooth;
    if (s == "step") return SynthKind::step;
    if (s == "noise") return SynthKind::noise;
    if (s == "mix") return SynthKind::mix;
    throw Error(ErrorKind::config, "unknown synthetic kind '" + s + "' (sine|sawtooth|step|noise|mix)");
}

std::string to_string(SynthKind kind) {
    switch (kind) {
        case SynthKind::sine: return "sine";
        case SynthKind::sawtooth: return "sawtooth";
        case SynthKind::step: return "step";
        case SynthKind::noise: return "noise";
        case SynthKind::mix: return "mix";
    }
    return "mix";
}

TimeSeries synthesize(const SynthOptions& o) {
    if (o.n == 0) throw Error(ErrorKind::config, "synthetic length must be positive");
    if (!(o.period > 0.0) || !(o.interval_s > 0.0) || o.noise < 0.0) {
        throw Error(ErrorKind::config, "synthetic period and interval must be positive, noise non-negative");
    }
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    TimeSeries s;
    s.timestamps.reserve(o.n);
    s.values.reserve(o.n);
    for (std::size_t i = 0; i < o.n; ++i) {
        const double t = static_cast<double>(i);
        const double phase = std::fmod(t, o.period) / o.period;
        double v = 0.0;
        switch (o.kind) {
            case SynthKind::sine: v = std::sin(2.0 * std::numbers::pi * phase); break;
            case SynthKind::sawtooth: v = 2.0 * phase - 1.0; break;
            case SynthKind::step: v = phase < 0.5 ? -1.0 : 1.0; break;
            case SynthKind::noise: v = 0.0; break;
            case SynthKind::mix:
                v = std::sin(2.0 * std::numbers::pi * phase) + 0.3 * (2.0 * std::fmod(t, 7.0 * o.period) / (7.0 * o.period) - 1.0);
                break;
        }
        double value = o.offset + o.amplitude * v;
        if (o.noise > 0.0) value += o.noise * gauss(rng);
        s.timestamps.push_back(o.start_epoch + t * o.interval_s);
        s.values.push_back(value);
    }
    return s;
}

}  // namespace stm
