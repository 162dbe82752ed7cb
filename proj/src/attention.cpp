#include "stm/attention.hpp"

#include "stm/error.hpp"

#include <cmath>
#include <cstdlib>

namespace stm {

namespace {

int sign(int v) noexcept { return (v > 0) - (v < 0); }

}  // namespace

void AttentionConfig::validate() const {
    if (!std::isfinite(periodic_bonus) || periodic_bonus < 0.0) {
        throw Error(ErrorKind::config, "periodic bonus must be finite and >= 0");
    }
    if (!std::isfinite(directional_bonus) || directional_bonus < 0.0) {
        throw Error(ErrorKind::config, "directional bonus must be finite and >= 0");
    }
    if (!(tolerance >= 0.0 && tolerance < 1.0)) {
        throw Error(ErrorKind::config, "period tolerance must lie in [0, 1)");
    }
}

AttentionWeights score(const SymbolSequence& seq,
                       const TransitionSequence& deltas,
                       const PeriodicityResult& periodicity,
                       const AttentionConfig& cfg) {
    cfg.validate();
    const std::size_t n = seq.symbols.size();
    if (n < 2) throw Error(ErrorKind::insufficient_data, "attention needs at least two symbols");
    const std::size_t m = n - 1;
    if (deltas.deltas.size() != m || periodicity.consistent.size() != m) {
        throw Error(ErrorKind::consistency, "symbols, transitions and periodicity disagree in length");
    }
    const int max_distance = seq.quantizer_k - 1;
    if (max_distance <= 0) throw Error(ErrorKind::domain, "symbol alphabet needs at least two levels");

    AttentionWeights w;
    w.trend_sign = sign(seq.symbols.back() - seq.symbols.front());
    w.alphas.resize(m);
    w.damping.resize(m);
    w.periodic.resize(m);
    w.directional.resize(m);
    w.raw.resize(m);

    double total = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
        const int delta = deltas.deltas[t];
        if (delta != seq.symbols[t + 1] - seq.symbols[t]) {
            throw Error(ErrorKind::consistency, "transitions were not derived from this symbol sequence");
        }
        w.damping[t] = t == 0 ? 1.0
                              : 1.0 - static_cast<double>(std::abs(seq.symbols[t] - seq.symbols[t - 1])) /
                                          max_distance;
        w.periodic[t] = periodic_weight(periodicity, t, cfg.periodic_bonus);
        w.directional[t] = (w.trend_sign != 0 && sign(delta) == w.trend_sign) ? 1.0 + cfg.directional_bonus : 1.0;
        w.raw[t] = w.damping[t] * std::abs(delta) * w.periodic[t] * w.directional[t];
        total += w.raw[t];
    }

    if (total == 0.0) {
        w.uniform_fallback = true;
        for (double& a : w.alphas) a = 1.0 / static_cast<double>(m);
    } else {
        for (std::size_t t = 0; t < m; ++t) w.alphas[t] = w.raw[t] / total;
    }
    return w;
}

double weighted_summary(std::span<const double> values, const AttentionWeights& weights) {
    if (values.size() != weights.alphas.size() + 1) {
        throw Error(ErrorKind::consistency, "weighted summary needs one more value than transitions");
    }
    double acc = 0.0;
    for (std::size_t t = 0; t < weights.alphas.size(); ++t) acc += weights.alphas[t] * values[t + 1];
    return acc;
}

StmAnalysis analyze(const Quantizer& q, std::span<const double> values, const AttentionConfig& cfg) {
    StmAnalysis a;
    a.symbols = encode(q, values);
    a.transitions = transitions(a.symbols);
    a.periodicity = detect_period(a.transitions, cfg.tolerance);
    a.attention = score(a.symbols, a.transitions, a.periodicity, cfg);
    a.pattern = pattern_string(a.symbols, q);
    return a;
}

}  // namespace stm
