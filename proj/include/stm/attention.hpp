#pragma once

#include "stm/periodicity.hpp"
#include "stm/symbolic.hpp"

#include <span>
#include <string>
#include <vector>

namespace stm {

struct AttentionConfig {
    double periodic_bonus = 0.5;     // gamma_p
    double directional_bonus = 0.2;  // gamma_d
    double tolerance = 0.0;          // epsilon for period detection

    /// Throws Error(config) on out-of-range or non-finite parameters.
    void validate() const;
};

/**
 * Normalized transition attention. `alphas` sum to one; the remaining
 * vectors record the factors that produced each raw score.
 */
struct AttentionWeights {
    std::vector<double> alphas;
    int trend_sign = 0;

    std::vector<double> damping;      // 1 - d(s_t, s_{t-1}) / D, 1 at t = 0
    std::vector<double> periodic;     // p(T_t)
    std::vector<double> directional;  // 1 + gamma_d or 1
    std::vector<double> raw;          // product with |delta_t|, pre-normalization
    bool uniform_fallback = false;

    std::size_t size() const noexcept { return alphas.size(); }
};

AttentionWeights score(const SymbolSequence& seq,
                       const TransitionSequence& deltas,
                       const PeriodicityResult& periodicity,
                       const AttentionConfig& cfg = {});

/// sum_t alpha_t * values[t + 1]. Diagnostic only, never rendered into prompts.
double weighted_summary(std::span<const double> values, const AttentionWeights& weights);

/// Everything computed for one window: symbols, transitions, period and attention.
struct StmAnalysis {
    SymbolSequence symbols;
    TransitionSequence transitions;
    PeriodicityResult periodicity;
    AttentionWeights attention;
    std::string pattern;
};

StmAnalysis analyze(const Quantizer& q, std::span<const double> values, const AttentionConfig& cfg = {});

}  // namespace stm
