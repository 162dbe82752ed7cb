#pragma once

#include "stm/symbolic.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace stm {

struct PeriodicityResult {
    std::optional<std::size_t> period;
    double mismatch_tolerance = 0.0;
    // One flag per transition: deltas[t] == deltas[t mod period].
    std::vector<bool> consistent;
};

/**
 * Smallest T in [1, M/2] whose repetition explains the whole transition
 * sequence, allowing at most a `tolerance` fraction of positions with
 * deltas[t] != deltas[t mod T]. Sequences with fewer than two transitions
 * never report a period.
 */
PeriodicityResult detect_period(const TransitionSequence& deltas, double tolerance = 0.0);

/// 1 + bonus at period-consistent positions, 1 elsewhere.
double periodic_weight(const PeriodicityResult& result, std::size_t t, double bonus);

}  // namespace stm
