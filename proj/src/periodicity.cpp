#include "stm/periodicity.hpp"

#include "stm/error.hpp"

#include <cmath>
#include <string>

namespace stm {

namespace {

std::size_t count_mismatches(const std::vector<int>& d, std::size_t period, std::size_t budget) {
    std::size_t mismatches = 0;
    for (std::size_t t = period; t < d.size(); ++t) {
        if (d[t] != d[t % period] && ++mismatches > budget) break;
    }
    return mismatches;
}

}  // namespace

PeriodicityResult detect_period(const TransitionSequence& deltas, double tolerance) {
    if (!(tolerance >= 0.0 && tolerance < 1.0)) {
        throw Error(ErrorKind::domain, "period tolerance must lie in [0, 1)");
    }
    const auto& d = deltas.deltas;
    const std::size_t m = d.size();

    PeriodicityResult result;
    result.mismatch_tolerance = tolerance;
    result.consistent.assign(m, false);
    if (m < 2) return result;

    // Largest whole number of mismatches whose fraction stays within tolerance.
    const auto budget = static_cast<std::size_t>(std::floor(tolerance * static_cast<double>(m) + 1e-12));

    for (std::size_t period = 1; period <= m / 2; ++period) {
        if (count_mismatches(d, period, budget) <= budget) {
            result.period = period;
            for (std::size_t t = 0; t < m; ++t) result.consistent[t] = d[t] == d[t % period];
            break;
        }
    }
    return result;
}

double periodic_weight(const PeriodicityResult& result, std::size_t t, double bonus) {
    if (t >= result.consistent.size()) {
        throw Error(ErrorKind::domain, "transition position " + std::to_string(t) + " out of range");
    }
    if (result.period && result.consistent[t]) return 1.0 + bonus;
    return 1.0;
}

}  // namespace stm
