#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stm {

/**
 * @brief Uniform K-level binning over a fitted value range.
 *
 * Levels are labelled with consecutive uppercase letters starting at 'A'.
 * The label index doubles as the ordinal weight of the symbol, so level i
 * has weight i and the largest possible symbol distance is k - 1.
 *
 * A quantizer fitted on a constant series (lo == hi) is degenerate and
 * sends every value to the middle level k / 2.
 */
class Quantizer {
public:
    static constexpr int kMinLevels = 2;
    static constexpr int kMaxLevels = 26;

    Quantizer(int k, double lo, double hi);

    int k() const noexcept { return k_; }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double width() const noexcept { return width_; }
    bool degenerate() const noexcept { return lo_ == hi_; }

    /// Lower edge of level i for i in [0, k); edge(k) is hi.
    double edge(int i) const;
    std::vector<double> edges() const;

    char label(int index) const;
    std::string_view labels() const noexcept { return labels_; }

    /// VL/L/M/H/VH for k = 5, otherwise the letter itself.
    std::string alias(int index) const;

    /// Ordinal weight w(.) of a level.
    int weight(int index) const;

    int max_distance() const noexcept { return k_ - 1; }

private:
    int k_;
    double lo_;
    double hi_;
    double width_;
    std::string labels_;
};

struct SymbolSequence {
    std::vector<int> symbols;
    int quantizer_k = 0;

    std::size_t size() const noexcept { return symbols.size(); }
};

struct TransitionSequence {
    std::vector<int> deltas;
    std::size_t source_len = 0;

    std::size_t size() const noexcept { return deltas.size(); }
};

/// Fit lo/hi to the observed min/max. Throws Error(fit) on empty or
/// non-finite input and Error(domain) when k is outside [2, 26].
Quantizer fit_quantizer(std::span<const double> values, int k);

/// Index of the level holding v; out-of-range values clamp to the extremes.
int encode_value(const Quantizer& q, double value);

SymbolSequence encode(const Quantizer& q, std::span<const double> values);

/// d(a, b) = |w(a) - w(b)|.
int symbol_distance(const Quantizer& q, int a, int b);

/// deltas[t] = w(s[t+1]) - w(s[t]). Requires at least two symbols.
TransitionSequence transitions(const SymbolSequence& seq);

std::string pattern_string(const SymbolSequence& seq, const Quantizer& q);

/// Inverse of pattern_string. Throws Error(encode) on unknown characters.
SymbolSequence parse_pattern(std::string_view pattern, const Quantizer& q);

}  // namespace stm
